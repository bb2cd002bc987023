#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ontomatch/candidate_index.hpp"
#include "ontomatch/kb.hpp"
#include "ontomatch/random.hpp"

namespace ontomatch {

enum class ExampleKind { kPositive, kEasyNegative, kHardNegative };

std::string_view to_string(ExampleKind kind);

struct LabeledExample {
  std::string source_id;
  std::string target_id;
  int label = 0;  // 1 exactly when kind == kPositive
  ExampleKind kind = ExampleKind::kPositive;

  bool operator==(const LabeledExample&) const = default;
};

struct DatasetSplit {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> dev;
  std::vector<LabeledExample> test;
  std::uint64_t seed = 0;
};

struct NegativeSamplingReport {
  std::size_t easy_skipped = 0;
  std::size_t hard_skipped = 0;
};

// True when the entities share any lowercased name or alias string.
bool name_equivalent(const Entity& a, const Entity& b);

// Label-1 examples for every positive reference pair that is not
// name-equivalent. Throws ValidationError naming an unresolvable id.
std::vector<LabeledExample> extract_positives(const ReferenceAlignment& table, const Ontology& source,
                                              const Ontology& target);

// One easy and one hard negative per positive. Targets that occur in any
// positive are never used. The easy negative is uniform over the remaining
// targets; the hard one is the best-ranked eligible candidate from `index`
// that differs from the easy pick. Exhausted pools skip the negative and log.
std::vector<LabeledExample> sample_negatives(const std::vector<LabeledExample>& positives,
                                             const Ontology& source, const Ontology& target,
                                             const CandidateIndex& index, Rng& rng,
                                             std::size_t k = CandidateIndex::kDefaultK,
                                             NegativeSamplingReport* report = nullptr);

// Seeded shuffle, then slices at floor(0.64 N) and floor(0.80 N).
DatasetSplit split_examples(std::vector<LabeledExample> examples, std::uint64_t seed);

// Positives interleaved with their negatives: pos, easy, hard, pos, ...
std::vector<LabeledExample> derive_examples(const ReferenceAlignment& table, const Ontology& source,
                                            const Ontology& target, std::uint64_t seed,
                                            std::size_t k = CandidateIndex::kDefaultK,
                                            NegativeSamplingReport* report = nullptr);

// TSV: source_id, target_id, label, kind.
void write_examples(const std::vector<LabeledExample>& examples, std::ostream& out);
void write_examples_file(const std::vector<LabeledExample>& examples, const std::string& path);
std::vector<LabeledExample> parse_examples(std::istream& in);
std::vector<LabeledExample> read_examples_file(const std::string& path);

}  // namespace ontomatch
