#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ontomatch/kb.hpp"

namespace ontomatch {

// Lowercased maximal runs of Unicode letters/digits, in order.
std::vector<std::string> tokenize(std::string_view text);

// Sorted, deduplicated tokens of the texts.
std::vector<std::string> token_set(std::string_view text);

// Blocking document of an entity: sorted token set of the name, every alias
// and the definition.
std::vector<std::string> entity_document(const Entity& entity);

struct Candidate {
  std::string target_id;
  std::size_t target = 0;  // position in the target ontology
  double idf_total = 0.0;

  bool operator==(const Candidate&) const = default;
};

struct CandidateList {
  std::string source_id;
  std::vector<Candidate> candidates;
};

// Inverted index over a target ontology for idf-sum candidate selection.
// Immutable after construction; `select` is safe to call concurrently.
class CandidateIndex {
 public:
  static constexpr std::size_t kDefaultK = 50;

  // Throws ValidationError if the ontology is empty.
  explicit CandidateIndex(const Ontology& target);

  std::size_t n_docs() const { return ids_.size(); }
  std::size_t vocabulary_size() const { return postings_.size(); }
  bool contains(std::string_view token) const;
  std::size_t df(std::string_view token) const;
  const std::vector<std::uint32_t>& postings(std::string_view token) const;
  // ln(n_docs / df). Throws std::out_of_range for a token not in the index.
  double idf(std::string_view token) const;

  // Top-k targets by summed idf over the set of shared tokens, ties broken by
  // ascending target id. Targets sharing no token are never returned.
  CandidateList select(const Entity& source, std::size_t k = kDefaultK) const;

 private:
  struct Entry {
    std::vector<std::uint32_t> docs;
    double idf = 0.0;
  };
  const Entry& entry(std::string_view token) const;

  std::vector<std::string> ids_;
  std::unordered_map<std::string, Entry> postings_;
};

}  // namespace ontomatch
