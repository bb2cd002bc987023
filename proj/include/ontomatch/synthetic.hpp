#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ontomatch/enrichment.hpp"
#include "ontomatch/kb.hpp"
#include "ontomatch/nn/embeddings.hpp"

namespace ontomatch {

// Generator for an aligned pair of ontologies with a known mapping: a source
// ontology of pseudo-word concepts and a corrupted copy of it. The vocabulary
// is a thesaurus of synonym groups shared by every benchmark built from the
// same thesaurus seed, so a benchmark for training and another for testing
// can be drawn independently.
struct SyntheticConfig {
  std::size_t entities = 500;
  std::uint64_t seed = 1;
  std::uint64_t thesaurus_seed = 7;
  std::size_t head_groups = 40;       // frequent final words
  std::size_t modifier_groups = 700;  // everything else
  std::size_t synonyms = 3;           // surface forms per group
  std::size_t family_size = 4;        // entities sharing one modifier
  double swap_rate = 0.35;            // per token, replaced by a synonym
  double shuffle_rate = 0.3;          // per name, token order shuffled
  double alias_drop_rate = 0.5;       // per alias, dropped from the copy
  double definition_rate = 0.5;       // per entity and side
  double context_rate = 0.3;          // per entity and side
  std::size_t max_contexts_per_entity = 6;
  double table_fraction = 0.5;  // share of the mapping given as the partial alignment table
  bool strip_target_definitions = false;
  int embedding_dim = 100;
  double embedding_noise = 0.35;  // spread of synonyms around their group centre
};

struct SyntheticBenchmark {
  Ontology source;
  Ontology target;
  ReferenceAlignment reference;  // the known mapping, every pair labeled 1
  ReferenceAlignment table;      // seeded subset of `reference`, the input for derivation
  ContextCorpus contexts;        // for entities of both ontologies
  // Query -> lead text, restoring every target definition. The first
  // sentence of each lead is the definition.
  std::vector<std::pair<std::string, std::string>> definition_fixture;
  nn::Embeddings embeddings;
};

SyntheticBenchmark generate_benchmark(const SyntheticConfig& config);

// Writes source.jsonl, target.jsonl, reference.tsv, table.tsv, contexts.jsonl,
// definitions.jsonl and embeddings.txt into `dir` (created if missing).
void write_benchmark(const SyntheticBenchmark& benchmark, const std::string& dir);

}  // namespace ontomatch
