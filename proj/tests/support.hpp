#pragma once

// Random fixtures shared by the property tests.

#include <string>
#include <vector>

#include "ontomatch/kb.hpp"
#include "ontomatch/random.hpp"

namespace testing {

inline std::string random_word(ontomatch::Rng& rng, std::size_t vocab) {
  return "w" + std::to_string(rng.uniform_index(vocab));
}

inline std::string random_phrase(ontomatch::Rng& rng, std::size_t vocab, std::size_t max_words) {
  std::string out;
  const std::size_t n = 1 + rng.uniform_index(max_words);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += rng.bernoulli(0.2) ? "-" : " ";
    out += random_word(rng, vocab);
  }
  return out;
}

// A valid entity: names, aliases and definitions over a vocabulary of `vocab`
// words, with a few capitalised or non-ASCII forms mixed in.
inline ontomatch::Entity random_entity(ontomatch::Rng& rng, const std::string& id, std::size_t vocab) {
  ontomatch::RawEntity raw;
  raw.id = id;
  raw.name = random_phrase(rng, vocab, 4);
  if (rng.bernoulli(0.2)) raw.name[0] = 'W';
  if (rng.bernoulli(0.1)) raw.name += " été";
  const std::size_t aliases = rng.uniform_index(4);
  for (std::size_t i = 0; i < aliases; ++i) raw.aliases.push_back(random_phrase(rng, vocab, 3));
  if (rng.bernoulli(0.5)) raw.definition = random_phrase(rng, vocab, 10) + ".";
  const std::size_t contexts = rng.bernoulli(0.3) ? rng.uniform_index(4) : 0;
  for (std::size_t i = 0; i < contexts; ++i) raw.contexts.push_back(random_phrase(rng, vocab, 8) + ".");
  if (raw.definition && rng.bernoulli(0.3)) raw.definition_source = ontomatch::DefinitionSource::kExternal;
  return ontomatch::validate_entity(raw);
}

inline ontomatch::Ontology random_ontology(ontomatch::Rng& rng, std::size_t n, std::size_t vocab,
                                           const std::string& prefix = "E") {
  std::vector<ontomatch::Entity> entities;
  for (std::size_t i = 0; i < n; ++i) entities.push_back(random_entity(rng, prefix + std::to_string(i), vocab));
  return ontomatch::Ontology(std::move(entities));
}

}  // namespace testing
