#include "ontomatch/nn/network.hpp"

#include "ontomatch/candidate_index.hpp"
#include "ontomatch/unicode.hpp"

namespace ontomatch::nn {
namespace {

NameToken make_name_token(const std::string& token, const Vocab& vocab, const CharVocab& chars) {
  NameToken out;
  out.word = vocab.find(token);
  for (char32_t c : unicode::decode(token)) out.chars.push_back(chars.find(c));
  return out;
}

}  // namespace

NameSeq make_name_seq(std::string_view text, const Vocab& vocab, const CharVocab& chars) {
  std::vector<std::string> tokens = tokenize(text);
  // Names made only of punctuation still need one token.
  if (tokens.empty()) {
    std::string whole = unicode::normalize_spaces(text);
    if (whole.empty()) return {};
    tokens.push_back(std::move(whole));
  }
  NameSeq seq;
  seq.reserve(tokens.size());
  for (const std::string& t : tokens) seq.push_back(make_name_token(t, vocab, chars));
  return seq;
}

TextSeq make_text_seq(std::string_view text, const Vocab& vocab) {
  TextSeq seq;
  for (const std::string& t : tokenize(text)) seq.push_back(vocab.find(t));
  return seq;
}

EntityInput make_entity_input(const Entity& entity, const Vocab& vocab, const CharVocab& chars,
                              std::size_t max_contexts) {
  EntityInput in;
  in.name = make_name_seq(entity.name, vocab, chars);
  if (in.name.empty()) throw ValidationError("entity '" + entity.id + "' has no usable name");
  for (const std::string& alias : entity.aliases) {
    NameSeq seq = make_name_seq(alias, vocab, chars);
    if (!seq.empty()) in.aliases.push_back(std::move(seq));
  }
  if (in.aliases.empty()) in.aliases.push_back(in.name);
  if (entity.definition) in.definition = make_text_seq(*entity.definition, vocab);
  for (std::size_t i = 0; i < entity.contexts.size() && i < max_contexts; ++i) {
    TextSeq seq = make_text_seq(entity.contexts[i], vocab);
    if (!seq.empty()) in.contexts.push_back(std::move(seq));
  }
  return in;
}

}  // namespace ontomatch::nn
