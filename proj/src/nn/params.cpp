#include "ontomatch/nn/params.hpp"

#include "ontomatch/errors.hpp"

namespace ontomatch::nn {

Vocab::Vocab(std::vector<std::string> words) : words_(std::move(words)) {
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], static_cast<int>(i)).second) {
      throw ValidationError("duplicate vocabulary word '" + words_[i] + "'");
    }
  }
}

int Vocab::find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? -1 : it->second;
}

CharVocab::CharVocab(std::vector<char32_t> chars) : chars_(std::move(chars)) {
  for (std::size_t i = 0; i < chars_.size(); ++i) {
    if (!index_.emplace(chars_[i], static_cast<int>(i) + 2).second) {
      throw ValidationError("duplicate character in character vocabulary");
    }
  }
}

int CharVocab::find(char32_t c) const {
  const auto it = index_.find(c);
  return it == index_.end() ? kUnknown : it->second;
}

std::vector<std::pair<std::string, ArrayShape>> expected_shapes(const Dims& d, int vocab_size, int char_vocab_size) {
  const Index nh = d.name_hidden;
  const Index th = d.text_hidden;
  std::vector<std::pair<std::string, ArrayShape>> s = {
      {"word_vectors", {d.word_dim, vocab_size}},
      {"unk_vector", {d.word_dim, 1}},
      {"char_embed", {d.char_dim, char_vocab_size}},
      {"char_cnn.w0", {d.filters_per_width, static_cast<Index>(d.char_dim) * d.filter_widths[0]}},
      {"char_cnn.b0", {d.filters_per_width, 1}},
      {"char_cnn.w1", {d.filters_per_width, static_cast<Index>(d.char_dim) * d.filter_widths[1]}},
      {"char_cnn.b1", {d.filters_per_width, 1}},
  };
  for (const char* dir : {"fwd", "bwd"}) {
    const std::string prefix = std::string("name_lstm.") + dir;
    s.push_back({prefix + ".wx", {4 * nh, d.name_input()}});
    s.push_back({prefix + ".wh", {4 * nh, nh}});
    s.push_back({prefix + ".b", {4 * nh, 1}});
  }
  for (const char* dir : {"fwd", "bwd"}) {
    const std::string prefix = std::string("text_lstm.") + dir;
    s.push_back({prefix + ".wx", {4 * th, d.word_dim}});
    s.push_back({prefix + ".wh", {4 * th, th}});
    s.push_back({prefix + ".b", {4 * th, 1}});
  }
  s.push_back({"ff1.w", {d.ff1, d.entity_dim()}});
  s.push_back({"ff1.b", {d.ff1, 1}});
  s.push_back({"ff2.w", {d.ff2, d.ff1}});
  s.push_back({"ff2.b", {d.ff2, 1}});
  s.push_back({"combine.w", {d.combine, d.combine_input()}});
  s.push_back({"combine.b", {d.combine, 1}});
  s.push_back({"out.w", {1, d.combine}});
  s.push_back({"out.b", {1, 1}});
  return s;
}

}  // namespace ontomatch::nn
