#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <type_traits>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ontomatch/nn/tensor.hpp"
#include "ontomatch/random.hpp"

namespace ontomatch::nn {

// Layer sizes. Defaults give 200-dim name/text vectors, 800-dim entity
// embeddings and a 288-dim input to the combining layer.
struct Dims {
  int word_dim = 100;
  int char_dim = 25;
  int filters_per_width = 50;
  std::array<int, 2> filter_widths = {4, 5};
  int name_hidden = 100;  // per direction
  int text_hidden = 100;  // per direction
  int ff1 = 256;
  int ff2 = 128;
  int combine = 64;
  int n_features = 32;

  int char_features() const { return filters_per_width * static_cast<int>(filter_widths.size()); }
  int name_input() const { return word_dim + char_features(); }
  int name_output() const { return 2 * name_hidden; }
  int text_output() const { return 2 * text_hidden; }
  int entity_dim() const { return 2 * name_output() + 2 * text_output(); }
  int combine_input() const { return 2 * ff2 + n_features; }
  int min_char_length() const { return std::max(filter_widths[0], filter_widths[1]); }

  bool operator==(const Dims&) const = default;
};

// Word vocabulary; ids index the columns of the word vector matrix.
class Vocab {
 public:
  Vocab() = default;
  explicit Vocab(std::vector<std::string> words);

  int find(std::string_view word) const;  // -1 when out of vocabulary
  const std::vector<std::string>& words() const { return words_; }
  int size() const { return static_cast<int>(words_.size()); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

// Character vocabulary. Index 0 pads short words, index 1 is the unknown
// character; known codepoints start at 2.
class CharVocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnknown = 1;

  CharVocab() = default;
  explicit CharVocab(std::vector<char32_t> chars);

  int find(char32_t c) const;
  const std::vector<char32_t>& chars() const { return chars_; }
  int size() const { return static_cast<int>(chars_.size()) + 2; }

 private:
  std::vector<char32_t> chars_;
  std::unordered_map<char32_t, int> index_;
};

template <typename T>
struct DenseParams {
  Matrix<T> w;
  Vector<T> b;
};

// Gate rows are ordered input, forget, cell, output.
template <typename T>
struct LstmParams {
  Matrix<T> wx;
  Matrix<T> wh;
  Vector<T> b;
};

// Every array of the siamese scorer. The same struct holds gradients and
// optimizer moments. An empty `word_vectors` in a gradient buffer means word
// vectors are frozen and their gradient is not accumulated.
template <typename T>
struct ModelParams {
  Matrix<T> word_vectors;  // word_dim x vocab
  Vector<T> unk_vector;
  Matrix<T> char_embed;  // char_dim x char vocab
  std::array<DenseParams<T>, 2> conv;
  LstmParams<T> name_fwd, name_bwd;
  LstmParams<T> text_fwd, text_bwd;
  DenseParams<T> ff1, ff2;  // shared by both sides
  DenseParams<T> combine, out;
};

// Calls f(name, a.x, b.x, ...) for every array x, in serialization order.
template <typename F, typename P, typename... Ps>
void for_each_array(F&& f, P& p, Ps&... ps) {
  f("word_vectors", p.word_vectors, ps.word_vectors...);
  f("unk_vector", p.unk_vector, ps.unk_vector...);
  f("char_embed", p.char_embed, ps.char_embed...);
  f("char_cnn.w0", p.conv[0].w, ps.conv[0].w...);
  f("char_cnn.b0", p.conv[0].b, ps.conv[0].b...);
  f("char_cnn.w1", p.conv[1].w, ps.conv[1].w...);
  f("char_cnn.b1", p.conv[1].b, ps.conv[1].b...);
  f("name_lstm.fwd.wx", p.name_fwd.wx, ps.name_fwd.wx...);
  f("name_lstm.fwd.wh", p.name_fwd.wh, ps.name_fwd.wh...);
  f("name_lstm.fwd.b", p.name_fwd.b, ps.name_fwd.b...);
  f("name_lstm.bwd.wx", p.name_bwd.wx, ps.name_bwd.wx...);
  f("name_lstm.bwd.wh", p.name_bwd.wh, ps.name_bwd.wh...);
  f("name_lstm.bwd.b", p.name_bwd.b, ps.name_bwd.b...);
  f("text_lstm.fwd.wx", p.text_fwd.wx, ps.text_fwd.wx...);
  f("text_lstm.fwd.wh", p.text_fwd.wh, ps.text_fwd.wh...);
  f("text_lstm.fwd.b", p.text_fwd.b, ps.text_fwd.b...);
  f("text_lstm.bwd.wx", p.text_bwd.wx, ps.text_bwd.wx...);
  f("text_lstm.bwd.wh", p.text_bwd.wh, ps.text_bwd.wh...);
  f("text_lstm.bwd.b", p.text_bwd.b, ps.text_bwd.b...);
  f("ff1.w", p.ff1.w, ps.ff1.w...);
  f("ff1.b", p.ff1.b, ps.ff1.b...);
  f("ff2.w", p.ff2.w, ps.ff2.w...);
  f("ff2.b", p.ff2.b, ps.ff2.b...);
  f("combine.w", p.combine.w, ps.combine.w...);
  f("combine.b", p.combine.b, ps.combine.b...);
  f("out.w", p.out.w, ps.out.w...);
  f("out.b", p.out.b, ps.out.b...);
}

struct ArrayShape {
  Index rows = 0;
  Index cols = 0;
  bool operator==(const ArrayShape&) const = default;
};

// Expected shape of every array, keyed by the names used in for_each_array.
std::vector<std::pair<std::string, ArrayShape>> expected_shapes(const Dims& dims, int vocab_size, int char_vocab_size);

template <typename T>
ModelParams<T> zero_params(const Dims& d, int vocab_size, int char_vocab_size) {
  ModelParams<T> p;
  const auto shapes = expected_shapes(d, vocab_size, char_vocab_size);
  std::size_t i = 0;
  for_each_array(
      [&](std::string_view, auto& a) {
        const ArrayShape s = shapes[i++].second;
        if constexpr (std::decay_t<decltype(a)>::ColsAtCompileTime == 1) {
          a.setZero(s.rows);
        } else {
          a.setZero(s.rows, s.cols);
        }
      },
      p);
  return p;
}

// Same shapes as `like`, all zeros.
template <typename T>
ModelParams<T> zeros_like(const ModelParams<T>& like) {
  ModelParams<T> out;
  for_each_array([](std::string_view, auto& dst, const auto& src) { dst.setZero(src.rows(), src.cols()); }, out,
                 like);
  return out;
}

template <typename T>
void set_zero(ModelParams<T>& p) {
  for_each_array([](std::string_view, auto& a) { a.setZero(); }, p);
}

template <typename U, typename T>
ModelParams<U> cast_params(const ModelParams<T>& p) {
  ModelParams<U> out;
  for_each_array([](std::string_view, auto& dst, const auto& src) { dst = src.template cast<U>(); }, out, p);
  return out;
}

template <typename T>
bool all_finite(const ModelParams<T>& p) {
  bool ok = true;
  for_each_array([&](std::string_view, const auto& a) { ok = ok && a.allFinite(); }, p);
  return ok;
}

template <typename T>
bool bitwise_equal(const ModelParams<T>& a, const ModelParams<T>& b) {
  bool same = true;
  for_each_array(
      [&](std::string_view, const auto& x, const auto& y) {
        same = same && x.rows() == y.rows() && x.cols() == y.cols() &&
               std::equal(x.data(), x.data() + x.size(), y.data(),
                          [](T u, T v) { return std::memcmp(&u, &v, sizeof(T)) == 0; });
      },
      a, b);
  return same;
}

// Random initialization: Glorot-uniform matrices, zero biases (LSTM forget
// gates start at 1), small uniform char/unknown-word embeddings. Word vectors
// are left as given.
template <typename T>
void init_params(ModelParams<T>& p, const Dims& d, Rng& rng) {
  auto glorot = [&](Matrix<T>& m, Index fan_in, Index fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (Index j = 0; j < m.cols(); ++j) {
      for (Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<T>(rng.uniform(-limit, limit));
    }
  };
  auto uniform = [&](auto& m, double limit) {
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(rng.uniform(-limit, limit));
  };
  uniform(p.unk_vector, 0.1);
  uniform(p.char_embed, 0.1);
  for (std::size_t k = 0; k < p.conv.size(); ++k) {
    glorot(p.conv[k].w, p.conv[k].w.cols(), p.conv[k].w.rows());
    p.conv[k].b.setZero();
  }
  for (LstmParams<T>* l : {&p.name_fwd, &p.name_bwd, &p.text_fwd, &p.text_bwd}) {
    const Index h = l->wh.cols();
    glorot(l->wx, l->wx.cols(), h);
    glorot(l->wh, h, h);
    l->b.setZero();
    l->b.segment(h, h).setOnes();
  }
  for (DenseParams<T>* dense : {&p.ff1, &p.ff2, &p.combine, &p.out}) {
    glorot(dense->w, dense->w.cols(), dense->w.rows());
    dense->b.setZero();
  }
  (void)d;
}

}  // namespace ontomatch::nn
