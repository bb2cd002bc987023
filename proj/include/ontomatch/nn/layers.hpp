#pragma once

#include <span>
#include <vector>

#include "ontomatch/nn/params.hpp"

namespace ontomatch::nn {

// Controls stochastic layers. Dropout is active only when `train` is set and
// an rng is supplied.
struct ForwardContext {
  bool train = false;
  double dropout = 0.2;
  Rng* rng = nullptr;

  bool dropout_active() const { return train && rng != nullptr && dropout > 0.0; }
};

// Inverted-dropout mask: entries are 0 or 1/(1-p).
template <typename T>
Vector<T> dropout_mask(Index n, const ForwardContext& ctx) {
  if (!ctx.dropout_active()) return Vector<T>::Ones(n);
  Vector<T> m(n);
  const T keep_scale = static_cast<T>(1.0 / (1.0 - ctx.dropout));
  for (Index i = 0; i < n; ++i) m(i) = ctx.rng->bernoulli(ctx.dropout) ? T(0) : keep_scale;
  return m;
}

// ---------------------------------------------------------------------------
// LSTM

template <typename T>
struct LstmTape {
  Matrix<T> gates;       // 4H x n after activation
  Matrix<T> cells;       // H x (n+1); column 0 is the zero initial state
  Matrix<T> tanh_cells;  // H x n
  Matrix<T> hidden;      // H x (n+1); column 0 is the zero initial state
};

// Runs the LSTM over the columns of `x` and returns the final hidden state.
template <typename T>
Vector<T> lstm_forward(const LstmParams<T>& p, const Matrix<T>& x, LstmTape<T>& tape) {
  const Index h = p.wh.cols();
  const Index n = x.cols();
  Matrix<T> pre = p.wx * x;
  pre.colwise() += p.b;
  tape.gates.resize(4 * h, n);
  tape.cells.setZero(h, n + 1);
  tape.hidden.setZero(h, n + 1);
  tape.tanh_cells.resize(h, n);
  Vector<T> z(4 * h);
  for (Index t = 0; t < n; ++t) {
    z.noalias() = p.wh * tape.hidden.col(t);
    z += pre.col(t);
    auto g = tape.gates.col(t);
    g.segment(0, h) = sigmoid(z.segment(0, h));
    g.segment(h, h) = sigmoid(z.segment(h, h));
    g.segment(2 * h, h) = z.segment(2 * h, h).array().tanh().matrix();
    g.segment(3 * h, h) = sigmoid(z.segment(3 * h, h));
    tape.cells.col(t + 1) = g.segment(h, h).cwiseProduct(tape.cells.col(t)) +
                            g.segment(0, h).cwiseProduct(g.segment(2 * h, h));
    tape.tanh_cells.col(t) = tape.cells.col(t + 1).array().tanh().matrix();
    tape.hidden.col(t + 1) = g.segment(3 * h, h).cwiseProduct(tape.tanh_cells.col(t));
  }
  return tape.hidden.col(n);
}

// Backpropagates a gradient on the final hidden state. Parameter gradients
// are added to `grads`; `dx` is overwritten with the input gradient.
template <typename T>
void lstm_backward(const LstmParams<T>& p, const Matrix<T>& x, const LstmTape<T>& tape,
                   const Vector<T>& d_final, LstmParams<T>& grads, Matrix<T>& dx) {
  const Index h = p.wh.cols();
  const Index n = x.cols();
  Matrix<T> dz(4 * h, n);
  Vector<T> dh = d_final;
  Vector<T> dc = Vector<T>::Zero(h);
  for (Index t = n - 1; t >= 0; --t) {
    const auto g = tape.gates.col(t);
    const auto i = g.segment(0, h).array();
    const auto f = g.segment(h, h).array();
    const auto c = g.segment(2 * h, h).array();
    const auto o = g.segment(3 * h, h).array();
    const auto tc = tape.tanh_cells.col(t).array();
    dc.array() += dh.array() * o * (T(1) - tc * tc);
    auto col = dz.col(t);
    col.segment(0, h) = (dc.array() * c * i * (T(1) - i)).matrix();
    col.segment(h, h) = (dc.array() * tape.cells.col(t).array() * f * (T(1) - f)).matrix();
    col.segment(2 * h, h) = (dc.array() * i * (T(1) - c * c)).matrix();
    col.segment(3 * h, h) = (dh.array() * tc * o * (T(1) - o)).matrix();
    dh.noalias() = p.wh.transpose() * col;
    dc.array() *= f;
  }
  grads.wx.noalias() += dz * x.transpose();
  grads.wh.noalias() += dz * tape.hidden.leftCols(n).transpose();
  grads.b += dz.rowwise().sum();
  dx.noalias() = p.wx.transpose() * dz;
}

// ---------------------------------------------------------------------------
// Character CNN: per filter width, a convolution over the char embeddings,
// max-pooled over time, then ReLU.

template <typename T>
struct CharCnnTape {
  std::vector<int> chars;  // padded
  Matrix<T> embedded;      // char_dim x L
  std::array<Matrix<T>, 2> windows;
  std::array<std::vector<Index>, 2> argmax;
  Vector<T> pooled;  // before ReLU
};

template <typename T>
Vector<T> char_cnn_forward(const ModelParams<T>& p, const Dims& d, std::span<const int> chars,
                           CharCnnTape<T>& tape) {
  const Index cd = d.char_dim;
  const Index filters = d.filters_per_width;
  const std::size_t length = std::max<std::size_t>(chars.size(), static_cast<std::size_t>(d.min_char_length()));
  tape.chars.assign(chars.begin(), chars.end());
  tape.chars.resize(length, CharVocab::kPad);
  tape.embedded.resize(cd, static_cast<Index>(length));
  for (std::size_t l = 0; l < length; ++l) tape.embedded.col(static_cast<Index>(l)) = p.char_embed.col(tape.chars[l]);

  tape.pooled.resize(filters * 2);
  for (std::size_t k = 0; k < 2; ++k) {
    const Index width = d.filter_widths[k];
    const Index positions = static_cast<Index>(length) - width + 1;
    Matrix<T>& u = tape.windows[k];
    u.resize(cd * width, positions);
    // Columns are contiguous, so a window of `width` columns is a contiguous run.
    for (Index pos = 0; pos < positions; ++pos) {
      u.col(pos) = Eigen::Map<const Vector<T>>(tape.embedded.data() + pos * cd, cd * width);
    }
    Matrix<T> conv = p.conv[k].w * u;
    conv.colwise() += p.conv[k].b;
    tape.argmax[k].resize(static_cast<std::size_t>(filters));
    for (Index f = 0; f < filters; ++f) {
      Index arg = 0;
      tape.pooled(static_cast<Index>(k) * filters + f) = conv.row(f).maxCoeff(&arg);
      tape.argmax[k][static_cast<std::size_t>(f)] = arg;
    }
  }
  return relu(tape.pooled);
}

template <typename T>
void char_cnn_backward(const ModelParams<T>& p, const Dims& d, const CharCnnTape<T>& tape,
                       const Vector<T>& d_out, ModelParams<T>& grads) {
  const Index cd = d.char_dim;
  const Index filters = d.filters_per_width;
  Matrix<T> d_embedded = Matrix<T>::Zero(cd, tape.embedded.cols());
  for (std::size_t k = 0; k < 2; ++k) {
    const Index width = d.filter_widths[k];
    for (Index f = 0; f < filters; ++f) {
      const Index slot = static_cast<Index>(k) * filters + f;
      if (tape.pooled(slot) <= T(0)) continue;
      const T g = d_out(slot);
      if (g == T(0)) continue;
      const Index pos = tape.argmax[k][static_cast<std::size_t>(f)];
      grads.conv[k].w.row(f) += g * tape.windows[k].col(pos).transpose();
      grads.conv[k].b(f) += g;
      Eigen::Map<Vector<T>>(d_embedded.data() + pos * cd, cd * width) += g * p.conv[k].w.row(f).transpose();
    }
  }
  for (std::size_t l = 0; l < tape.chars.size(); ++l) {
    grads.char_embed.col(tape.chars[l]) += d_embedded.col(static_cast<Index>(l));
  }
}

}  // namespace ontomatch::nn
