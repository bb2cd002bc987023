#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "ontomatch/enrichment.hpp"
#include "ontomatch/errors.hpp"
#include "ontomatch/kb.hpp"
#include "ontomatch/nn/layers.hpp"
#include "ontomatch/nn/params.hpp"

namespace ontomatch::nn {

inline constexpr double kProbabilityClamp = 1e-7;

struct NameToken {
  int word = -1;  // -1: out of vocabulary, uses the unknown vector
  std::vector<int> chars;
  bool operator==(const NameToken&) const = default;
};
using NameSeq = std::vector<NameToken>;
using TextSeq = std::vector<int>;

// Token ids of every attribute the network reads. `aliases` is never empty:
// an entity without aliases uses its name tokens. An empty `definition`
// means the attribute is missing.
struct EntityInput {
  NameSeq name;
  std::vector<NameSeq> aliases;
  TextSeq definition;
  std::vector<TextSeq> contexts;
};

NameSeq make_name_seq(std::string_view text, const Vocab& vocab, const CharVocab& chars);
TextSeq make_text_seq(std::string_view text, const Vocab& vocab);
// Contexts beyond `max_contexts` are ignored; texts without tokens are dropped.
EntityInput make_entity_input(const Entity& entity, const Vocab& vocab, const CharVocab& chars,
                              std::size_t max_contexts = kMaxContexts);

// ---------------------------------------------------------------------------
// Sequence encoders

template <typename T>
struct SeqTape {
  std::vector<int> words;
  std::vector<CharCnnTape<T>> chars;  // empty for text sequences
  Matrix<T> input;                    // after dropout
  Matrix<T> mask;                     // empty when dropout was off
  LstmTape<T> fwd, bwd;
};

namespace detail {

template <typename T>
const Vector<T>& word_vector(const ModelParams<T>& p, int word, Vector<T>& scratch) {
  if (word < 0) return p.unk_vector;
  scratch = p.word_vectors.col(word);
  return scratch;
}

template <typename T>
Vector<T> bilstm(const LstmParams<T>& fwd, const LstmParams<T>& bwd, SeqTape<T>& tape, const ForwardContext& ctx) {
  if (ctx.dropout_active()) {
    tape.mask.resize(tape.input.rows(), tape.input.cols());
    for (Index j = 0; j < tape.input.cols(); ++j) tape.mask.col(j) = dropout_mask<T>(tape.input.rows(), ctx);
    tape.input.array() *= tape.mask.array();
  } else {
    tape.mask.resize(0, 0);
  }
  const Index h = fwd.wh.cols();
  Vector<T> out(2 * h);
  out.head(h) = lstm_forward(fwd, tape.input, tape.fwd);
  const Matrix<T> reversed = tape.input.rowwise().reverse();
  out.tail(h) = lstm_forward(bwd, reversed, tape.bwd);
  return out;
}

template <typename T>
Matrix<T> bilstm_backward(const LstmParams<T>& fwd, const LstmParams<T>& bwd, const SeqTape<T>& tape,
                          const Vector<T>& d_out, LstmParams<T>& g_fwd, LstmParams<T>& g_bwd) {
  const Index h = fwd.wh.cols();
  Matrix<T> dx;
  Matrix<T> dx_rev;
  lstm_backward(fwd, tape.input, tape.fwd, Vector<T>(d_out.head(h)), g_fwd, dx);
  const Matrix<T> reversed = tape.input.rowwise().reverse();
  lstm_backward(bwd, reversed, tape.bwd, Vector<T>(d_out.tail(h)), g_bwd, dx_rev);
  dx += dx_rev.rowwise().reverse();
  if (tape.mask.size() > 0) dx.array() *= tape.mask.array();
  return dx;
}

template <typename T>
void word_backward(const Matrix<T>& dx, const SeqTape<T>& tape, Index word_dim, ModelParams<T>& grads) {
  const bool train_words = grads.word_vectors.size() > 0;
  for (std::size_t t = 0; t < tape.words.size(); ++t) {
    const auto g = dx.col(static_cast<Index>(t)).head(word_dim);
    if (tape.words[t] < 0) {
      grads.unk_vector += g;
    } else if (train_words) {
      grads.word_vectors.col(tape.words[t]) += g;
    }
  }
}

}  // namespace detail

// Word vector plus char-CNN features per token, through the name biLSTM.
// Returns the final forward state followed by the final backward state.
template <typename T>
Vector<T> encode_name(const ModelParams<T>& p, const Dims& d, const NameSeq& seq, const ForwardContext& ctx,
                      SeqTape<T>& tape) {
  if (seq.empty()) throw ValidationError("encode_name: empty token list");
  const Index n = static_cast<Index>(seq.size());
  tape.words.resize(seq.size());
  tape.chars.resize(seq.size());
  tape.input.resize(d.name_input(), n);
  Vector<T> scratch;
  for (Index t = 0; t < n; ++t) {
    const NameToken& tok = seq[static_cast<std::size_t>(t)];
    tape.words[static_cast<std::size_t>(t)] = tok.word;
    tape.input.col(t).head(d.word_dim) = detail::word_vector(p, tok.word, scratch);
    tape.input.col(t).tail(d.char_features()) =
        char_cnn_forward(p, d, std::span<const int>(tok.chars), tape.chars[static_cast<std::size_t>(t)]);
  }
  return detail::bilstm(p.name_fwd, p.name_bwd, tape, ctx);
}

template <typename T>
Vector<T> encode_text(const ModelParams<T>& p, const Dims& d, const TextSeq& seq, const ForwardContext& ctx,
                      SeqTape<T>& tape) {
  if (seq.empty()) throw ValidationError("encode_text: empty token list");
  const Index n = static_cast<Index>(seq.size());
  tape.words = seq;
  tape.chars.clear();
  tape.input.resize(d.word_dim, n);
  Vector<T> scratch;
  for (Index t = 0; t < n; ++t) tape.input.col(t) = detail::word_vector(p, seq[static_cast<std::size_t>(t)], scratch);
  return detail::bilstm(p.text_fwd, p.text_bwd, tape, ctx);
}

template <typename T>
void encode_name_backward(const ModelParams<T>& p, const Dims& d, const SeqTape<T>& tape,
                          const Vector<T>& d_out, ModelParams<T>& grads) {
  const Matrix<T> dx = detail::bilstm_backward(p.name_fwd, p.name_bwd, tape, d_out, grads.name_fwd, grads.name_bwd);
  detail::word_backward(dx, tape, d.word_dim, grads);
  for (std::size_t t = 0; t < tape.chars.size(); ++t) {
    char_cnn_backward(p, d, tape.chars[t], Vector<T>(dx.col(static_cast<Index>(t)).tail(d.char_features())), grads);
  }
}

template <typename T>
void encode_text_backward(const ModelParams<T>& p, const Dims& d, const SeqTape<T>& tape,
                          const Vector<T>& d_out, ModelParams<T>& grads) {
  const Matrix<T> dx = detail::bilstm_backward(p.text_fwd, p.text_bwd, tape, d_out, grads.text_fwd, grads.text_bwd);
  detail::word_backward(dx, tape, d.word_dim, grads);
}

// Mean of encode_text over the contexts; the zero vector when there are none.
template <typename T>
Vector<T> encode_contexts(const ModelParams<T>& p, const Dims& d, const std::vector<TextSeq>& contexts,
                          const ForwardContext& ctx, std::vector<SeqTape<T>>& tapes) {
  Vector<T> sum = Vector<T>::Zero(d.text_output());
  tapes.resize(contexts.size());
  for (std::size_t i = 0; i < contexts.size(); ++i) sum += encode_text(p, d, contexts[i], ctx, tapes[i]);
  if (!contexts.empty()) sum /= static_cast<T>(contexts.size());
  return sum;
}

// ---------------------------------------------------------------------------
// Entity embeddings

template <typename T>
struct EntityEncoding {
  Vector<T> name;
  std::vector<Vector<T>> aliases;
  Vector<T> definition;
  Vector<T> contexts;
};

template <typename T>
struct EntityTape {
  SeqTape<T> name;
  std::vector<SeqTape<T>> aliases;
  bool has_definition = false;
  SeqTape<T> definition;
  std::vector<SeqTape<T>> contexts;
};

// Encodes every attribute once. Aliases share the name encoder.
template <typename T>
EntityEncoding<T> encode_entity(const ModelParams<T>& p, const Dims& d, const EntityInput& in,
                                const ForwardContext& ctx, EntityTape<T>& tape) {
  if (in.aliases.empty()) throw ValidationError("encode_entity: entity input without aliases");
  EntityEncoding<T> enc;
  enc.name = encode_name(p, d, in.name, ctx, tape.name);
  tape.aliases.resize(in.aliases.size());
  enc.aliases.reserve(in.aliases.size());
  for (std::size_t i = 0; i < in.aliases.size(); ++i) {
    enc.aliases.push_back(encode_name(p, d, in.aliases[i], ctx, tape.aliases[i]));
  }
  tape.has_definition = !in.definition.empty();
  enc.definition = tape.has_definition ? encode_text(p, d, in.definition, ctx, tape.definition)
                                       : Vector<T>::Zero(d.text_output());
  enc.contexts = encode_contexts(p, d, in.contexts, ctx, tape.contexts);
  return enc;
}

template <typename T>
EntityEncoding<T> encode_entity(const ModelParams<T>& p, const Dims& d, const EntityInput& in,
                                const ForwardContext& ctx = {}) {
  EntityTape<T> tape;
  return encode_entity(p, d, in, ctx, tape);
}

// Indices (i, j) minimizing the Euclidean distance between source alias i and
// target alias j; the first pair in row-major order wins ties.
template <typename T>
std::pair<std::size_t, std::size_t> select_alias_pair(const std::vector<Vector<T>>& source,
                                                      const std::vector<Vector<T>>& target) {
  if (source.empty() || target.empty()) throw ValidationError("select_alias_pair: empty alias list");
  std::pair<std::size_t, std::size_t> best{0, 0};
  T best_distance = std::numeric_limits<T>::infinity();
  for (std::size_t i = 0; i < source.size(); ++i) {
    for (std::size_t j = 0; j < target.size(); ++j) {
      const T dist = (source[i] - target[j]).squaredNorm();
      if (dist < best_distance) {
        best_distance = dist;
        best = {i, j};
      }
    }
  }
  return best;
}

// [name; alias; definition; contexts]
template <typename T>
Vector<T> entity_vector(const EntityEncoding<T>& enc, std::size_t alias) {
  const Index n = enc.name.size();
  const Index t = enc.definition.size();
  Vector<T> v(2 * n + 2 * t);
  v << enc.name, enc.aliases.at(alias), enc.definition, enc.contexts;
  return v;
}

template <typename T>
std::pair<Vector<T>, Vector<T>> embed_entity_pair(const EntityEncoding<T>& source, const EntityEncoding<T>& target) {
  const auto [i, j] = select_alias_pair(source.aliases, target.aliases);
  return {entity_vector(source, i), entity_vector(target, j)};
}

// ---------------------------------------------------------------------------
// Siamese head

template <typename T>
struct HeadTape {
  Vector<T> input;
  Vector<T> z1, m1, a1;
  Vector<T> z2, m2, a2;
};

// ReLU(ff2(ReLU(ff1(v)))) with dropout after each ReLU. ff1 and ff2 are the
// same arrays for both sides of a pair.
template <typename T>
Vector<T> subnetwork(const ModelParams<T>& p, const Vector<T>& v, const ForwardContext& ctx, HeadTape<T>& tape) {
  tape.input = v;
  tape.z1 = p.ff1.w * v + p.ff1.b;
  tape.m1 = dropout_mask<T>(tape.z1.size(), ctx);
  tape.a1 = relu(tape.z1).cwiseProduct(tape.m1);
  tape.z2 = p.ff2.w * tape.a1 + p.ff2.b;
  tape.m2 = dropout_mask<T>(tape.z2.size(), ctx);
  tape.a2 = relu(tape.z2).cwiseProduct(tape.m2);
  return tape.a2;
}

template <typename T>
Vector<T> subnetwork_backward(const ModelParams<T>& p, const HeadTape<T>& tape, const Vector<T>& d_out,
                              ModelParams<T>& grads) {
  const Vector<T> dz2 = d_out.cwiseProduct(tape.m2).cwiseProduct(relu_mask(tape.z2));
  grads.ff2.w.noalias() += dz2 * tape.a1.transpose();
  grads.ff2.b += dz2;
  const Vector<T> dz1 = (p.ff2.w.transpose() * dz2).cwiseProduct(tape.m1).cwiseProduct(relu_mask(tape.z1));
  grads.ff1.w.noalias() += dz1 * tape.input.transpose();
  grads.ff1.b += dz1;
  return p.ff1.w.transpose() * dz1;
}

template <typename T>
struct PairTape {
  EntityTape<T> source, target;
  std::pair<std::size_t, std::size_t> alias{0, 0};
  HeadTape<T> head_source, head_target;
  Vector<T> combined;  // [h_s; h_t; features]
  Vector<T> z3, m3, a3;
  T logit = T(0);
  T probability = T(0.5);
};

// Match probability for two entity vectors and the 32 pair features.
template <typename T>
T score(const ModelParams<T>& p, const Dims& d, const Vector<T>& v_source, const Vector<T>& v_target,
        const Vector<T>& features, const ForwardContext& ctx, PairTape<T>& tape) {
  if (v_source.size() != d.entity_dim() || v_target.size() != d.entity_dim()) {
    throw ValidationError("score: entity vector has the wrong dimension");
  }
  if (features.size() != d.n_features) throw ValidationError("score: feature vector has the wrong dimension");
  const Vector<T> hs = subnetwork(p, v_source, ctx, tape.head_source);
  const Vector<T> ht = subnetwork(p, v_target, ctx, tape.head_target);
  tape.combined.resize(d.combine_input());
  tape.combined << hs, ht, features;
  tape.z3 = p.combine.w * tape.combined + p.combine.b;
  tape.m3 = dropout_mask<T>(tape.z3.size(), ctx);
  tape.a3 = relu(tape.z3).cwiseProduct(tape.m3);
  tape.logit = p.out.w.row(0).dot(tape.a3) + p.out.b(0);
  tape.probability = sigmoid(tape.logit);
  return tape.probability;
}

template <typename T>
T score(const ModelParams<T>& p, const Dims& d, const Vector<T>& v_source, const Vector<T>& v_target,
        const Vector<T>& features, const ForwardContext& ctx = {}) {
  PairTape<T> tape;
  return score(p, d, v_source, v_target, features, ctx, tape);
}

template <typename T>
T clamp_probability(T p) {
  const T eps = static_cast<T>(kProbabilityClamp);
  return std::clamp(p, eps, T(1) - eps);
}

// Binary cross entropy with the probability clamped to [1e-7, 1 - 1e-7].
template <typename T>
T bce_loss(T p, int label) {
  using std::log;
  const T q = clamp_probability(p);
  return label == 1 ? -log(q) : -log(T(1) - q);
}

// Full forward pass for one labeled pair, recording everything backward needs.
template <typename T>
T forward_pair(const ModelParams<T>& p, const Dims& d, const EntityInput& source, const EntityInput& target,
               const Vector<T>& features, const ForwardContext& ctx, PairTape<T>& tape) {
  const EntityEncoding<T> es = encode_entity(p, d, source, ctx, tape.source);
  const EntityEncoding<T> et = encode_entity(p, d, target, ctx, tape.target);
  tape.alias = select_alias_pair(es.aliases, et.aliases);
  return score(p, d, entity_vector(es, tape.alias.first), entity_vector(et, tape.alias.second), features, ctx,
               tape);
}

namespace detail {

template <typename T>
void entity_backward(const ModelParams<T>& p, const Dims& d, const EntityTape<T>& tape, std::size_t alias,
                     const Vector<T>& dv, ModelParams<T>& grads) {
  const Index n = d.name_output();
  const Index t = d.text_output();
  encode_name_backward(p, d, tape.name, Vector<T>(dv.segment(0, n)), grads);
  encode_name_backward(p, d, tape.aliases.at(alias), Vector<T>(dv.segment(n, n)), grads);
  if (tape.has_definition) encode_text_backward(p, d, tape.definition, Vector<T>(dv.segment(2 * n, t)), grads);
  if (!tape.contexts.empty()) {
    const Vector<T> dc = dv.segment(2 * n + t, t) / static_cast<T>(tape.contexts.size());
    for (const SeqTape<T>& c : tape.contexts) encode_text_backward(p, d, c, dc, grads);
  }
}

}  // namespace detail

// d loss / d logit for the clamped BCE: p - y inside the clamp, 0 outside.
template <typename T>
T bce_logit_gradient(T p, int label) {
  if (clamp_probability(p) != p) return T(0);
  return p - static_cast<T>(label);
}

// Adds d bce_loss / d params for the pair recorded in `tape` to `grads`.
template <typename T>
void backward_pair(const ModelParams<T>& p, const Dims& d, const PairTape<T>& tape, int label,
                   ModelParams<T>& grads) {
  const T dlogit = bce_logit_gradient(tape.probability, label);
  if (dlogit == T(0)) return;
  grads.out.w.row(0) += dlogit * tape.a3.transpose();
  grads.out.b(0) += dlogit;
  const Vector<T> dz3 = (p.out.w.row(0).transpose() * dlogit).cwiseProduct(tape.m3).cwiseProduct(relu_mask(tape.z3));
  grads.combine.w.noalias() += dz3 * tape.combined.transpose();
  grads.combine.b += dz3;
  const Vector<T> dcombined = p.combine.w.transpose() * dz3;
  const Index h = d.ff2;
  const Vector<T> dvs = subnetwork_backward(p, tape.head_source, Vector<T>(dcombined.segment(0, h)), grads);
  const Vector<T> dvt = subnetwork_backward(p, tape.head_target, Vector<T>(dcombined.segment(h, h)), grads);
  detail::entity_backward(p, d, tape.source, tape.alias.first, dvs, grads);
  detail::entity_backward(p, d, tape.target, tape.alias.second, dvt, grads);
}

}  // namespace ontomatch::nn
