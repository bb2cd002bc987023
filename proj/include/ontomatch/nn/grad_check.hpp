#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ontomatch/nn/network.hpp"

namespace ontomatch::nn {

struct GradCheckOptions {
  double eps = 1e-4;
  int coordinates = 20;  // uniform draws per array; as many again from nonzero gradients
  std::uint64_t seed = 7;
  // Called on the analytic gradient before comparison (negative controls).
  std::function<void(std::string_view array, Index coordinate, double& gradient)> corrupt;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_array;
  std::map<std::string, double> per_array;  // max error per array
  int checked = 0;
  int skipped_at_kinks = 0;
};

// Every discrete decision of a forward pass: ReLU and max-pool branches,
// the alias pair and whether the probability clamp is active. Finite
// differences are only meaningful when both probes keep this unchanged.
template <typename T>
std::vector<long> kink_signature(const PairTape<T>& tape) {
  std::vector<long> sig;
  auto signs = [&](const auto& v) {
    for (Index i = 0; i < v.size(); ++i) sig.push_back(v(i) > T(0));
  };
  auto seq = [&](const SeqTape<T>& s) {
    for (const CharCnnTape<T>& c : s.chars) {
      signs(c.pooled);
      for (const auto& am : c.argmax) sig.insert(sig.end(), am.begin(), am.end());
    }
  };
  for (const EntityTape<T>* e : {&tape.source, &tape.target}) {
    seq(e->name);
    for (const auto& a : e->aliases) seq(a);
  }
  sig.push_back(static_cast<long>(tape.alias.first));
  sig.push_back(static_cast<long>(tape.alias.second));
  for (const HeadTape<T>* h : {&tape.head_source, &tape.head_target}) {
    signs(h->z1);
    signs(h->z2);
  }
  signs(tape.z3);
  sig.push_back(clamp_probability(tape.probability) != tape.probability);
  return sig;
}

// Compares backward_pair against central differences of bce_loss for a
// sample of coordinates of every array. Dropout is off. Word vectors are
// treated as trainable here.
template <typename T>
GradCheckResult grad_check(const ModelParams<T>& params, const Dims& d, const EntityInput& source,
                           const EntityInput& target, const Vector<T>& features, int label,
                           const GradCheckOptions& options = {}) {
  const ForwardContext ctx;  // inference mode: no dropout
  PairTape<T> tape;
  forward_pair(params, d, source, target, features, ctx, tape);
  const std::vector<long> base = kink_signature(tape);
  ModelParams<T> grads = zeros_like(params);
  backward_pair(params, d, tape, label, grads);

  ModelParams<T> probe = params;
  const T eps = static_cast<T>(options.eps);
  auto loss_at = [&](T& slot, T value, std::vector<long>& sig) {
    const T saved = slot;
    slot = value;
    PairTape<T> t;
    const T p = forward_pair(probe, d, source, target, features, ctx, t);
    slot = saved;
    sig = kink_signature(t);
    return bce_loss(p, label);
  };

  GradCheckResult result;
  Rng rng(options.seed);
  for_each_array(
      [&](std::string_view name, auto& arr, const auto& g) {
        if (arr.size() == 0) return;
        std::set<Index> coords;
        for (int k = 0; k < options.coordinates; ++k) {
          coords.insert(static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(arr.size()))));
        }
        std::vector<Index> nonzero;
        for (Index i = 0; i < g.size(); ++i) {
          if (g.data()[i] != T(0)) nonzero.push_back(i);
        }
        for (int k = 0; k < options.coordinates && !nonzero.empty(); ++k) {
          coords.insert(nonzero[rng.uniform_index(nonzero.size())]);
        }
        double worst = 0.0;
        for (Index c : coords) {
          T& slot = arr.data()[c];
          std::vector<long> sig_plus, sig_minus;
          const T lp = loss_at(slot, slot + eps, sig_plus);
          const T lm = loss_at(slot, slot - eps, sig_minus);
          if (sig_plus != base || sig_minus != base) {
            ++result.skipped_at_kinks;
            continue;
          }
          const double numeric = static_cast<double>((lp - lm) / (T(2) * eps));
          double analytic = static_cast<double>(g.data()[c]);
          if (options.corrupt) options.corrupt(name, c, analytic);
          const double err = std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
          worst = std::max(worst, err);
          ++result.checked;
        }
        result.per_array[std::string(name)] = worst;
        if (worst >= result.max_relative_error) {
          result.max_relative_error = worst;
          result.worst_array = std::string(name);
        }
      },
      probe, grads);
  return result;
}

}  // namespace ontomatch::nn
