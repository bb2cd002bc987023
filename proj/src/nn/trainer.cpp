#include "ontomatch/nn/trainer.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "ontomatch/log.hpp"

namespace ontomatch::nn {
namespace {

struct Adam {
  ModelParams<float> m, v;
  long step = 0;
  double lr, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  Adam(const ModelParams<float>& grads_like, double learning_rate)
      : m(zeros_like(grads_like)), v(zeros_like(grads_like)), lr(learning_rate) {}

  void apply(ModelParams<float>& params, const ModelParams<float>& grads) {
    ++step;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    const float b1 = static_cast<float>(beta1);
    const float b2 = static_cast<float>(beta2);
    const float alpha = static_cast<float>(lr * std::sqrt(c2) / c1);
    const float eps_hat = static_cast<float>(eps * std::sqrt(c2));
    for_each_array(
        [&](std::string_view, auto& p, const auto& g, auto& mm, auto& vv) {
          if (g.size() == 0) return;  // frozen
          mm = b1 * mm + (1.0F - b1) * g;
          vv = b2 * vv + (1.0F - b2) * g.cwiseAbs2();
          p.array() -= alpha * mm.array() / (vv.array().sqrt() + eps_hat);
        },
        params, grads, m, v);
  }
};

ModelParams<float> gradient_buffer(const ModelParams<float>& params, bool train_words) {
  ModelParams<float> g = zeros_like(params);
  if (!train_words) g.word_vectors.resize(0, 0);
  return g;
}

void add_into(ModelParams<float>& acc, const ModelParams<float>& g) {
  for_each_array(
      [](std::string_view, auto& a, const auto& b) {
        if (a.size() > 0) a += b;
      },
      acc, g);
}

void scale(ModelParams<float>& g, float factor) {
  for_each_array([&](std::string_view, auto& a) { a *= factor; }, g);
}

double evaluate_dev(const ModelParams<float>& params, const Dims& dims, std::span<const EntityInput> entities,
                    std::span<const PairExample> dev) {
  const std::vector<float> probs = predict_pairs(params, dims, entities, dev);
  return pair_f1(probs, dev);
}

}  // namespace

double pair_f1(std::span<const float> probabilities, std::span<const PairExample> pairs) {
  std::size_t tp = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const bool yes = probabilities[i] >= 0.5F;
    predicted += yes;
    gold += pairs[i].label == 1;
    tp += yes && pairs[i].label == 1;
  }
  if (tp == 0) return 0.0;
  const double p = static_cast<double>(tp) / static_cast<double>(predicted);
  const double r = static_cast<double>(tp) / static_cast<double>(gold);
  return 2.0 * p * r / (p + r);
}

std::vector<float> predict_pairs(const ModelParams<float>& params, const Dims& dims,
                                 std::span<const EntityInput> entities, std::span<const PairExample> pairs) {
  std::vector<std::optional<EntityEncoding<float>>> cache(entities.size());
  auto encoding = [&](std::uint32_t i) -> const EntityEncoding<float>& {
    if (!cache[i]) cache[i] = encode_entity(params, dims, entities[i]);
    return *cache[i];
  };
  std::vector<float> out;
  out.reserve(pairs.size());
  PairTape<float> tape;
  for (const PairExample& ex : pairs) {
    const auto& es = encoding(ex.source);
    const auto& et = encoding(ex.target);
    const auto [vs, vt] = embed_entity_pair(es, et);
    out.push_back(score(params, dims, vs, vt, ex.features, ForwardContext{}, tape));
  }
  return out;
}

ModelParams<float> train_network(ModelParams<float> params, const Dims& dims, std::span<const EntityInput> entities,
                                 std::span<const PairExample> train, std::span<const PairExample> dev,
                                 const TrainConfig& config, TrainReport* report) {
  if (train.empty()) throw ValidationError("train_network: empty training set");
  if (config.learning_rate <= 0 || config.batch_size < 1 || config.max_epochs < 1 || config.patience < 1 ||
      config.shards < 1) {
    throw ValidationError("train_network: learning rate, batch size, epochs, patience and shards must be positive");
  }
  for (const PairExample& ex : train) {
    if (ex.source >= entities.size() || ex.target >= entities.size()) {
      throw ValidationError("train_network: example references an unknown entity");
    }
  }
  const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  const int threads = std::min(config.shards, config.threads > 0 ? config.threads : static_cast<int>(hw));

  Adam adam(gradient_buffer(params, config.train_word_embeddings), config.learning_rate);
  std::vector<ModelParams<float>> shard_grads;
  for (int s = 0; s < config.shards; ++s) shard_grads.push_back(gradient_buffer(params, config.train_word_embeddings));
  std::vector<double> shard_loss(static_cast<std::size_t>(config.shards));

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(mix_seed(config.seed, 0x5348554646ULL));

  TrainReport local;
  ModelParams<float> best = params;
  double best_f1 = -1.0;
  double best_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    const std::size_t batch = static_cast<std::size_t>(config.batch_size);
    for (std::size_t start = 0, b = 0; start < order.size(); start += batch, ++b) {
      const std::size_t end = std::min(order.size(), start + batch);
      const std::size_t count = end - start;
      auto run_shard = [&](int s) {
        ModelParams<float>& g = shard_grads[static_cast<std::size_t>(s)];
        set_zero(g);
        double loss = 0.0;
        const std::size_t lo = start + count * static_cast<std::size_t>(s) / static_cast<std::size_t>(config.shards);
        const std::size_t hi =
            start + count * static_cast<std::size_t>(s + 1) / static_cast<std::size_t>(config.shards);
        PairTape<float> tape;
        for (std::size_t k = lo; k < hi; ++k) {
          const PairExample& ex = train[order[k]];
          Rng rng(mix_seed(mix_seed(config.seed, static_cast<std::uint64_t>(epoch)), k));
          const ForwardContext ctx{true, config.dropout, &rng};
          const float p = forward_pair(params, dims, entities[ex.source], entities[ex.target], ex.features, ctx, tape);
          loss += bce_loss(p, ex.label);
          backward_pair(params, dims, tape, ex.label, g);
        }
        shard_loss[static_cast<std::size_t>(s)] = loss;
      };
      if (threads <= 1) {
        for (int s = 0; s < config.shards; ++s) run_shard(s);
      } else {
        for (int s0 = 0; s0 < config.shards; s0 += threads) {
          std::vector<std::jthread> pool;
          for (int s = s0; s < std::min(config.shards, s0 + threads); ++s) pool.emplace_back(run_shard, s);
        }
      }
      ModelParams<float>& total = shard_grads[0];
      double batch_loss = shard_loss[0];
      for (int s = 1; s < config.shards; ++s) {
        add_into(total, shard_grads[static_cast<std::size_t>(s)]);
        batch_loss += shard_loss[static_cast<std::size_t>(s)];
      }
      if (!std::isfinite(batch_loss)) {
        std::ostringstream msg;
        msg << "non-finite training loss in epoch " << epoch << ", batch " << b << " (examples " << start << ".."
            << end - 1 << ")";
        throw NumericError(msg.str());
      }
      scale(total, 1.0F / static_cast<float>(count));
      adam.apply(params, total);
      epoch_loss += batch_loss;
    }
    if (!all_finite(params)) throw NumericError("non-finite parameters after epoch " + std::to_string(epoch));

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / static_cast<double>(order.size());
    bool improved = false;
    if (dev.empty()) {
      improved = stats.train_loss < best_loss;
    } else {
      stats.dev_f1 = evaluate_dev(params, dims, entities, dev);
      improved = stats.dev_f1 > best_f1;
    }
    local.epochs.push_back(stats);
    {
      std::ostringstream msg;
      msg << "epoch " << epoch << " loss " << stats.train_loss << " dev_f1 " << stats.dev_f1;
      log_info(msg.str());
    }
    if (improved) {
      best = params;
      best_f1 = stats.dev_f1;
      best_loss = stats.train_loss;
      local.best_epoch = epoch;
      local.best_dev_f1 = stats.dev_f1;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      local.stopped_early = epoch < config.max_epochs;
      break;
    }
  }
  if (report) *report = std::move(local);
  return best;
}

}  // namespace ontomatch::nn
