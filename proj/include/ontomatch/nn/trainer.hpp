#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ontomatch/nn/network.hpp"
#include "ontomatch/string_features.hpp"

namespace ontomatch::nn {

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int max_epochs = 30;
  int patience = 5;  // epochs without dev F1 improvement before stopping
  std::uint64_t seed = 1;
  double dropout = 0.2;
  bool train_word_embeddings = false;
  // Gradients are summed over a fixed number of shards so results do not
  // depend on how many threads run them.
  int shards = 4;
  int threads = 0;  // 0: hardware concurrency
};

// Indices into the entity input array; features already zeroed if unused.
struct PairExample {
  std::uint32_t source = 0;
  std::uint32_t target = 0;
  int label = 0;
  Vector<float> features;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;  // mean over the epoch, with dropout
  double dev_f1 = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;
  double best_dev_f1 = 0.0;
  bool stopped_early = false;
};

// Mini-batch Adam on the mean BCE. After every epoch the dev set is scored at
// threshold 0.5; the parameters of the best-F1 epoch are returned (lowest
// training loss when the dev set is empty). Throws NumericError naming the
// batch when the loss becomes non-finite.
ModelParams<float> train_network(ModelParams<float> params, const Dims& dims, std::span<const EntityInput> entities,
                                 std::span<const PairExample> train, std::span<const PairExample> dev,
                                 const TrainConfig& config, TrainReport* report = nullptr);

// Inference probabilities (no dropout), encoding each entity once.
std::vector<float> predict_pairs(const ModelParams<float>& params, const Dims& dims,
                                 std::span<const EntityInput> entities, std::span<const PairExample> pairs);

// Classification F1 of the positive class at threshold 0.5.
double pair_f1(std::span<const float> probabilities, std::span<const PairExample> pairs);

}  // namespace ontomatch::nn
