#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ontomatch/candidate_index.hpp"
#include "ontomatch/dataset.hpp"
#include "ontomatch/enrichment.hpp"
#include "ontomatch/kb.hpp"
#include "ontomatch/lr_baseline.hpp"
#include "ontomatch/nn/embeddings.hpp"
#include "ontomatch/nn/model.hpp"
#include "ontomatch/nn/trainer.hpp"
#include "ontomatch/string_features.hpp"

namespace ontomatch {

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
};

// Harmonic mean; 0 when p + r == 0.
double f1_score(double precision, double recall);

// Distinct predicted (source, target) pairs against the label-1 reference pairs.
Metrics evaluate(std::span<const Alignment> predicted, const ReferenceAlignment& reference);
std::string metrics_to_json(const Metrics& m);

struct PrepassResult {
  std::vector<Alignment> alignments;  // score 1.0, exact_match provenance
  std::vector<std::string> remaining_sources;
  std::set<std::string> matched_targets;
};

// Aligns every pair whose lowercased name/alias sets intersect. Not one-to-one.
PrepassResult exact_match_prepass(const Ontology& source, const Ontology& target);

// Scores candidate pairs by ontology position. `prepare` is called once per
// align run before any `score` call; `score` must then be safe to call
// concurrently.
class PairScorer {
 public:
  virtual ~PairScorer() = default;
  virtual void prepare(const Ontology& source, const Ontology& target) = 0;
  virtual double score(std::size_t source, std::size_t target, const FeatureVector& features) const = 0;
  virtual bool uses_features() const { return true; }
};

class LrScorer : public PairScorer {
 public:
  explicit LrScorer(LrModel model) : model_(std::move(model)) {}
  void prepare(const Ontology&, const Ontology&) override {}
  double score(std::size_t, std::size_t, const FeatureVector& features) const override;

 private:
  LrModel model_;
};

// Encodes every entity of both ontologies once, then scores pairs with the
// siamese head.
class NnScorer : public PairScorer {
 public:
  explicit NnScorer(nn::NnModel model, int threads = 0) : model_(std::move(model)), threads_(threads) {}
  void prepare(const Ontology& source, const Ontology& target) override;
  double score(std::size_t source, std::size_t target, const FeatureVector& features) const override;
  bool uses_features() const override { return model_.use_features; }
  const nn::NnModel& model() const { return model_; }

 private:
  nn::NnModel model_;
  int threads_;
  std::vector<nn::EntityEncoding<float>> source_, target_;
};

// Loads either model kind, telling them apart by the archive magic.
std::unique_ptr<PairScorer> load_scorer(const std::string& path, int threads = 0);

enum class ModelKind { kLr, kNn };

struct AlignConfig {
  std::size_t k = CandidateIndex::kDefaultK;
  double threshold = 0.5;  // in (0, 1]
  bool one_to_one = true;
  bool use_features = true;
  bool use_external_defs = false;
  bool use_contexts = false;
  int threads = 0;  // 0: hardware concurrency
};

// Pre-pass, candidate selection, scoring, thresholding and (optionally)
// greedy one-to-one matching. Output is sorted like write_alignment.
std::vector<Alignment> align(const Ontology& source, const Ontology& target, PairScorer& scorer,
                             const AlignConfig& config);

// Applies the variant toggles to an ontology. Without external definitions,
// definitions marked external are dropped and, when a fetcher is given and
// the toggle is on, missing ones are filled. Without contexts every context
// is dropped; with them, a corpus (if given) replaces the contexts.
struct VariantOptions {
  bool use_external_defs = false;
  bool use_contexts = false;
  std::uint64_t context_seed = 0;
};
Ontology prepare_ontology(const Ontology& ontology, const VariantOptions& options, DefinitionFetcher* fetcher,
                          const ContextCorpus* corpus, EnrichmentReport* report = nullptr);

// Features for labeled examples, resolved against the two ontologies.
std::vector<FeatureVector> example_features(std::span<const LabeledExample> examples, const Ontology& source,
                                            const Ontology& target);

LrModel train_lr_model(std::span<const LabeledExample> train, const Ontology& source, const Ontology& target,
                       const LrTrainConfig& config = {}, LrTrainReport* report = nullptr);

struct NnTrainOptions {
  nn::Dims dims;
  nn::TrainConfig train;
  bool use_features = true;
};

// Vocabulary and initial word vectors come from `embeddings` when given;
// otherwise from the ontologies' tokens with small random vectors.
nn::NnModel train_nn_model(std::span<const LabeledExample> train, std::span<const LabeledExample> dev,
                           const Ontology& source, const Ontology& target, const nn::Embeddings* embeddings,
                           const NnTrainOptions& options, nn::TrainReport* report = nullptr);

// Runs f(i) for i in [0, n) on up to `threads` workers (0: hardware
// concurrency). Each index is processed exactly once.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

}  // namespace ontomatch
