#include "ontomatch/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "ontomatch/errors.hpp"
#include "ontomatch/log.hpp"
#include "ontomatch/unicode.hpp"

namespace ontomatch {
namespace {

std::set<std::string> surface_forms(const Entity& e) {
  std::set<std::string> out;
  out.insert(unicode::to_lower(e.name));
  for (const auto& a : e.aliases) out.insert(unicode::to_lower(a));
  return out;
}

double clamp_score(double p) {
  return std::clamp(p, nn::kProbabilityClamp, 1.0 - nn::kProbabilityClamp);
}

}  // namespace

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f) {
  const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  const std::size_t workers =
      std::min<std::size_t>(n, threads > 0 ? static_cast<std::size_t>(threads) : static_cast<std::size_t>(hw));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            f(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

Metrics evaluate(std::span<const Alignment> predicted, const ReferenceAlignment& reference) {
  std::set<IdPair> pred;
  for (const Alignment& a : predicted) pred.emplace(a.source_id, a.target_id);
  const std::set<IdPair> gold = reference.positives();
  Metrics m;
  m.predicted = pred.size();
  m.gold = gold.size();
  for (const IdPair& p : pred) m.true_positives += gold.count(p);
  m.precision = m.predicted ? static_cast<double>(m.true_positives) / static_cast<double>(m.predicted) : 0.0;
  m.recall = m.gold ? static_cast<double>(m.true_positives) / static_cast<double>(m.gold) : 0.0;
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

std::string metrics_to_json(const Metrics& m) {
  const nlohmann::json j = {{"precision", m.precision},   {"recall", m.recall},     {"f1", m.f1},
                            {"true_positives", m.true_positives}, {"predicted", m.predicted}, {"gold", m.gold}};
  return j.dump();
}

PrepassResult exact_match_prepass(const Ontology& source, const Ontology& target) {
  std::map<std::string, std::vector<std::size_t>> by_form;
  for (std::size_t t = 0; t < target.size(); ++t) {
    for (const auto& form : surface_forms(target[t])) by_form[form].push_back(t);
  }
  PrepassResult out;
  for (const Entity& s : source) {
    std::set<std::size_t> hits;
    for (const auto& form : surface_forms(s)) {
      const auto it = by_form.find(form);
      if (it != by_form.end()) hits.insert(it->second.begin(), it->second.end());
    }
    if (hits.empty()) {
      out.remaining_sources.push_back(s.id);
      continue;
    }
    for (std::size_t t : hits) {
      out.alignments.push_back({s.id, target[t].id, 1.0, Provenance::kExactMatch});
      out.matched_targets.insert(target[t].id);
    }
  }
  return out;
}

double LrScorer::score(std::size_t, std::size_t, const FeatureVector& features) const {
  return clamp_score(predict_lr(model_, features));
}

void NnScorer::prepare(const Ontology& source, const Ontology& target) {
  auto encode_all = [&](const Ontology& o, std::vector<nn::EntityEncoding<float>>& out) {
    out.assign(o.size(), {});
    parallel_for(o.size(), threads_, [&](std::size_t i) {
      const nn::EntityInput in = nn::make_entity_input(o[i], model_.vocab, model_.chars);
      out[i] = nn::encode_entity(model_.params, model_.dims, in);
    });
  };
  encode_all(source, source_);
  encode_all(target, target_);
}

double NnScorer::score(std::size_t source, std::size_t target, const FeatureVector& features) const {
  const auto [vs, vt] = nn::embed_entity_pair(source_.at(source), target_.at(target));
  nn::Vector<float> f = model_.use_features ? nn::Vector<float>(features.cast<float>())
                                            : nn::Vector<float>::Zero(kFeatureCount);
  return clamp_score(static_cast<double>(nn::score(model_.params, model_.dims, vs, vt, f)));
}

std::unique_ptr<PairScorer> load_scorer(const std::string& path, int threads) {
  if (nn::is_nn_model_file(path)) return std::make_unique<NnScorer>(nn::load_nn_model(path), threads);
  return std::make_unique<LrScorer>(load_lr(path));
}

std::vector<Alignment> align(const Ontology& source, const Ontology& target, PairScorer& scorer,
                             const AlignConfig& config) {
  if (!(config.threshold > 0.0 && config.threshold <= 1.0)) {
    throw ValidationError("threshold must be in (0, 1]");
  }
  if (config.k < 1) throw ValidationError("k must be at least 1");
  PrepassResult pre = exact_match_prepass(source, target);
  std::vector<Alignment> out = std::move(pre.alignments);
  if (pre.remaining_sources.empty() || target.empty()) {
    sort_alignments(out);
    return out;
  }
  scorer.prepare(source, target);
  const CandidateIndex index(target);
  const bool exclude = config.one_to_one;
  const std::size_t fetch = config.k + (exclude ? pre.matched_targets.size() : 0);

  std::vector<std::vector<Alignment>> per_source(pre.remaining_sources.size());
  parallel_for(pre.remaining_sources.size(), config.threads, [&](std::size_t i) {
    const std::size_t s = source.index_of(pre.remaining_sources[i]);
    const CandidateList list = index.select(source[s], fetch);
    std::size_t used = 0;
    for (const Candidate& c : list.candidates) {
      if (exclude && pre.matched_targets.count(c.target_id)) continue;
      if (used++ == config.k) break;
      FeatureVector f = compute_features(source[s], target[c.target]);
      if (!config.use_features || !scorer.uses_features()) f.setZero();
      const double p = scorer.score(s, c.target, f);
      if (p >= config.threshold) per_source[i].push_back({source[s].id, c.target_id, p, Provenance::kModel});
    }
  });

  std::vector<Alignment> model;
  for (auto& v : per_source) model.insert(model.end(), v.begin(), v.end());
  if (config.one_to_one) {
    std::sort(model.begin(), model.end(), [](const Alignment& a, const Alignment& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.source_id != b.source_id) return a.source_id < b.source_id;
      return a.target_id < b.target_id;
    });
    std::set<std::string> used_sources, used_targets;
    for (Alignment& a : model) {
      if (used_sources.count(a.source_id) || used_targets.count(a.target_id)) continue;
      used_sources.insert(a.source_id);
      used_targets.insert(a.target_id);
      out.push_back(std::move(a));
    }
  } else {
    out.insert(out.end(), model.begin(), model.end());
  }
  sort_alignments(out);
  return out;
}

Ontology prepare_ontology(const Ontology& ontology, const VariantOptions& options, DefinitionFetcher* fetcher,
                          const ContextCorpus* corpus, EnrichmentReport* report) {
  std::vector<Entity> entities(ontology.begin(), ontology.end());
  for (Entity& e : entities) {
    if (e.definition_source == DefinitionSource::kExternal && !options.use_external_defs) {
      e.definition.reset();
      e.definition_source = DefinitionSource::kNone;
    }
    if (!options.use_contexts) e.contexts.clear();
  }
  Ontology out(std::move(entities));
  if (options.use_external_defs && fetcher) out = enrich_definitions(out, *fetcher, report);
  if (options.use_contexts && corpus) out = attach_contexts(out, *corpus, kMaxContexts, options.context_seed);
  return out;
}

std::vector<FeatureVector> example_features(std::span<const LabeledExample> examples, const Ontology& source,
                                            const Ontology& target) {
  std::vector<FeatureVector> out(examples.size());
  parallel_for(examples.size(), 0, [&](std::size_t i) {
    out[i] = compute_features(source.at(examples[i].source_id), target.at(examples[i].target_id));
  });
  return out;
}

LrModel train_lr_model(std::span<const LabeledExample> train, const Ontology& source, const Ontology& target,
                       const LrTrainConfig& config, LrTrainReport* report) {
  const std::vector<FeatureVector> features = example_features(train, source, target);
  std::vector<int> labels;
  labels.reserve(train.size());
  for (const auto& ex : train) labels.push_back(ex.label);
  return train_lr(features, labels, config, report);
}

nn::NnModel train_nn_model(std::span<const LabeledExample> train, std::span<const LabeledExample> dev,
                           const Ontology& source, const Ontology& target, const nn::Embeddings* embeddings,
                           const NnTrainOptions& options, nn::TrainReport* report) {
  nn::NnModel model;
  model.dims = options.dims;
  model.use_features = options.use_features;
  model.seed = options.train.seed;

  std::set<char32_t> chars;
  auto collect_chars = [&](const Ontology& o) {
    for (const Entity& e : o) {
      for (char32_t c : unicode::decode(unicode::to_lower(e.name))) chars.insert(c);
      for (const auto& a : e.aliases) {
        for (char32_t c : unicode::decode(unicode::to_lower(a))) chars.insert(c);
      }
    }
  };
  collect_chars(source);
  collect_chars(target);
  chars.erase(U' ');
  model.chars = nn::CharVocab(std::vector<char32_t>(chars.begin(), chars.end()));

  Rng init_rng(mix_seed(options.train.seed, 0x494E4954ULL));
  nn::TrainConfig train_config = options.train;
  if (embeddings) {
    if (embeddings->dim() != model.dims.word_dim) {
      throw ValidationError("embedding dimension " + std::to_string(embeddings->dim()) + " does not match " +
                            std::to_string(model.dims.word_dim));
    }
    model.vocab = nn::Vocab(embeddings->words);
  } else {
    std::set<std::string> words;
    for (const Ontology* o : {&source, &target}) {
      for (const Entity& e : *o) {
        for (const auto& w : entity_document(e)) words.insert(w);
        for (const auto& c : e.contexts) {
          for (auto& w : tokenize(c)) words.insert(std::move(w));
        }
      }
    }
    model.vocab = nn::Vocab(std::vector<std::string>(words.begin(), words.end()));
    train_config.train_word_embeddings = true;
  }
  model.params = nn::zero_params<float>(model.dims, model.vocab.size(), model.chars.size());
  nn::init_params(model.params, model.dims, init_rng);
  if (embeddings) {
    model.params.word_vectors = embeddings->vectors;
  } else {
    for (nn::Index i = 0; i < model.params.word_vectors.size(); ++i) {
      model.params.word_vectors.data()[i] = static_cast<float>(init_rng.uniform(-0.1, 0.1));
    }
  }

  // Entity inputs: source entities first, then target entities.
  std::vector<nn::EntityInput> inputs;
  inputs.reserve(source.size() + target.size());
  for (const Entity& e : source) inputs.push_back(nn::make_entity_input(e, model.vocab, model.chars));
  for (const Entity& e : target) inputs.push_back(nn::make_entity_input(e, model.vocab, model.chars));
  auto to_pairs = [&](std::span<const LabeledExample> examples) {
    const std::vector<FeatureVector> features = example_features(examples, source, target);
    std::vector<nn::PairExample> out(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
      out[i].source = static_cast<std::uint32_t>(source.index_of(examples[i].source_id));
      out[i].target = static_cast<std::uint32_t>(source.size() + target.index_of(examples[i].target_id));
      out[i].label = examples[i].label;
      out[i].features = options.use_features ? nn::Vector<float>(features[i].cast<float>())
                                             : nn::Vector<float>::Zero(kFeatureCount);
    }
    return out;
  };
  const auto train_pairs = to_pairs(train);
  const auto dev_pairs = to_pairs(dev);
  model.params = nn::train_network(std::move(model.params), model.dims, inputs, train_pairs, dev_pairs,
                                   train_config, report);
  return model;
}

}  // namespace ontomatch
