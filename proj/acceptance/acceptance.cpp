// Standalone acceptance run: one PASS/FAIL line per criterion.
//
// Usage: ontomatch_acceptance [--quick]
//   --quick shrinks the training benchmark and epoch budget (smoke run only;
//   the thresholds are not expected to hold in that mode).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "../tests/oracles.hpp"
#include "../tests/support.hpp"
#include "ontomatch/candidate_index.hpp"
#include "ontomatch/dataset.hpp"
#include "ontomatch/enrichment.hpp"
#include "ontomatch/log.hpp"
#include "ontomatch/nn/grad_check.hpp"
#include "ontomatch/pipeline.hpp"
#include "ontomatch/string_features.hpp"
#include "ontomatch/synthetic.hpp"

using namespace ontomatch;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances.
constexpr double kCandidateSeconds = 10.0;
constexpr double kGradTolerance = 1e-4;
constexpr double kNnF1 = 0.85;
constexpr double kLrF1 = 0.75;
constexpr double kAblationSlack = 0.01;
constexpr double kMetricF1 = 0.69;
constexpr double kMetricTolerance = 0.005;
constexpr double kRuntimeMinutes = 15.0;

// Benchmark layout: models are trained on one generated ontology pair and
// evaluated on a separate 500-entity pair.
constexpr std::uint64_t kTrainSeed = 11;
constexpr std::uint64_t kTestSeed = 22;
constexpr std::size_t kTestEntities = 500;
std::size_t g_train_entities = 3000;
int g_max_epochs = 30;

int g_failures = 0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Runs a criterion, turning an exception into a failure line.
void criterion(const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(false, name, std::string("exception: ") + e.what());
  }
}

Entity make(const std::string& id, const std::string& name, std::vector<std::string> aliases = {},
            std::optional<std::string> def = std::nullopt) {
  RawEntity raw;
  raw.id = id;
  raw.name = name;
  raw.aliases = std::move(aliases);
  raw.definition = std::move(def);
  return validate_entity(raw);
}

// ---------------------------------------------------------------------------

void candidate_oracle() {
  Rng rng(2718);
  const auto start = Clock::now();
  int mismatches = 0;
  std::size_t sources = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t vocab = 2 + rng.uniform_index(49);
    const Ontology target = testing::random_ontology(rng, 1 + rng.uniform_index(200), vocab, "T");
    const Ontology source = testing::random_ontology(rng, 20, vocab, "S");
    const CandidateIndex index(target);
    for (const Entity& s : source) {
      ++sources;
      const auto want = oracle::rank_candidates(target, s);
      const CandidateList got = index.select(s, target.size());
      bool same = got.candidates.size() == want.size();
      for (std::size_t i = 0; same && i < want.size(); ++i) {
        same = got.candidates[i].target_id == want[i].target_id && got.candidates[i].idf_total == want[i].idf_total;
      }
      mismatches += !same;
    }
  }
  const double elapsed = seconds_since(start);
  report(mismatches == 0 && elapsed < kCandidateSeconds, "candidate-oracle",
         fmt("50 ontologies, %zu sources, %d mismatches, %.2fs (limit %.0fs)", sources, mismatches, elapsed,
             kCandidateSeconds));
}

void feature_suite() {
  Rng rng(31415);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t vocab = 3 + rng.uniform_index(40);
    const Entity a = testing::random_entity(rng, "A", vocab);
    const Entity b = testing::random_entity(rng, "B", vocab);
    const FeatureVector ab = compute_features(a, b);
    const FeatureVector ba = compute_features(b, a);
    if (!(ab.array() == ba.array()).all()) ++violations;
    for (int k = 0; k < kFeatureCount; ++k) {
      if (!(ab[k] >= 0.0 && ab[k] <= 1.0)) ++violations;
      if (is_boolean_metric(static_cast<Metric>(k % kMetricCount)) && ab[k] != 0.0 && ab[k] != 1.0) ++violations;
    }
    const FeatureVector aa = compute_features(a, a);
    for (int k = 0; k < kFeatureCount; ++k) {
      const bool empty_channel = k / kMetricCount == static_cast<int>(Channel::kDefinition) && !a.definition;
      if (!empty_channel && aa[k] != 1.0) ++violations;
    }
  }
  int fixtures = 0;
  {
    const Entity e = make("E", "carpal tunnel syndrome", {"CTS"}, "A compression of the median nerve.");
    const FeatureVector f = compute_features(e, e);
    fixtures += (f.array() == 1.0).all();
  }
  {
    const FeatureVector f = compute_features(make("A", "alpha beta"), make("B", "gamma delta"));
    bool ok = true;
    for (int m = 0; m < 7; ++m) ok = ok && f[m] == 0.0;
    ok = ok && std::abs(f[feature_index(Channel::kName, Metric::kEditSimilarity)] - 5.0 / 11.0) < 1e-15;
    fixtures += ok;
  }
  {
    const FeatureVector f =
        compute_features(make("A", "progressive myoclonic epilepsies"), make("B", "myoclonic epilepsies, progressive"));
    fixtures += f[feature_index(Channel::kName, Metric::kTokenJaccard)] == 1.0 &&
                f[feature_index(Channel::kName, Metric::kExactMatch)] == 0.0 &&
                f[feature_index(Channel::kName, Metric::kRootWordMatch)] == 0.0;
  }
  report(violations == 0 && fixtures == 3, "feature-suite",
         fmt("1000 random pairs, %d violations; %d/3 fixtures", violations, fixtures));
}

void gradient_verification() {
  nn::Dims d;
  d.word_dim = 6;
  d.char_dim = 3;
  d.filters_per_width = 4;
  d.name_hidden = 5;
  d.text_hidden = 4;
  d.ff1 = 7;
  d.ff2 = 5;
  d.combine = 6;
  double worst = 0.0;
  std::string worst_array;
  int controls_caught = 0;
  int skipped = 0;
  for (int inst = 0; inst < 10; ++inst) {
    Rng rng(500 + static_cast<std::uint64_t>(inst));
    auto p = nn::zero_params<double>(d, 10, 12);
    nn::init_params(p, d, rng);
    for (nn::Index i = 0; i < p.word_vectors.size(); ++i) p.word_vectors.data()[i] = rng.uniform(-1, 1);
    for (auto* b : {&p.ff1.b, &p.ff2.b, &p.combine.b, &p.conv[0].b, &p.conv[1].b}) {
      for (nn::Index i = 0; i < b->size(); ++i) (*b)(i) = rng.uniform(0, 0.3);
    }
    auto token = [&](int word) {
      nn::NameToken t;
      t.word = word;
      const int n = 1 + static_cast<int>(rng.uniform_index(8));
      for (int i = 0; i < n; ++i) t.chars.push_back(2 + static_cast<int>(rng.uniform_index(10)));
      return t;
    };
    auto word = [&] { return rng.bernoulli(0.15) ? -1 : static_cast<int>(rng.uniform_index(10)); };
    nn::EntityInput s, t;
    s.name = {token(word()), token(word())};
    s.aliases = {{token(word())}, {token(word()), token(word())}};
    s.definition = {word(), word(), word(), word()};
    s.contexts = {{word(), word()}, {word(), word(), word()}};
    t.name = {token(word())};
    t.aliases = {t.name};
    if (inst % 2) t.definition = {word(), word()};
    t.contexts = {{word(), word()}};
    nn::Vector<double> f(32);
    for (int i = 0; i < 32; ++i) f(i) = rng.uniform01();
    const auto r = nn::grad_check(p, d, s, t, f, inst % 2);
    skipped += r.skipped_at_kinks;
    if (r.max_relative_error > worst) {
      worst = r.max_relative_error;
      worst_array = r.worst_array;
    }
    nn::GradCheckOptions corrupt;
    corrupt.corrupt = [](std::string_view array, nn::Index, double& g) {
      if (array == "text_lstm.bwd.wh") g = -g;
    };
    const auto bad = nn::grad_check(p, d, s, t, f, inst % 2, corrupt);
    controls_caught += bad.max_relative_error > kGradTolerance && bad.worst_array == "text_lstm.bwd.wh";
  }
  report(worst < kGradTolerance && controls_caught == 10, "gradient-verification",
         fmt("max rel. error %.2e (%s, limit %.0e), %d kink coords skipped; negative control caught %d/10", worst,
             worst_array.c_str(), kGradTolerance, skipped, controls_caught));
}

std::string alignment_bytes(const std::vector<Alignment>& a) {
  std::ostringstream out;
  write_alignment(a, out);
  return out.str();
}

void determinism() {
  SyntheticConfig config;
  config.entities = 200;
  config.seed = 5;
  const SyntheticBenchmark b = generate_benchmark(config);
  const auto examples = derive_examples(b.table, b.source, b.target, 3);
  const DatasetSplit split = split_examples(examples, 3);

  const LrModel lr1 = train_lr_model(split.train, b.source, b.target);
  const LrModel lr2 = train_lr_model(split.train, b.source, b.target);
  const bool lr_same = lr_to_json(lr1) == lr_to_json(lr2) && lr1 == lr2;

  NnTrainOptions options;
  options.train.max_epochs = 3;
  options.train.threads = 1;
  const nn::NnModel nn1 = train_nn_model(split.train, split.dev, b.source, b.target, &b.embeddings, options);
  options.train.threads = 0;
  const nn::NnModel nn2 = train_nn_model(split.train, split.dev, b.source, b.target, &b.embeddings, options);
  std::ostringstream a1, a2;
  nn::write_nn_model(nn1, a1);
  nn::write_nn_model(nn2, a2);
  const bool nn_same = nn::bitwise_equal(nn1.params, nn2.params) && a1.str() == a2.str();

  AlignConfig ac;
  ac.threads = 1;
  LrScorer lr_scorer(lr1);
  const std::string lr_run1 = alignment_bytes(align(b.source, b.target, lr_scorer, ac));
  NnScorer nn_scorer1(nn1, 1);
  const std::string nn_run1 = alignment_bytes(align(b.source, b.target, nn_scorer1, ac));
  ac.threads = 0;
  LrScorer lr_scorer2(lr2);
  const std::string lr_run2 = alignment_bytes(align(b.source, b.target, lr_scorer2, ac));
  NnScorer nn_scorer2(nn2, 0);
  const std::string nn_run2 = alignment_bytes(align(b.source, b.target, nn_scorer2, ac));
  const bool align_same = lr_run1 == lr_run2 && nn_run1 == nn_run2;
  report(lr_same && nn_same && align_same, "determinism",
         fmt("LR model %s, NN model %s (%zu bytes), alignment files %s", lr_same ? "identical" : "DIFFER",
             nn_same ? "identical" : "DIFFER", a1.str().size(), align_same ? "identical" : "DIFFER"));
}

// One model variant: enrichment toggles, training, alignment, evaluation.
struct Variant {
  const char* name;
  bool features;
  bool external_defs;
  bool contexts;
};

struct Benchmarks {
  SyntheticBenchmark train;
  SyntheticBenchmark test;
  DatasetSplit split;
};

Benchmarks make_benchmarks(bool strip_target_definitions) {
  SyntheticConfig config;
  config.strip_target_definitions = strip_target_definitions;
  config.seed = kTrainSeed;
  config.entities = g_train_entities;
  Benchmarks b{generate_benchmark(config), {}, {}};
  config.seed = kTestSeed;
  config.entities = kTestEntities;
  b.test = generate_benchmark(config);
  b.split = split_examples(derive_examples(b.train.table, b.train.source, b.train.target, 5), 5);
  return b;
}

std::pair<Ontology, Ontology> prepared(const SyntheticBenchmark& b, const Variant& v) {
  FixtureDefinitionSource fixture;
  for (const auto& [query, lead] : b.definition_fixture) fixture.add(query, lead);
  DefinitionFetcher fetcher(fixture);
  VariantOptions options;
  options.use_external_defs = v.external_defs;
  options.use_contexts = v.contexts;
  return {prepare_ontology(b.source, options, &fetcher, &b.contexts),
          prepare_ontology(b.target, options, &fetcher, &b.contexts)};
}

Metrics run_nn_variant(const Benchmarks& b, const Variant& v, nn::TrainReport* rep) {
  const auto [train_s, train_t] = prepared(b.train, v);
  const auto [test_s, test_t] = prepared(b.test, v);
  NnTrainOptions options;
  options.use_features = v.features;
  options.train.max_epochs = g_max_epochs;
  const nn::NnModel model =
      train_nn_model(b.split.train, b.split.dev, train_s, train_t, &b.train.embeddings, options, rep);
  NnScorer scorer(model);
  AlignConfig ac;
  ac.use_features = v.features;
  ac.use_external_defs = v.external_defs;
  ac.use_contexts = v.contexts;
  return evaluate(align(test_s, test_t, scorer, ac), b.test.reference);
}

void end_to_end() {
  const auto start = Clock::now();
  const Benchmarks b = make_benchmarks(false);
  const LrModel lr = train_lr_model(b.split.train, b.train.source, b.train.target);
  LrScorer lr_scorer(lr);
  const Metrics lr_m = evaluate(align(b.test.source, b.test.target, lr_scorer, AlignConfig{}), b.test.reference);
  nn::TrainReport rep;
  const Metrics nn_m = run_nn_variant(b, {"NN+f", true, false, false}, &rep);
  const double minutes = seconds_since(start) / 60.0;
  const bool ok = nn_m.f1 >= kNnF1 && lr_m.f1 >= kLrF1 && minutes < kRuntimeMinutes;
  report(ok, "synthetic-end-to-end",
         fmt("NN+f F1 %.4f (P %.3f R %.3f, >= %.2f, %zu epochs run, best %d); LR F1 %.4f (>= %.2f); "
             "%zu train examples; %.1f min (limit %.0f)",
             nn_m.f1, nn_m.precision, nn_m.recall, kNnF1, rep.epochs.size(), rep.best_epoch, lr_m.f1, kLrF1,
             b.split.train.size(), minutes, kRuntimeMinutes));
}

void ablation() {
  const Benchmarks b = make_benchmarks(true);
  std::map<std::string, double> f1;
  std::string detail;
  for (const Variant& v : {Variant{"NN", false, false, false}, Variant{"NN+f", true, false, false},
                           Variant{"NN+f+w", true, true, false}, Variant{"NN+f+w+c", true, true, true}}) {
    const Metrics m = run_nn_variant(b, v, nullptr);
    f1[v.name] = m.f1;
    detail += fmt("%s%s %.4f", detail.empty() ? "" : ", ", v.name, m.f1);
  }
  const bool ok = f1["NN+f"] >= f1["NN"] && f1["NN+f+w+c"] >= f1["NN+f"] - kAblationSlack;
  report(ok, "directional-ablation", "F1 " + detail + fmt(" (need NN+f >= NN, NN+f+w+c >= NN+f - %.2f)", kAblationSlack));
}

void metric_oracle() {
  const double f = f1_score(0.80, 0.61);
  ReferenceAlignment ref;
  ref.add("a", "x", 1);
  ref.add("b", "y", 1);
  auto pair = [](const char* s, const char* t) { return Alignment{s, t, 0.9, Provenance::kModel}; };
  const Metrics exact = evaluate(std::vector<Alignment>{pair("a", "x"), pair("b", "y")}, ref);
  const Metrics disjoint = evaluate(std::vector<Alignment>{pair("a", "y"), pair("c", "z")}, ref);
  const Metrics empty = evaluate(std::vector<Alignment>{}, ref);
  const bool trivial = exact.precision == 1.0 && exact.recall == 1.0 && exact.f1 == 1.0 && disjoint.precision == 0.0 &&
                       disjoint.recall == 0.0 && disjoint.f1 == 0.0 && empty.precision == 0.0 && empty.f1 == 0.0;
  report(std::abs(f - kMetricF1) <= kMetricTolerance && trivial, "metric-oracle",
         fmt("F1(P=0.80, R=0.61) = %.4f (target %.2f +/- %.3f); trivial cases %s", f, kMetricF1, kMetricTolerance,
             trivial ? "ok" : "WRONG"));
}

void negative_sampling() {
  int leaks = 0;
  int split_errors = 0;
  std::size_t total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SyntheticConfig config;
    config.entities = 300;
    config.seed = 1000 + seed;
    const SyntheticBenchmark b = generate_benchmark(config);
    const auto examples = derive_examples(b.table, b.source, b.target, seed);
    total += examples.size();
    std::set<std::string> positive_targets;
    for (const auto& e : examples) {
      if (e.label == 1) positive_targets.insert(e.target_id);
    }
    for (const auto& e : examples) leaks += e.label == 0 && positive_targets.count(e.target_id);
    const DatasetSplit s = split_examples(examples, seed);
    const double n = static_cast<double>(examples.size());
    split_errors += std::abs(static_cast<double>(s.train.size()) - 0.64 * n) > 1.0;
    split_errors += std::abs(static_cast<double>(s.dev.size()) - 0.16 * n) > 1.0;
    split_errors += std::abs(static_cast<double>(s.test.size()) - 0.20 * n) > 1.0;
  }
  report(leaks == 0 && split_errors == 0, "negative-sampling",
         fmt("20 derivations, %zu examples, %d negatives on positive targets, %d split sizes off by > 1", total, leaks,
             split_errors));
}

void enrichment() {
  const std::string sentence =
      "Dentatorubral-pallidoluysian atrophy (DRPLA) is an autosomal dominant spinocerebellar degeneration caused by "
      "an expansion of a CAG repeat encoding a polyglutamine tract in the atrophin-1 protein.";
  FixtureDefinitionSource fixture;
  fixture.add("Dentatorubral-pallidoluysian atrophy", sentence + " It is also known as Naito-Oyanagi disease.");
  DefinitionFetcher fetcher(fixture);
  const bool drpla = fetcher.fetch("Dentatorubral-pallidoluysian atrophy") == sentence;

  Rng rng(99);
  std::size_t max_seen = 0;
  bool idempotent = true;
  for (int trial = 0; trial < 30; ++trial) {
    const Ontology o = testing::random_ontology(rng, 40, 30);
    ContextCorpus corpus;
    FixtureDefinitionSource defs;
    for (const auto& e : o) {
      const std::size_t n = rng.uniform_index(80);
      for (std::size_t i = 0; i < n; ++i) corpus[e.id].push_back(testing::random_phrase(rng, 30, 6) + ".");
      if (rng.bernoulli(0.5)) defs.add(e.name, testing::random_phrase(rng, 30, 8) + ". Second sentence.");
    }
    DefinitionFetcher f(defs);
    const std::uint64_t seed = rng.next();
    const Ontology once = attach_contexts(enrich_definitions(o, f), corpus, kMaxContexts, seed);
    const Ontology twice = attach_contexts(enrich_definitions(once, f), corpus, kMaxContexts, seed);
    for (const auto& e : twice) max_seen = std::max(max_seen, e.contexts.size());
    idempotent = idempotent && once == twice;
  }
  report(drpla && max_seen <= kMaxContexts && idempotent, "enrichment",
         fmt("DRPLA sentence %s; max contexts %zu (cap %zu); idempotent %s", drpla ? "exact" : "WRONG", max_seen,
             kMaxContexts, idempotent ? "yes" : "NO"));
}

}  // namespace

int main(int argc, char** argv) {
  set_log_level(LogLevel::kError);
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) {
      g_train_entities = 300;
      g_max_epochs = 2;
    }
  }
  const auto start = Clock::now();
  criterion("candidate-oracle", candidate_oracle);
  criterion("feature-suite", feature_suite);
  criterion("gradient-verification", gradient_verification);
  criterion("determinism", determinism);
  criterion("synthetic-end-to-end", end_to_end);
  criterion("directional-ablation", ablation);
  criterion("metric-oracle", metric_oracle);
  criterion("negative-sampling", negative_sampling);
  criterion("enrichment", enrichment);
  std::printf("%d of 9 criteria failed (%.1f min)\n", g_failures, seconds_since(start) / 60.0);
  return g_failures == 0 ? 0 : 1;
}
