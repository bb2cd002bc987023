#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "ontomatch/errors.hpp"
#include "ontomatch/pipeline.hpp"
#include "ontomatch/synthetic.hpp"
#include "support.hpp"

using namespace ontomatch;

namespace {

Entity named(const std::string& id, const std::string& name, std::vector<std::string> aliases = {}) {
  RawEntity raw;
  raw.id = id;
  raw.name = name;
  raw.aliases = std::move(aliases);
  return validate_entity(raw);
}

Alignment model_pair(const std::string& s, const std::string& t) { return {s, t, 0.9, Provenance::kModel}; }

// Deterministic pseudo-scores so pipeline properties can be checked without a
// trained model.
class HashScorer : public PairScorer {
 public:
  void prepare(const Ontology&, const Ontology&) override {}
  double score(std::size_t s, std::size_t t, const FeatureVector& f) const override {
    const std::uint64_t h = mix_seed(s * 7919 + 1, t + 17);
    return 0.5 * f.sum() / kFeatureCount + 0.5 * static_cast<double>(h % 10000) / 10000.0;
  }
};

}  // namespace

TEST_CASE("metric arithmetic") {
  CHECK(f1_score(0.80, 0.61) == doctest::Approx(0.69).epsilon(0.005 / 0.69));
  CHECK(f1_score(0.80, 0.61) == doctest::Approx(2 * 0.8 * 0.61 / 1.41).epsilon(1e-15));
  CHECK(f1_score(0.0, 0.0) == 0.0);

  ReferenceAlignment ref;
  ref.add("a", "x", 1);
  ref.add("b", "y", 1);
  ref.add("c", "z", 0);
  const std::vector<Alignment> exact = {model_pair("a", "x"), model_pair("b", "y")};
  Metrics m = evaluate(exact, ref);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.f1 == 1.0);
  m = evaluate(std::vector<Alignment>{model_pair("a", "y"), model_pair("c", "z")}, ref);
  CHECK(m.precision == 0.0);
  CHECK(m.recall == 0.0);
  CHECK(m.f1 == 0.0);
  m = evaluate(std::vector<Alignment>{}, ref);
  CHECK(m.precision == 0.0);
  CHECK(m.gold == 2);
  m = evaluate(std::vector<Alignment>{model_pair("a", "x"), model_pair("a", "x"), model_pair("q", "r")}, ref);
  CHECK(m.predicted == 2);  // duplicates count once
  CHECK(m.precision == 0.5);
  CHECK(m.recall == 0.5);
}

TEST_CASE("property: evaluate is permutation invariant") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    ReferenceAlignment ref;
    std::vector<IdPair> ref_pairs;
    std::vector<Alignment> pred;
    for (int i = 0; i < 30; ++i) {
      const std::string s = "s" + std::to_string(rng.uniform_index(15));
      const std::string t = "t" + std::to_string(rng.uniform_index(15));
      if (rng.bernoulli(0.5)) ref_pairs.emplace_back(s, t);
      if (rng.bernoulli(0.5)) pred.push_back(model_pair(s, t));
    }
    for (const auto& [s, t] : ref_pairs) ref.add(s, t, 1);
    const Metrics base = evaluate(pred, ref);
    rng.shuffle(std::span<Alignment>(pred));
    rng.shuffle(std::span<IdPair>(ref_pairs));
    ReferenceAlignment shuffled;
    for (const auto& [s, t] : ref_pairs) shuffled.add(s, t, 1);
    const Metrics again = evaluate(pred, shuffled);
    CHECK(again.precision == base.precision);
    CHECK(again.recall == base.recall);
    CHECK(again.f1 == base.f1);
  }
}

TEST_CASE("exact-match pre-pass") {
  const Ontology s({named("S1", "DRPLA"), named("S2", "median neuropathy", {"CTS"}), named("S3", "alpha"),
                    named("S4", "shared")});
  const Ontology t({named("T1", "drpla"), named("T2", "carpal tunnel", {"cts"}), named("T3", "beta"),
                    named("T4", "Shared"), named("T5", "other", {"shared"})});
  const PrepassResult r = exact_match_prepass(s, t);
  std::set<IdPair> got;
  for (const auto& a : r.alignments) {
    CHECK(a.score == 1.0);
    CHECK(a.provenance == Provenance::kExactMatch);
    got.emplace(a.source_id, a.target_id);
  }
  CHECK(got == std::set<IdPair>{{"S1", "T1"}, {"S2", "T2"}, {"S4", "T4"}, {"S4", "T5"}});
  CHECK(r.remaining_sources == std::vector<std::string>{"S3"});
  CHECK(r.matched_targets == std::set<std::string>{"T1", "T2", "T4", "T5"});
}

TEST_CASE("self-alignment and threshold 1.0") {
  Rng rng(10);
  const Ontology o = testing::random_ontology(rng, 60, 400);
  HashScorer scorer;
  AlignConfig config;
  config.threads = 1;
  const auto out = align(o, o, scorer, config);
  ReferenceAlignment identity;
  for (const auto& e : o) identity.add(e.id, e.id, 1);
  const Metrics m = evaluate(out, identity);
  CHECK(m.recall == 1.0);
  // Random names can collide, so the pre-pass may add a few extra pairs.
  CHECK(m.precision > 0.9);

  SyntheticConfig sc;
  sc.entities = 150;
  const SyntheticBenchmark b = generate_benchmark(sc);
  config.threshold = 1.0;
  const auto strict = align(b.source, b.target, scorer, config);
  const PrepassResult pre = exact_match_prepass(b.source, b.target);
  CHECK(strict.size() == pre.alignments.size());
  for (const auto& a : strict) CHECK(a.provenance == Provenance::kExactMatch);

  config.threshold = 0.0;
  CHECK_THROWS_AS(align(b.source, b.target, scorer, config), ValidationError);
  config.threshold = 1.5;
  CHECK_THROWS_AS(align(b.source, b.target, scorer, config), ValidationError);
}

TEST_CASE("property: one-to-one, anti-monotone threshold, prepass invariance, thread independence") {
  SyntheticConfig sc;
  sc.entities = 150;
  const SyntheticBenchmark b = generate_benchmark(sc);
  HashScorer hash;
  LrModel lr_model;
  lr_model.weights.setConstant(0.3);
  lr_model.bias = -2.0;
  LrScorer lr(lr_model);
  const PrepassResult pre = exact_match_prepass(b.source, b.target);
  std::set<IdPair> pre_pairs;
  for (const auto& a : pre.alignments) pre_pairs.emplace(a.source_id, a.target_id);

  std::size_t previous = std::numeric_limits<std::size_t>::max();
  for (double threshold : {0.05, 0.2, 0.4, 0.5, 0.6, 0.8, 0.95, 1.0}) {
    for (bool one_to_one : {true, false}) {
      AlignConfig config;
      config.threshold = threshold;
      config.one_to_one = one_to_one;
      config.threads = 1;
      for (PairScorer* scorer : {static_cast<PairScorer*>(&hash), static_cast<PairScorer*>(&lr)}) {
        const auto out = align(b.source, b.target, *scorer, config);
        std::set<IdPair> exact;
        std::set<std::string> sources, targets;
        for (const auto& a : out) {
          if (a.provenance == Provenance::kExactMatch) {
            exact.emplace(a.source_id, a.target_id);
            continue;
          }
          CHECK(a.score >= threshold);
          if (one_to_one) {
            CHECK(pre.matched_targets.count(a.target_id) == 0);
            CHECK(sources.insert(a.source_id).second);
            CHECK(targets.insert(a.target_id).second);
          }
        }
        CHECK(exact == pre_pairs);
        std::vector<Alignment> sorted = out;
        sort_alignments(sorted);
        CHECK(sorted == out);
        if (one_to_one && scorer == &hash) {
          CHECK(out.size() <= previous);
          previous = out.size();
          config.threads = 3;
          CHECK(align(b.source, b.target, *scorer, config) == out);
          config.threads = 1;
        }
      }
    }
  }
}

TEST_CASE("feature toggle zeroes the features") {
  class Recorder : public PairScorer {
   public:
    void prepare(const Ontology&, const Ontology&) override {}
    double score(std::size_t, std::size_t, const FeatureVector& f) const override {
      if (!f.isZero(0.0)) nonzero = true;
      return 0.0;
    }
    mutable std::atomic<bool> nonzero{false};
  };
  SyntheticConfig sc;
  sc.entities = 40;
  const SyntheticBenchmark b = generate_benchmark(sc);
  Recorder r;
  AlignConfig config;
  config.use_features = false;
  align(b.source, b.target, r, config);
  CHECK_FALSE(r.nonzero.load());
  config.use_features = true;
  align(b.source, b.target, r, config);
  CHECK(r.nonzero.load());
}

TEST_CASE("prepare_ontology variant toggles") {
  RawEntity raw;
  raw.id = "A";
  raw.name = "alpha";
  raw.definition = "Fetched earlier.";
  raw.definition_source = DefinitionSource::kExternal;
  raw.contexts = {"old context."};
  RawEntity native;
  native.id = "B";
  native.name = "beta";
  native.definition = "Native one.";
  RawEntity bare;
  bare.id = "C";
  bare.name = "gamma";
  const Ontology o({validate_entity(raw), validate_entity(native), validate_entity(bare)});

  const Ontology plain = prepare_ontology(o, {}, nullptr, nullptr);
  CHECK_FALSE(plain[0].definition.has_value());
  CHECK(plain[0].contexts.empty());
  CHECK(plain[1].definition == "Native one.");

  FixtureDefinitionSource fixture;
  fixture.add("gamma", "Gamma is a letter. It follows beta.");
  DefinitionFetcher fetcher(fixture);
  ContextCorpus corpus{{"C", {"gamma rays.", "gamma function."}}};
  VariantOptions options;
  options.use_external_defs = true;
  options.use_contexts = true;
  EnrichmentReport report;
  const Ontology full = prepare_ontology(o, options, &fetcher, &corpus, &report);
  CHECK(full[0].definition == "Fetched earlier.");
  CHECK(full[0].contexts == std::vector<std::string>{"old context."});
  CHECK(full[2].definition == "Gamma is a letter.");
  CHECK(full[2].contexts.size() == 2);
  CHECK(report.external == 2);
  CHECK(report.native == 1);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> seen(1000);
  parallel_for(seen.size(), 4, [&](std::size_t i) { ++seen[i]; });
  for (const auto& s : seen) CHECK(s.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 7) throw ValidationError("boom");
                  }),
                  ValidationError);
}
