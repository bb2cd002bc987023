#include <chrono>
#include <cmath>

#include "doctest.h"
#include "ontomatch/candidate_index.hpp"
#include "ontomatch/errors.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace ontomatch;

namespace {

Entity named(const std::string& id, const std::string& name, std::vector<std::string> aliases = {},
             std::optional<std::string> def = std::nullopt) {
  RawEntity raw;
  raw.id = id;
  raw.name = name;
  raw.aliases = std::move(aliases);
  raw.definition = std::move(def);
  return validate_entity(raw);
}

// Four targets whose df table is easy to count by hand:
//   carpal: T1 T2        tunnel: T1          syndrome: T1 T3 T4
//   wrist: T2            down: T3            x: T4
Ontology four_targets() {
  return Ontology({named("T1", "carpal tunnel syndrome"), named("T2", "carpal", {"wrist"}),
                   named("T3", "down syndrome"), named("T4", "syndrome x")});
}

}  // namespace

TEST_CASE("tokenize") {
  CHECK(tokenize("Carpal Tunnel Syndrome") == std::vector<std::string>{"carpal", "tunnel", "syndrome"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("atrophin-1 protein") == std::vector<std::string>{"atrophin", "1", "protein"});
  CHECK(tokenize("  ,;  ").empty());
  CHECK(tokenize("Ménière's disease") == std::vector<std::string>{"ménière", "s", "disease"});
  CHECK(tokenize("ÉCOLE") == std::vector<std::string>{"école"});
}

TEST_CASE("index construction") {
  SUBCASE("single document") {
    const CandidateIndex idx(Ontology({named("T", "x y")}));
    CHECK(idx.n_docs() == 1);
    CHECK(idx.postings("x") == std::vector<std::uint32_t>{0});
    CHECK(idx.postings("y") == std::vector<std::uint32_t>{0});
    CHECK(idx.vocabulary_size() == 2);
  }
  SUBCASE("document frequency counts documents") {
    const CandidateIndex idx(Ontology({named("A", "x"), named("B", "x x")}));
    CHECK(idx.df("x") == 2);
  }
  SUBCASE("four-target fixture df table") {
    const CandidateIndex idx(four_targets());
    CHECK(idx.df("carpal") == 2);
    CHECK(idx.df("tunnel") == 1);
    CHECK(idx.df("syndrome") == 3);
    CHECK(idx.df("wrist") == 1);
    CHECK(idx.df("down") == 1);
    CHECK(idx.df("x") == 1);
    CHECK(idx.postings("syndrome") == std::vector<std::uint32_t>{0, 2, 3});
  }
  SUBCASE("empty ontology") { CHECK_THROWS_AS(CandidateIndex(Ontology{}), ValidationError); }
  SUBCASE("aliases and definitions are indexed") {
    const CandidateIndex idx(Ontology({named("A", "x", {"y"}, "z w.")}));
    CHECK(idx.contains("y"));
    CHECK(idx.contains("w"));
  }
}

TEST_CASE("idf values") {
  const Ontology o({named("A", "u v w"), named("B", "v w"), named("C", "w"), named("D", "w q")});
  const CandidateIndex idx(o);
  CHECK(idx.idf("u") == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(idx.idf("u") == doctest::Approx(1.3863).epsilon(1e-4));
  CHECK(idx.idf("w") == 0.0);
  CHECK(idx.idf("v") == doctest::Approx(0.6931).epsilon(1e-4));
  CHECK_THROWS_AS(idx.idf("missing"), std::out_of_range);
}

TEST_CASE("select_candidates examples") {
  const Ontology targets = four_targets();
  const CandidateIndex idx(targets);
  CHECK(idx.select(named("S", "unrelated words")).candidates.empty());

  // Exact copy of T1 retrieves T1 first with the sum of its token idfs.
  const CandidateList self = idx.select(targets.at("T1"), 1);
  REQUIRE(self.candidates.size() == 1);
  CHECK(self.candidates[0].target_id == "T1");
  CHECK(self.candidates[0].idf_total ==
        doctest::Approx(std::log(4.0 / 2) + std::log(4.0 / 1) + std::log(4.0 / 3)).epsilon(1e-12));

  // k = 2 against the brute-force ranking.
  const Entity source = named("S", "carpal syndrome", {"wrist pain"});
  const auto expected = oracle::rank_candidates(targets, source);
  const CandidateList got = idx.select(source, 2);
  REQUIRE(got.candidates.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(got.candidates[i].target_id == expected[i].target_id);
    CHECK(got.candidates[i].idf_total == doctest::Approx(expected[i].idf_total).epsilon(1e-12));
  }
  CHECK(got.candidates[0].target_id == "T2");  // carpal + wrist
}

TEST_CASE("ties are broken by ascending target id") {
  const Ontology targets({named("b", "x y"), named("a", "x z"), named("c", "x q")});
  const CandidateIndex idx(targets);
  const CandidateList got = idx.select(named("S", "x"), 3);
  REQUIRE(got.candidates.size() == 3);
  CHECK(got.candidates[0].target_id == "a");
  CHECK(got.candidates[1].target_id == "b");
  CHECK(got.candidates[2].target_id == "c");
}

TEST_CASE("property: oracle equivalence, recall and prefix monotonicity") {
  ontomatch::Rng rng(77);
  const auto start = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t vocab = 5 + rng.uniform_index(46);
    const Ontology target = testing::random_ontology(rng, 1 + rng.uniform_index(200), vocab, "T");
    const Ontology source = testing::random_ontology(rng, 10, vocab, "S");
    const CandidateIndex idx(target);
    for (const Entity& s : source) {
      const auto expected = oracle::rank_candidates(target, s);
      const CandidateList full = idx.select(s, target.size());
      REQUIRE(full.candidates.size() == expected.size());
      for (std::size_t i = 0; i < expected.size(); ++i) {
        REQUIRE(full.candidates[i].target_id == expected[i].target_id);
        REQUIRE(full.candidates[i].idf_total == expected[i].idf_total);
      }
      const std::size_t k = 1 + rng.uniform_index(10);
      const CandidateList part = idx.select(s, k);
      REQUIRE(part.candidates.size() == std::min(k, full.candidates.size()));
      for (std::size_t i = 0; i < part.candidates.size(); ++i) {
        CHECK(part.candidates[i] == full.candidates[i]);
      }
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(seconds < 10.0);
}

TEST_CASE("property: duplicate tokens do not change idf_total") {
  ontomatch::Rng rng(3);
  const Ontology target = testing::random_ontology(rng, 60, 20, "T");
  const CandidateIndex idx(target);
  for (int i = 0; i < 30; ++i) {
    Entity s = testing::random_entity(rng, "S", 20);
    const CandidateList once = idx.select(s, target.size());
    s.name = s.name + " " + s.name + " " + s.name;
    const CandidateList thrice = idx.select(s, target.size());
    REQUIRE(once.candidates.size() == thrice.candidates.size());
    for (std::size_t j = 0; j < once.candidates.size(); ++j) CHECK(once.candidates[j] == thrice.candidates[j]);
  }
}
