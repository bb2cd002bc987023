#include <atomic>
#include <set>
#include <sstream>
#include <thread>

#ifdef ONTOMATCH_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

#include "doctest.h"
#include "json.hpp"
#include "ontomatch/enrichment.hpp"
#include "ontomatch/errors.hpp"
#include "support.hpp"

using namespace ontomatch;

namespace {

const std::string kDrplaSentence =
    "Dentatorubral-pallidoluysian atrophy (DRPLA) is an autosomal dominant spinocerebellar degeneration caused by "
    "an expansion of a CAG repeat encoding a polyglutamine tract in the atrophin-1 protein.";

Entity make(const std::string& id, const std::string& name, std::optional<std::string> def = std::nullopt) {
  RawEntity raw;
  raw.id = id;
  raw.name = name;
  raw.definition = std::move(def);
  return validate_entity(raw);
}

}  // namespace

TEST_CASE("first_sentence") {
  CHECK(first_sentence("A is B. C is D.") == "A is B.");
  CHECK(first_sentence("pH 7.4 buffer is used. More.") == "pH 7.4 buffer is used.");
  CHECK(first_sentence("No terminator here") == "No terminator here");
  CHECK(first_sentence("Is it? Yes.") == "Is it?");
  CHECK(first_sentence("Stop! Go.") == "Stop!");
  CHECK(first_sentence("Seen by Dr. Smith today. Later.") == "Seen by Dr. Smith today.");
  CHECK(first_sentence("Fruit, e.g. apples, is sweet. x") == "Fruit, e.g. apples, is sweet.");
  CHECK(first_sentence("Ends with a period.") == "Ends with a period.");
  CHECK(first_sentence("Version 2.0.1 shipped. Next") == "Version 2.0.1 shipped.");
}

TEST_CASE("fixture lookups") {
  FixtureDefinitionSource fixture;
  fixture.add("Dentatorubral-pallidoluysian atrophy",
              kDrplaSentence + " It is also known as Naito-Oyanagi disease. Symptoms vary.");
  DefinitionFetcher fetcher(fixture);
  CHECK(fetcher.fetch("Dentatorubral-pallidoluysian atrophy") == kDrplaSentence);
  CHECK(fetcher.fetch("Unknown thing") == std::nullopt);
  CHECK(fixture.calls() == 2);
  CHECK(fetcher.fetch("Dentatorubral-pallidoluysian atrophy") == kDrplaSentence);
  CHECK(fetcher.cache_hits() == 1);
  CHECK(fetcher.source_calls() == 2);
  CHECK(fixture.calls() == 2);
  CHECK(fetcher.fetch("Unknown thing") == std::nullopt);  // misses are cached too
  CHECK(fixture.calls() == 2);
}

TEST_CASE("fixture file parsing") {
  std::istringstream good(R"({"query": "a", "lead": "A thing. More."})" "\n\n" R"({"query": "b", "lead": "B."})" "\n");
  auto fixture = FixtureDefinitionSource::parse(good);
  CHECK(fixture.lookup("a") == "A thing. More.");
  std::istringstream bad(R"({"query": "a"})" "\n");
  CHECK_THROWS_AS(FixtureDefinitionSource::parse(bad), ParseError);
}

TEST_CASE("enrich_definitions bookkeeping") {
  std::vector<Entity> entities;
  FixtureDefinitionSource fixture;
  for (int i = 0; i < 10; ++i) {
    const std::string name = "entity " + std::to_string(i);
    if (i < 2) {
      entities.push_back(make("E" + std::to_string(i), name, "Native definition " + std::to_string(i) + "."));
      fixture.add(name, "Should not be used.");
    } else {
      entities.push_back(make("E" + std::to_string(i), name));
      if (i < 8) fixture.add(name, "Fetched " + std::to_string(i) + ". Second sentence.");
    }
  }
  const Ontology ontology(entities);
  DefinitionFetcher fetcher(fixture);
  EnrichmentReport report;
  const Ontology enriched = enrich_definitions(ontology, fetcher, &report);
  CHECK(report.native == 2);
  CHECK(report.external == 6);
  CHECK(report.none == 2);
  CHECK(report.definition_coverage() == doctest::Approx(0.8));
  CHECK(enriched[0].definition == "Native definition 0.");
  CHECK(enriched[0].definition_source == DefinitionSource::kNative);
  CHECK(enriched[3].definition == "Fetched 3.");
  CHECK(enriched[3].definition_source == DefinitionSource::kExternal);
  CHECK_FALSE(enriched[9].definition.has_value());

  // A second pass changes nothing.
  EnrichmentReport again;
  CHECK(enrich_definitions(enriched, fetcher, &again) == enriched);
  CHECK(again.native == 2);
  CHECK(again.external == 6);

  const Ontology single({make("X", "entity 5")});
  EnrichmentReport one;
  enrich_definitions(single, fetcher, &one);
  CHECK(one.definition_coverage() == 1.0);
}

TEST_CASE("attach_contexts") {
  const Ontology ontology({make("A", "a"), make("B", "b"), make("C", "c")});
  ContextCorpus corpus;
  for (int i = 0; i < 5; ++i) corpus["A"].push_back("a sentence " + std::to_string(i) + ".");
  for (int i = 0; i < 100; ++i) corpus["B"].push_back("b sentence " + std::to_string(i) + ".");
  const Ontology out = attach_contexts(ontology, corpus, kMaxContexts, 3);
  CHECK(out[0].contexts == corpus["A"]);
  REQUIRE(out[1].contexts.size() == 20);
  CHECK(out[2].contexts.empty());
  // Sample keeps corpus order and has no repeats.
  std::vector<std::size_t> positions;
  for (const auto& s : out[1].contexts) {
    const auto it = std::find(corpus["B"].begin(), corpus["B"].end(), s);
    REQUIRE(it != corpus["B"].end());
    positions.push_back(static_cast<std::size_t>(it - corpus["B"].begin()));
  }
  CHECK(std::is_sorted(positions.begin(), positions.end()));
  CHECK(std::adjacent_find(positions.begin(), positions.end()) == positions.end());
  CHECK(attach_contexts(ontology, corpus, kMaxContexts, 3) == out);
  CHECK(attach_contexts(ontology, corpus, kMaxContexts, 4)[1].contexts != out[1].contexts);
  CHECK(attach_contexts(out, corpus, kMaxContexts, 3) == out);
}

TEST_CASE("context corpus parsing") {
  std::istringstream in(R"({"id": "A", "contexts": ["one.", "", "two."]})" "\n" R"({"id": "A", "contexts": ["three."]})" "\n");
  const ContextCorpus corpus = parse_context_corpus(in);
  CHECK(corpus.at("A") == std::vector<std::string>{"one.", "two.", "three."});
  std::istringstream bad(R"({"id": "A", "contexts": "x"})" "\n");
  CHECK_THROWS_AS(parse_context_corpus(bad), ParseError);
}

TEST_CASE("property: context cap and idempotence on random corpora") {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Ontology o = testing::random_ontology(rng, 20, 30);
    ContextCorpus corpus;
    for (const auto& e : o) {
      if (rng.bernoulli(0.5)) continue;
      const std::size_t n = rng.uniform_index(60);
      for (std::size_t i = 0; i < n; ++i) corpus[e.id].push_back(testing::random_phrase(rng, 30, 6) + ".");
    }
    const std::uint64_t seed = rng.next();
    const Ontology once = attach_contexts(o, corpus, kMaxContexts, seed);
    for (const auto& e : once) REQUIRE(e.contexts.size() <= kMaxContexts);
    REQUIRE(attach_contexts(once, corpus, kMaxContexts, seed) == once);
  }
}

TEST_CASE("live client against a local search endpoint") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::atomic<int> failures_left{2};
  server.Get("/w/api.php", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    const std::string q = req.get_param_value("gsrsearch");
    if (q == "flaky" && failures_left-- > 0) {
      res.status = 503;
      return;
    }
    nlohmann::json body;
    if (q == "Dentatorubral-pallidoluysian atrophy" || q == "flaky") {
      body["query"]["pages"]["2"] = {{"index", 2}, {"extract", "Second ranked. Ignore."}};
      body["query"]["pages"]["1"] = {{"index", 1}, {"extract", kDrplaSentence + " More text."}};
    } else {
      body["batchcomplete"] = "";
    }
    res.set_content(body.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  WikipediaDefinitionSource::Options options;
  options.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/w/api.php";
  options.rate_limit = std::chrono::milliseconds(1);
  options.initial_backoff = std::chrono::milliseconds(1);
  WikipediaDefinitionSource live(options);
  DefinitionFetcher fetcher(live);
  CHECK(fetcher.fetch("Dentatorubral-pallidoluysian atrophy") == kDrplaSentence);
  CHECK(fetcher.fetch("nothing here") == std::nullopt);
  CHECK(fetcher.fetch("flaky") == kDrplaSentence);
  CHECK(live.requests() == 5);
  CHECK(fetcher.fetch("Dentatorubral-pallidoluysian atrophy") == kDrplaSentence);
  CHECK(live.requests() == 5);

  server.stop();
  thread.join();

  // A dead endpoint gives up quietly after its retries.
  WikipediaDefinitionSource dead(options);
  CHECK(dead.lookup("anything") == std::nullopt);
  CHECK(dead.requests() == 4);
}

TEST_CASE("environment configuration") {
  unsetenv("ENRICH_ENDPOINT");
  CHECK_THROWS_AS(WikipediaDefinitionSource::from_environment(), ValidationError);
  setenv("ENRICH_ENDPOINT", "http://127.0.0.1:9/w/api.php", 1);
  setenv("ENRICH_RATE_MS", "abc", 1);
  CHECK_THROWS_AS(WikipediaDefinitionSource::from_environment(), ValidationError);
  setenv("ENRICH_RATE_MS", "5", 1);
  CHECK(WikipediaDefinitionSource::from_environment() != nullptr);
  unsetenv("ENRICH_ENDPOINT");
  unsetenv("ENRICH_RATE_MS");
}
