#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ontomatch/kb.hpp"

namespace ontomatch {

// Prefix of `text` through the first '.', '!' or '?' that is followed by
// whitespace or the end of text. Periods inside a number or closing one of
// e.g. / i.e. / etc. / Dr. / vs. / approx. do not end a sentence. Without a
// terminator the whole (trimmed) text is returned.
std::string first_sentence(std::string_view text);

// Resolves a search query to the lead text of the top-ranked article.
class DefinitionProvider {
 public:
  virtual ~DefinitionProvider() = default;
  virtual std::optional<std::string> lookup(const std::string& query) = 0;
};

// Offline source backed by a query -> lead map. Never touches the network.
class FixtureDefinitionSource : public DefinitionProvider {
 public:
  FixtureDefinitionSource() = default;
  explicit FixtureDefinitionSource(std::unordered_map<std::string, std::string> leads)
      : leads_(std::move(leads)) {}

  // JSON-lines of {"query": text, "lead": text}.
  static FixtureDefinitionSource parse(std::istream& in);
  static FixtureDefinitionSource load(const std::string& path);

  void add(std::string query, std::string lead) { leads_[std::move(query)] = std::move(lead); }
  std::optional<std::string> lookup(const std::string& query) override;
  std::size_t calls() const { return calls_; }

 private:
  std::unordered_map<std::string, std::string> leads_;
  std::size_t calls_ = 0;
};

// MediaWiki-style search API client: one generator=search query with
// prop=extracts, taking the page with the lowest search index. Calls are
// spaced by the rate limit; failed requests retry three times with backoff
// before giving up with a warning.
class WikipediaDefinitionSource : public DefinitionProvider {
 public:
  struct Options {
    std::string endpoint;  // e.g. https://en.wikipedia.org/w/api.php
    std::chrono::milliseconds rate_limit{100};
    std::chrono::milliseconds initial_backoff{200};
    int retries = 3;
    std::chrono::seconds timeout{10};
  };

  explicit WikipediaDefinitionSource(Options options);
  // Reads ENRICH_ENDPOINT (required) and ENRICH_RATE_MS (optional).
  static std::unique_ptr<WikipediaDefinitionSource> from_environment();

  std::optional<std::string> lookup(const std::string& query) override;
  std::size_t requests() const { return requests_; }

 private:
  std::optional<std::string> request_once(const std::string& query, bool& transport_error);
  void wait_for_slot();

  Options options_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point last_call_{};
  std::size_t requests_ = 0;
};

// Caches first-sentence definitions per query string. Thread-safe.
class DefinitionFetcher {
 public:
  explicit DefinitionFetcher(DefinitionProvider& source) : source_(source) {}

  std::optional<std::string> fetch(const std::string& name);

  std::size_t cache_hits() const { return hits_; }
  std::size_t source_calls() const { return misses_; }

 private:
  DefinitionProvider& source_;
  std::mutex mu_;
  std::unordered_map<std::string, std::optional<std::string>> cache_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

struct EnrichmentReport {
  std::size_t native = 0;
  std::size_t external = 0;
  std::size_t none = 0;

  std::size_t total() const { return native + external + none; }
  // Share of entities that end up with any definition.
  double definition_coverage() const {
    return total() == 0 ? 0.0 : static_cast<double>(native + external) / static_cast<double>(total());
  }
};

// Fills missing definitions from `fetcher`; native definitions are kept.
Ontology enrich_definitions(const Ontology& ontology, DefinitionFetcher& fetcher,
                            EnrichmentReport* report = nullptr);

// entity id -> context sentences, in corpus order.
using ContextCorpus = std::unordered_map<std::string, std::vector<std::string>>;

// JSON-lines of {"id": entity_id, "contexts": [sentence, ...]}. Repeated ids
// append. Empty sentences are dropped.
ContextCorpus parse_context_corpus(std::istream& in);
ContextCorpus load_context_corpus(const std::string& path);

inline constexpr std::size_t kMaxContexts = 20;

// Entities present in the corpus get its sentences as contexts: all of them
// when at most `max_contexts`, otherwise a seeded sample of exactly
// `max_contexts` kept in corpus order. Other entities are untouched.
Ontology attach_contexts(const Ontology& ontology, const ContextCorpus& corpus,
                         std::size_t max_contexts = kMaxContexts, std::uint64_t seed = 0);

}  // namespace ontomatch
