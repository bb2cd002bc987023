#include "ontomatch/enrichment.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <istream>
#include <thread>

#ifdef ONTOMATCH_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"
#include "json.hpp"

#include "ontomatch/errors.hpp"
#include "ontomatch/io.hpp"
#include "ontomatch/log.hpp"
#include "ontomatch/random.hpp"
#include "ontomatch/unicode.hpp"

namespace ontomatch {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ascii_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_abbreviation(std::string_view text, std::size_t period) {
  static constexpr std::array<std::string_view, 6> kAbbreviations = {"e.g.", "i.e.", "etc.", "dr.", "vs.",
                                                                     "approx."};
  std::size_t start = period;
  while (start > 0 && !is_ascii_space(text[start - 1])) --start;
  while (start < period && (text[start] == '(' || text[start] == '[' || text[start] == '"')) ++start;
  const std::string word = unicode::to_lower(text.substr(start, period - start + 1));
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) != kAbbreviations.end();
}

}  // namespace

std::string first_sentence(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    const bool at_end = i + 1 == text.size();
    if (!at_end && !is_ascii_space(text[i + 1])) continue;
    if (c == '.') {
      if (i > 0 && !at_end && is_digit(text[i - 1]) && is_digit(text[i + 1])) continue;
      if (is_abbreviation(text, i)) continue;
    }
    return unicode::trim(text.substr(0, i + 1));
  }
  return unicode::trim(text);
}

FixtureDefinitionSource FixtureDefinitionSource::parse(std::istream& in) {
  FixtureDefinitionSource out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (unicode::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("query") || !j["query"].is_string() || !j.contains("lead") ||
        !j["lead"].is_string()) {
      throw ParseError("definition fixture lines need string fields 'query' and 'lead'", line_no);
    }
    out.add(j["query"].get<std::string>(), j["lead"].get<std::string>());
  }
  return out;
}

FixtureDefinitionSource FixtureDefinitionSource::load(const std::string& path) {
  auto in = open_input(path);
  return parse(in);
}

std::optional<std::string> FixtureDefinitionSource::lookup(const std::string& query) {
  ++calls_;
  auto it = leads_.find(query);
  if (it == leads_.end()) return std::nullopt;
  return it->second;
}

WikipediaDefinitionSource::WikipediaDefinitionSource(Options options) : options_(std::move(options)) {
  const std::string& url = options_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ValidationError("enrichment endpoint must be an absolute URL");
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

std::unique_ptr<WikipediaDefinitionSource> WikipediaDefinitionSource::from_environment() {
  const char* endpoint = std::getenv("ENRICH_ENDPOINT");
  if (!endpoint || std::string_view(endpoint).empty()) {
    throw ValidationError("live enrichment needs ENRICH_ENDPOINT");
  }
  Options options;
  options.endpoint = endpoint;
  if (const char* rate = std::getenv("ENRICH_RATE_MS")) {
    try {
      options.rate_limit = std::chrono::milliseconds(std::stoll(rate));
    } catch (const std::exception&) {
      throw ValidationError("ENRICH_RATE_MS must be an integer");
    }
  }
  return std::make_unique<WikipediaDefinitionSource>(std::move(options));
}

void WikipediaDefinitionSource::wait_for_slot() {
  const auto now = std::chrono::steady_clock::now();
  const auto ready = last_call_ + options_.rate_limit;
  if (last_call_.time_since_epoch().count() != 0 && now < ready) std::this_thread::sleep_for(ready - now);
  last_call_ = std::chrono::steady_clock::now();
}

std::optional<std::string> WikipediaDefinitionSource::request_once(const std::string& query,
                                                                   bool& transport_error) {
  transport_error = false;
  httplib::Client client(origin_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_follow_location(true);
  const httplib::Params params = {
      {"action", "query"},   {"format", "json"},     {"generator", "search"}, {"gsrsearch", query},
      {"gsrlimit", "1"},     {"prop", "extracts"},   {"exintro", "1"},        {"explaintext", "1"},
      {"redirects", "1"}};
  ++requests_;
  auto res = client.Get(path_, params, httplib::Headers{{"User-Agent", "ontomatch-enrichment/1.0"}});
  if (!res || res->status >= 500 || res->status == 429) {
    transport_error = true;
    return std::nullopt;
  }
  if (res->status != 200) return std::nullopt;
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error&) {
    transport_error = true;
    return std::nullopt;
  }
  const auto pages = body.find("query");
  if (pages == body.end() || !pages->contains("pages")) return std::nullopt;
  const nlohmann::json* best = nullptr;
  long best_index = 0;
  for (const auto& page : (*pages)["pages"]) {
    const long index = page.value("index", 0L);
    if (!best || index < best_index) {
      best = &page;
      best_index = index;
    }
  }
  if (!best || !best->contains("extract") || !(*best)["extract"].is_string()) return std::nullopt;
  std::string extract = (*best)["extract"].get<std::string>();
  if (unicode::trim(extract).empty()) return std::nullopt;
  return extract;
}

std::optional<std::string> WikipediaDefinitionSource::lookup(const std::string& query) {
  std::lock_guard lock(mu_);
  auto backoff = options_.initial_backoff;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    wait_for_slot();
    bool transport_error = false;
    auto result = request_once(query, transport_error);
    if (!transport_error) return result;
    if (attempt < options_.retries) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  log_warning("definition lookup failed after retries: " + query);
  return std::nullopt;
}

std::optional<std::string> DefinitionFetcher::fetch(const std::string& name) {
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(name);
    if (it != cache_.end()) {
      ++hits_;
      return it->second;
    }
    ++misses_;
  }
  std::optional<std::string> result;
  if (auto lead = source_.lookup(name)) {
    std::string sentence = first_sentence(*lead);
    if (!sentence.empty()) result = std::move(sentence);
  }
  std::lock_guard lock(mu_);
  cache_.emplace(name, result);
  return result;
}

Ontology enrich_definitions(const Ontology& ontology, DefinitionFetcher& fetcher, EnrichmentReport* report) {
  EnrichmentReport local;
  std::vector<Entity> entities = ontology.entities();
  for (auto& e : entities) {
    if (e.definition) {
      if (e.definition_source == DefinitionSource::kExternal) {
        ++local.external;
      } else {
        ++local.native;
      }
      continue;
    }
    if (auto def = fetcher.fetch(e.name)) {
      e.definition = std::move(*def);
      e.definition_source = DefinitionSource::kExternal;
      ++local.external;
    } else {
      ++local.none;
    }
  }
  if (report) *report = local;
  return Ontology(std::move(entities));
}

ContextCorpus parse_context_corpus(std::istream& in) {
  ContextCorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (unicode::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("contexts") ||
        !j["contexts"].is_array()) {
      throw ParseError("context corpus lines need 'id' (string) and 'contexts' (array)", line_no);
    }
    auto& list = corpus[j["id"].get<std::string>()];
    for (const auto& s : j["contexts"]) {
      if (!s.is_string()) throw ParseError("contexts must be strings", line_no);
      std::string sentence = unicode::trim(s.get<std::string>());
      if (!sentence.empty()) list.push_back(std::move(sentence));
    }
  }
  return corpus;
}

ContextCorpus load_context_corpus(const std::string& path) {
  auto in = open_input(path);
  return parse_context_corpus(in);
}

Ontology attach_contexts(const Ontology& ontology, const ContextCorpus& corpus, std::size_t max_contexts,
                         std::uint64_t seed) {
  std::vector<Entity> entities = ontology.entities();
  for (auto& e : entities) {
    auto it = corpus.find(e.id);
    if (it == corpus.end() || it->second.empty()) continue;
    const auto& sentences = it->second;
    if (sentences.size() <= max_contexts) {
      e.contexts = sentences;
      continue;
    }
    // Partial Fisher-Yates over positions, then restore corpus order.
    Rng rng(mix_seed(seed, stable_hash(e.id)));
    std::vector<std::size_t> positions(sentences.size());
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
    for (std::size_t i = 0; i < max_contexts; ++i) {
      const std::size_t j = i + rng.uniform_index(positions.size() - i);
      std::swap(positions[i], positions[j]);
    }
    positions.resize(max_contexts);
    std::sort(positions.begin(), positions.end());
    e.contexts.clear();
    for (std::size_t p : positions) e.contexts.push_back(sentences[p]);
  }
  return Ontology(std::move(entities));
}

}  // namespace ontomatch
