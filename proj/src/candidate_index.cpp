#include "ontomatch/candidate_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ontomatch/errors.hpp"
#include "ontomatch/unicode.hpp"

namespace ontomatch {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t cp : unicode::decode(text)) {
    if (unicode::is_alnum(cp)) {
      unicode::append_utf8(current, unicode::to_lower(cp));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

namespace {

void sort_unique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::vector<std::string> token_set(std::string_view text) {
  auto tokens = tokenize(text);
  sort_unique(tokens);
  return tokens;
}

std::vector<std::string> entity_document(const Entity& entity) {
  std::vector<std::string> doc = tokenize(entity.name);
  for (const auto& alias : entity.aliases) {
    auto t = tokenize(alias);
    doc.insert(doc.end(), t.begin(), t.end());
  }
  if (entity.definition) {
    auto t = tokenize(*entity.definition);
    doc.insert(doc.end(), t.begin(), t.end());
  }
  sort_unique(doc);
  return doc;
}

CandidateIndex::CandidateIndex(const Ontology& target) {
  if (target.empty()) throw ValidationError("cannot build a candidate index over an empty ontology");
  ids_.reserve(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    ids_.push_back(target[i].id);
    for (auto& token : entity_document(target[i])) {
      postings_[std::move(token)].docs.push_back(static_cast<std::uint32_t>(i));
    }
  }
  const double n = static_cast<double>(ids_.size());
  for (auto& [token, e] : postings_) e.idf = std::log(n / static_cast<double>(e.docs.size()));
}

const CandidateIndex::Entry& CandidateIndex::entry(std::string_view token) const {
  auto it = postings_.find(std::string(token));
  if (it == postings_.end()) throw std::out_of_range("token '" + std::string(token) + "' is not indexed");
  return it->second;
}

bool CandidateIndex::contains(std::string_view token) const {
  return postings_.find(std::string(token)) != postings_.end();
}

std::size_t CandidateIndex::df(std::string_view token) const { return entry(token).docs.size(); }

const std::vector<std::uint32_t>& CandidateIndex::postings(std::string_view token) const {
  return entry(token).docs;
}

double CandidateIndex::idf(std::string_view token) const { return entry(token).idf; }

CandidateList CandidateIndex::select(const Entity& source, std::size_t k) const {
  CandidateList out;
  out.source_id = source.id;
  if (k == 0) return out;

  thread_local std::vector<double> scores;
  thread_local std::vector<char> seen;
  scores.assign(ids_.size(), 0.0);
  seen.assign(ids_.size(), 0);
  std::vector<std::uint32_t> touched;

  // Tokens are visited in sorted order so every target's sum is accumulated
  // in a fixed order.
  for (const auto& token : entity_document(source)) {
    auto it = postings_.find(token);
    if (it == postings_.end()) continue;
    for (std::uint32_t doc : it->second.docs) {
      if (!seen[doc]) {
        seen[doc] = 1;
        touched.push_back(doc);
      }
      scores[doc] += it->second.idf;
    }
  }

  auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids_[a] < ids_[b];
  };
  const std::size_t take = std::min(k, touched.size());
  std::partial_sort(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(take), touched.end(),
                    better);
  out.candidates.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const auto doc = touched[i];
    out.candidates.push_back({ids_[doc], doc, scores[doc]});
  }
  return out;
}

}  // namespace ontomatch
