#include "ontomatch/string_features.hpp"

#include <algorithm>

#include "ontomatch/candidate_index.hpp"
#include "ontomatch/porter_stemmer.hpp"
#include "ontomatch/unicode.hpp"

namespace ontomatch {

std::string feature_name(int index) {
  static constexpr std::array<const char*, kChannelCount> kChannels = {"name", "alias", "definition",
                                                                      "pooled"};
  static constexpr std::array<const char*, kMetricCount> kMetrics = {
      "token_jaccard", "stem_jaccard", "char4_jaccard", "char5_jaccard",
      "exact",         "root_word",    "prefix",        "edit_similarity"};
  return std::string(kChannels[static_cast<std::size_t>(index / kMetricCount)]) + "." +
         kMetrics[static_cast<std::size_t>(index % kMetricCount)];
}

std::set<std::string> char_ngrams(std::string_view text, std::size_t n) {
  std::set<std::string> out;
  if (n == 0) return out;
  const std::u32string cps = unicode::decode(unicode::normalize_spaces(text));
  if (cps.size() < n) return out;
  for (std::size_t i = 0; i + n <= cps.size(); ++i) {
    out.insert(unicode::encode(std::u32string_view(cps).substr(i, n)));
  }
  return out;
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0u : 1u)});
      diag = up;
    }
  }
  return row[b.size()];
}

double edit_similarity(std::string_view a, std::string_view b) {
  const std::u32string ca = unicode::decode(a);
  const std::u32string cb = unicode::decode(b);
  const std::size_t longest = std::max(ca.size(), cb.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(ca, cb)) / static_cast<double>(longest);
}

namespace {

std::vector<std::string> stems_of(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(porter_stem(t));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string final_stem(std::string_view text) {
  const auto tokens = tokenize(text);
  return tokens.empty() ? std::string() : porter_stem(tokens.back());
}

std::string join_sorted(std::vector<std::string> tokens) {
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

void put(FeatureVector& f, Channel c, const MetricVector& m) {
  for (int i = 0; i < kMetricCount; ++i) f(feature_index(c, static_cast<Metric>(i))) = m[static_cast<std::size_t>(i)];
}

}  // namespace

MetricVector string_metrics(std::string_view a, std::string_view b) {
  const auto ta = token_set(a);
  const auto tb = token_set(b);
  const std::string na = unicode::normalize_spaces(a);
  const std::string nb = unicode::normalize_spaces(b);
  MetricVector m{};
  m[0] = jaccard(ta, tb);
  m[1] = jaccard(stems_of(ta), stems_of(tb));
  m[2] = jaccard(char_ngrams(na, 4), char_ngrams(nb, 4));
  m[3] = jaccard(char_ngrams(na, 5), char_ngrams(nb, 5));
  m[4] = na == nb ? 1.0 : 0.0;
  m[5] = final_stem(a) == final_stem(b) ? 1.0 : 0.0;
  m[6] = (na.starts_with(nb) || nb.starts_with(na)) ? 1.0 : 0.0;
  m[7] = edit_similarity(na, nb);
  return m;
}

FeatureVector compute_features(const Entity& source, const Entity& target) {
  FeatureVector f = FeatureVector::Zero();
  put(f, Channel::kName, string_metrics(source.name, target.name));

  // Best alias pair: the lexicographically largest metric vector, which is
  // led by token Jaccard and does not depend on argument order.
  std::vector<std::string_view> sa{source.name};
  for (const auto& a : source.aliases) sa.emplace_back(a);
  std::vector<std::string_view> ta{target.name};
  for (const auto& a : target.aliases) ta.emplace_back(a);
  MetricVector best{};
  bool first = true;
  for (auto a : sa) {
    for (auto b : ta) {
      const MetricVector m = string_metrics(a, b);
      if (first || m > best) best = m;
      first = false;
    }
  }
  put(f, Channel::kAlias, best);

  if (source.definition || target.definition) {
    const std::string_view da = source.definition ? std::string_view(*source.definition) : std::string_view();
    const std::string_view db = target.definition ? std::string_view(*target.definition) : std::string_view();
    MetricVector m = string_metrics(da, db);
    if (!source.definition || !target.definition) {
      m[4] = m[5] = m[6] = 0.0;
    }
    put(f, Channel::kDefinition, m);
  }

  auto pooled = [](const Entity& e) {
    std::vector<std::string> tokens = tokenize(e.name);
    for (const auto& a : e.aliases) {
      auto t = tokenize(a);
      tokens.insert(tokens.end(), t.begin(), t.end());
    }
    return join_sorted(std::move(tokens));
  };
  put(f, Channel::kPooled, string_metrics(pooled(source), pooled(target)));
  return f;
}

}  // namespace ontomatch
