#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <iterator>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ontomatch/kb.hpp"

namespace ontomatch {

// Engineered pair features: 4 channels x 8 metrics, channel-major.
//
//   channel 0  canonical names
//   channel 1  best alias pair over (name + aliases) x (name + aliases)
//   channel 2  definitions
//   channel 3  pooled name/alias tokens, compared as sorted space-joined lists
//
//   metric  0 token Jaccard          4 exact lowercase equality
//           1 stemmed-token Jaccard  5 stemmed final token equality
//           2 char 4-gram Jaccard    6 prefix containment (either way)
//           3 char 5-gram Jaccard    7 edit similarity
//
// The layout is part of the model file contract; do not reorder.
inline constexpr int kChannelCount = 4;
inline constexpr int kMetricCount = 8;
inline constexpr int kFeatureCount = kChannelCount * kMetricCount;

enum class Channel : int { kName = 0, kAlias = 1, kDefinition = 2, kPooled = 3 };
enum class Metric : int {
  kTokenJaccard = 0,
  kStemJaccard = 1,
  kChar4Jaccard = 2,
  kChar5Jaccard = 3,
  kExactMatch = 4,
  kRootWordMatch = 5,
  kPrefix = 6,
  kEditSimilarity = 7,
};

constexpr int feature_index(Channel c, Metric m) {
  return static_cast<int>(c) * kMetricCount + static_cast<int>(m);
}
constexpr bool is_boolean_metric(Metric m) {
  return m == Metric::kExactMatch || m == Metric::kRootWordMatch || m == Metric::kPrefix;
}
std::string feature_name(int index);

using FeatureVector = Eigen::Matrix<double, kFeatureCount, 1>;
using MetricVector = std::array<double, kMetricCount>;

// |a ∩ b| / |a ∪ b| over sorted ranges of unique elements; 1.0 when both are empty.
template <typename SortedRange>
double jaccard(const SortedRange& a, const SortedRange& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t total = static_cast<std::size_t>(std::distance(a.begin(), a.end())) +
                            static_cast<std::size_t>(std::distance(b.begin(), b.end())) - common;
  return static_cast<double>(common) / static_cast<double>(total);
}

// Set of length-n windows over the lowercased, whitespace-collapsed string.
std::set<std::string> char_ngrams(std::string_view text, std::size_t n);

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
// 1 - levenshtein / max length, over codepoints; 1.0 when both are empty.
double edit_similarity(std::string_view a, std::string_view b);

// The eight metrics for one pair of strings.
MetricVector string_metrics(std::string_view a, std::string_view b);

FeatureVector compute_features(const Entity& source, const Entity& target);

}  // namespace ontomatch
