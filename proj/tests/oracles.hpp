#pragma once

// Brute-force reference implementations used to check the library.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ontomatch/kb.hpp"

namespace oracle {

// ASCII letters/digits plus any non-ASCII byte count as word characters.
inline std::set<std::string> tokens(const std::string& text) {
  std::set<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.insert(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.insert(cur);
  return out;
}

inline std::set<std::string> document(const ontomatch::Entity& e) {
  std::set<std::string> doc = tokens(e.name);
  for (const auto& a : e.aliases) {
    const auto t = tokens(a);
    doc.insert(t.begin(), t.end());
  }
  if (e.definition) {
    const auto t = tokens(*e.definition);
    doc.insert(t.begin(), t.end());
  }
  return doc;
}

struct Scored {
  std::string target_id;
  double idf_total;
};

// Scores every target against the source and ranks them.
inline std::vector<Scored> rank_candidates(const ontomatch::Ontology& target, const ontomatch::Entity& source) {
  std::vector<std::set<std::string>> docs;
  std::map<std::string, int> df;
  for (const auto& t : target) {
    docs.push_back(document(t));
    for (const auto& w : docs.back()) ++df[w];
  }
  const double n = static_cast<double>(target.size());
  const std::set<std::string> s = document(source);
  std::vector<Scored> out;
  for (std::size_t i = 0; i < target.size(); ++i) {
    double total = 0.0;
    bool shared = false;
    for (const auto& w : docs[i]) {  // sorted order
      if (!s.count(w)) continue;
      shared = true;
      total += std::log(n / df[w]);
    }
    if (shared) out.push_back({target[i].id, total});
  }
  std::sort(out.begin(), out.end(), [](const Scored& a, const Scored& b) {
    if (a.idf_total != b.idf_total) return a.idf_total > b.idf_total;
    return a.target_id < b.target_id;
  });
  return out;
}

inline std::size_t levenshtein(const std::u32string& a, const std::u32string& b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  const std::size_t c = levenshtein(a.substr(1), b.substr(1)) + (a[0] != b[0]);
  return std::min({c, levenshtein(a.substr(1), b) + 1, levenshtein(a, b.substr(1)) + 1});
}

}  // namespace oracle
