#include "ontomatch/dataset.hpp"

#include <cmath>
#include <iostream>
#include <optional>
#include <unordered_set>

#include "ontomatch/errors.hpp"
#include "ontomatch/io.hpp"
#include "ontomatch/log.hpp"
#include "ontomatch/unicode.hpp"

namespace ontomatch {

std::string_view to_string(ExampleKind kind) {
  switch (kind) {
    case ExampleKind::kPositive:
      return "positive";
    case ExampleKind::kEasyNegative:
      return "easy_negative";
    case ExampleKind::kHardNegative:
      return "hard_negative";
  }
  return "positive";
}

namespace {

std::unordered_set<std::string> surface_forms(const Entity& e) {
  std::unordered_set<std::string> out;
  out.insert(unicode::to_lower(e.name));
  for (const auto& a : e.aliases) out.insert(unicode::to_lower(a));
  return out;
}

}  // namespace

bool name_equivalent(const Entity& a, const Entity& b) {
  const auto fa = surface_forms(a);
  for (const auto& s : surface_forms(b)) {
    if (fa.contains(s)) return true;
  }
  return false;
}

std::vector<LabeledExample> extract_positives(const ReferenceAlignment& table, const Ontology& source,
                                              const Ontology& target) {
  std::vector<LabeledExample> out;
  for (const auto& pair : table.pairs()) {
    const Entity* s = source.find(pair.first);
    if (!s) throw ValidationError("alignment table references unknown source id '" + pair.first + "'");
    const Entity* t = target.find(pair.second);
    if (!t) throw ValidationError("alignment table references unknown target id '" + pair.second + "'");
    if (table.label(pair) != 1) continue;
    if (name_equivalent(*s, *t)) continue;
    out.push_back({pair.first, pair.second, 1, ExampleKind::kPositive});
  }
  return out;
}

namespace {

// Negatives grouped by the positive they were drawn for.
std::vector<std::vector<LabeledExample>> sample_grouped(const std::vector<LabeledExample>& positives,
                                                        const Ontology& source, const Ontology& target,
                                                        const CandidateIndex& index, Rng& rng, std::size_t k,
                                                        NegativeSamplingReport& report) {
  std::unordered_set<std::string> in_positive;
  for (const auto& p : positives) in_positive.insert(p.target_id);
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (!in_positive.contains(target[i].id)) pool.push_back(i);
  }

  std::vector<std::vector<LabeledExample>> out(positives.size());
  for (std::size_t pi = 0; pi < positives.size(); ++pi) {
    const auto& p = positives[pi];
    const Entity& s = source.at(p.source_id);
    std::optional<std::size_t> easy;
    if (!pool.empty()) {
      easy = pool[rng.uniform_index(pool.size())];
      out[pi].push_back({p.source_id, target[*easy].id, 0, ExampleKind::kEasyNegative});
    } else {
      ++report.easy_skipped;
      log_warning("no easy negative available for " + p.source_id + " -> " + p.target_id);
    }

    bool found_hard = false;
    for (const auto& c : index.select(s, k).candidates) {
      if (in_positive.contains(c.target_id)) continue;
      if (easy && c.target == *easy) continue;
      out[pi].push_back({p.source_id, c.target_id, 0, ExampleKind::kHardNegative});
      found_hard = true;
      break;
    }
    if (!found_hard) {
      ++report.hard_skipped;
      log_warning("no hard negative available for " + p.source_id + " -> " + p.target_id);
    }
  }
  return out;
}

}  // namespace

std::vector<LabeledExample> sample_negatives(const std::vector<LabeledExample>& positives,
                                             const Ontology& source, const Ontology& target,
                                             const CandidateIndex& index, Rng& rng, std::size_t k,
                                             NegativeSamplingReport* report) {
  NegativeSamplingReport local;
  std::vector<LabeledExample> out;
  for (auto& group : sample_grouped(positives, source, target, index, rng, k, local)) {
    for (auto& e : group) out.push_back(std::move(e));
  }
  if (report) *report = local;
  return out;
}

DatasetSplit split_examples(std::vector<LabeledExample> examples, std::uint64_t seed) {
  Rng rng(seed);
  rng.shuffle(std::span<LabeledExample>(examples));
  const std::size_t n = examples.size();
  // Integer arithmetic keeps the cut points exact: floor(0.64 n), floor(0.80 n).
  const std::size_t cut_train = n * 64 / 100;
  const std::size_t cut_dev = n * 80 / 100;
  DatasetSplit split;
  split.seed = seed;
  split.train.assign(examples.begin(), examples.begin() + static_cast<std::ptrdiff_t>(cut_train));
  split.dev.assign(examples.begin() + static_cast<std::ptrdiff_t>(cut_train),
                   examples.begin() + static_cast<std::ptrdiff_t>(cut_dev));
  split.test.assign(examples.begin() + static_cast<std::ptrdiff_t>(cut_dev), examples.end());
  return split;
}

std::vector<LabeledExample> derive_examples(const ReferenceAlignment& table, const Ontology& source,
                                            const Ontology& target, std::uint64_t seed, std::size_t k,
                                            NegativeSamplingReport* report) {
  const auto positives = extract_positives(table, source, target);
  const CandidateIndex index(target);
  Rng rng(seed);
  NegativeSamplingReport local;
  const auto groups = sample_grouped(positives, source, target, index, rng, k, local);
  std::vector<LabeledExample> out;
  out.reserve(positives.size() * 3);
  for (std::size_t i = 0; i < positives.size(); ++i) {
    out.push_back(positives[i]);
    out.insert(out.end(), groups[i].begin(), groups[i].end());
  }
  if (report) *report = local;
  return out;
}

void write_examples(const std::vector<LabeledExample>& examples, std::ostream& out) {
  for (const auto& e : examples) {
    out << e.source_id << '\t' << e.target_id << '\t' << e.label << '\t' << to_string(e.kind) << '\n';
  }
  check_written(out, "labeled examples");
}

void write_examples_file(const std::vector<LabeledExample>& examples, const std::string& path) {
  auto out = open_output(path);
  write_examples(examples, out);
}

std::vector<LabeledExample> parse_examples(std::istream& in) {
  std::vector<LabeledExample> out;
  std::string buf;
  std::size_t line_no = 0;
  while (std::getline(in, buf)) {
    ++line_no;
    std::string_view line = buf;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto cols = split_tabs(line);
    if (cols.size() != 4) throw ParseError("expected 4 tab-separated columns", line_no);
    LabeledExample e;
    e.source_id = std::string(cols[0]);
    e.target_id = std::string(cols[1]);
    if (cols[2] == "1") {
      e.label = 1;
    } else if (cols[2] == "0") {
      e.label = 0;
    } else {
      throw ParseError("label must be 0 or 1", line_no);
    }
    if (cols[3] == "positive") {
      e.kind = ExampleKind::kPositive;
    } else if (cols[3] == "easy_negative") {
      e.kind = ExampleKind::kEasyNegative;
    } else if (cols[3] == "hard_negative") {
      e.kind = ExampleKind::kHardNegative;
    } else {
      throw ParseError("unknown example kind '" + std::string(cols[3]) + "'", line_no);
    }
    if ((e.label == 1) != (e.kind == ExampleKind::kPositive)) {
      throw ParseError("label and kind disagree", line_no);
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<LabeledExample> read_examples_file(const std::string& path) {
  auto in = open_input(path);
  return parse_examples(in);
}

}  // namespace ontomatch
