#include "ontomatch/kb.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "json.hpp"

#include "ontomatch/errors.hpp"
#include "ontomatch/io.hpp"
#include "ontomatch/unicode.hpp"

namespace ontomatch {

using nlohmann::json;

Entity validate_entity(RawEntity raw) {
  Entity e;
  e.id = unicode::trim(raw.id);
  if (e.id.empty()) throw ValidationError("entity id is empty");
  e.name = unicode::trim(raw.name);
  if (e.name.empty()) throw ValidationError("entity '" + e.id + "' has an empty name");

  std::unordered_set<std::string> seen;
  for (const auto& alias : raw.aliases) {
    std::string trimmed = unicode::trim(alias);
    if (trimmed.empty()) continue;
    if (seen.insert(unicode::to_lower(trimmed)).second) e.aliases.push_back(std::move(trimmed));
  }
  if (raw.definition) {
    std::string def = unicode::trim(*raw.definition);
    if (!def.empty()) e.definition = std::move(def);
  }
  if (e.definition) {
    e.definition_source = raw.definition_source.value_or(DefinitionSource::kNative);
    if (e.definition_source == DefinitionSource::kNone) e.definition_source = DefinitionSource::kNative;
  }
  for (const auto& ctx : raw.contexts) {
    std::string trimmed = unicode::trim(ctx);
    if (!trimmed.empty()) e.contexts.push_back(std::move(trimmed));
  }
  return e;
}

Ontology::Ontology(std::vector<Entity> entities) : entities_(std::move(entities)) {
  index_.reserve(entities_.size());
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    if (!index_.emplace(entities_[i].id, i).second) throw DuplicateIdError(entities_[i].id);
  }
}

std::optional<std::size_t> Ontology::position(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Entity* Ontology::find(std::string_view id) const {
  auto pos = position(id);
  return pos ? &entities_[*pos] : nullptr;
}

const Entity& Ontology::at(std::string_view id) const {
  return entities_[index_of(id)];
}

std::size_t Ontology::index_of(std::string_view id) const {
  auto pos = position(id);
  if (!pos) throw ValidationError("unknown entity id '" + std::string(id) + "'");
  return *pos;
}

void ReferenceAlignment::add(std::string source_id, std::string target_id, int label) {
  if (label != 0 && label != 1) throw ValidationError("reference label must be 0 or 1");
  IdPair key{std::move(source_id), std::move(target_id)};
  auto [it, inserted] = labels_.emplace(key, label);
  if (inserted) {
    pairs_.push_back(std::move(key));
  } else {
    it->second = label;
  }
}

std::optional<int> ReferenceAlignment::label(const IdPair& pair) const {
  auto it = labels_.find(pair);
  if (it == labels_.end()) return std::nullopt;
  return it->second;
}

std::set<IdPair> ReferenceAlignment::positives() const {
  std::set<IdPair> out;
  for (const auto& [pair, label] : labels_) {
    if (label == 1) out.insert(pair);
  }
  return out;
}

std::string_view to_string(Provenance p) {
  return p == Provenance::kExactMatch ? "exact_match" : "model";
}

std::string_view to_string(DefinitionSource s) {
  switch (s) {
    case DefinitionSource::kNative:
      return "native";
    case DefinitionSource::kExternal:
      return "external";
    case DefinitionSource::kNone:
      break;
  }
  return "none";
}

std::int64_t score_units(double score) {
  // nearbyint honours the default round-to-nearest-even mode.
  return static_cast<std::int64_t>(std::nearbyint(score * 10000.0));
}

std::string format_score(double score) {
  const std::int64_t units = score_units(score);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%lld.%04lld", units < 0 ? "-" : "",
                static_cast<long long>(std::llabs(units) / 10000),
                static_cast<long long>(std::llabs(units) % 10000));
  return buf;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

namespace {

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

std::vector<std::string> string_array(const json& obj, const char* key, std::size_t line) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) throw ParseError(std::string("'") + key + "' must be an array of strings", line);
  for (const auto& v : *it) {
    if (!v.is_string()) throw ParseError(std::string("'") + key + "' must be an array of strings", line);
    out.push_back(v.get<std::string>());
  }
  return out;
}

RawEntity raw_from_json(const json& obj, std::size_t line) {
  if (!obj.is_object()) throw ParseError("expected a JSON object", line);
  RawEntity raw;
  auto id = obj.find("id");
  if (id == obj.end() || !id->is_string()) throw ParseError("missing string field 'id'", line);
  raw.id = id->get<std::string>();
  auto name = obj.find("name");
  if (name == obj.end() || !name->is_string()) throw ParseError("missing string field 'name'", line);
  raw.name = name->get<std::string>();
  raw.aliases = string_array(obj, "aliases", line);
  raw.contexts = string_array(obj, "contexts", line);
  if (auto def = obj.find("definition"); def != obj.end() && !def->is_null()) {
    if (!def->is_string()) throw ParseError("'definition' must be a string", line);
    raw.definition = def->get<std::string>();
  }
  if (auto src = obj.find("definition_source"); src != obj.end() && !src->is_null()) {
    const std::string s = src->is_string() ? src->get<std::string>() : "";
    if (s == "native") {
      raw.definition_source = DefinitionSource::kNative;
    } else if (s == "external") {
      raw.definition_source = DefinitionSource::kExternal;
    } else {
      throw ParseError("'definition_source' must be \"native\" or \"external\"", line);
    }
  }
  return raw;
}

}  // namespace

Ontology parse_kb(std::istream& in) {
  std::vector<Entity> entities;
  std::unordered_set<std::string> ids;
  std::string buf;
  std::size_t line_no = 0;
  while (std::getline(in, buf)) {
    ++line_no;
    const std::string_view line = strip_cr(buf);
    if (is_blank(line)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    Entity entity;
    try {
      entity = validate_entity(raw_from_json(obj, line_no));
    } catch (const ParseError&) {
      throw;
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
    if (!ids.insert(entity.id).second) throw DuplicateIdError(entity.id);
    entities.push_back(std::move(entity));
  }
  if (in.bad()) throw IoError("read error while parsing KB");
  return Ontology(std::move(entities));
}

Ontology read_kb_file(const std::string& path) {
  auto in = open_input(path);
  return parse_kb(in);
}

void write_kb(const Ontology& ontology, std::ostream& out) {
  for (const auto& e : ontology) {
    nlohmann::ordered_json obj;
    obj["id"] = e.id;
    obj["name"] = e.name;
    if (!e.aliases.empty()) obj["aliases"] = e.aliases;
    if (e.definition) {
      obj["definition"] = *e.definition;
      if (e.definition_source == DefinitionSource::kExternal) obj["definition_source"] = "external";
    }
    if (!e.contexts.empty()) obj["contexts"] = e.contexts;
    out << obj.dump() << '\n';
  }
  check_written(out, "KB");
}

void write_kb_file(const Ontology& ontology, const std::string& path) {
  auto out = open_output(path);
  write_kb(ontology, out);
}

void sort_alignments(std::vector<Alignment>& alignments) {
  std::stable_sort(alignments.begin(), alignments.end(), [](const Alignment& a, const Alignment& b) {
    if (a.source_id != b.source_id) return a.source_id < b.source_id;
    const auto sa = score_units(a.score);
    const auto sb = score_units(b.score);
    if (sa != sb) return sa > sb;
    return a.target_id < b.target_id;
  });
}

void write_alignment(std::span<const Alignment> alignments, std::ostream& out) {
  std::vector<Alignment> sorted(alignments.begin(), alignments.end());
  sort_alignments(sorted);
  for (const auto& a : sorted) {
    out << a.source_id << '\t' << a.target_id << '\t' << format_score(a.score) << '\t'
        << to_string(a.provenance) << '\n';
  }
  check_written(out, "alignment");
}

void write_alignment_file(std::span<const Alignment> alignments, const std::string& path) {
  auto out = open_output(path);
  write_alignment(alignments, out);
}

namespace {

double parse_score(std::string_view text, std::size_t line) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ParseError("bad score '" + std::string(text) + "'", line);
  if (!(value >= 0.0 && value <= 1.0)) throw ParseError("score outside [0,1]", line);
  return value;
}

}  // namespace

std::vector<Alignment> parse_alignment(std::istream& in) {
  std::vector<Alignment> out;
  std::string buf;
  std::size_t line_no = 0;
  while (std::getline(in, buf)) {
    ++line_no;
    const std::string_view line = strip_cr(buf);
    if (line.empty()) continue;
    const auto cols = split_tabs(line);
    if (cols.size() != 4) throw ParseError("expected 4 tab-separated columns", line_no);
    Alignment a;
    a.source_id = std::string(cols[0]);
    a.target_id = std::string(cols[1]);
    if (a.source_id.empty() || a.target_id.empty()) throw ParseError("empty entity id", line_no);
    a.score = static_cast<double>(score_units(parse_score(cols[2], line_no))) / 10000.0;
    if (cols[3] == "exact_match") {
      a.provenance = Provenance::kExactMatch;
    } else if (cols[3] == "model") {
      a.provenance = Provenance::kModel;
    } else {
      throw ParseError("unknown provenance '" + std::string(cols[3]) + "'", line_no);
    }
    out.push_back(std::move(a));
  }
  if (in.bad()) throw IoError("read error while parsing alignment");
  return out;
}

std::vector<Alignment> read_alignment_file(const std::string& path) {
  auto in = open_input(path);
  return parse_alignment(in);
}

ReferenceAlignment parse_reference(std::istream& in) {
  ReferenceAlignment ref;
  std::string buf;
  std::size_t line_no = 0;
  while (std::getline(in, buf)) {
    ++line_no;
    const std::string_view line = strip_cr(buf);
    if (line.empty()) continue;
    const auto cols = split_tabs(line);
    if (cols.size() != 3) throw ParseError("expected 3 tab-separated columns", line_no);
    if (cols[0].empty() || cols[1].empty()) throw ParseError("empty entity id", line_no);
    int label = 0;
    if (cols[2] == "1") {
      label = 1;
    } else if (cols[2] != "0") {
      throw ParseError("label must be 0 or 1", line_no);
    }
    ref.add(std::string(cols[0]), std::string(cols[1]), label);
  }
  if (in.bad()) throw IoError("read error while parsing reference alignment");
  return ref;
}

ReferenceAlignment read_reference_file(const std::string& path) {
  auto in = open_input(path);
  return parse_reference(in);
}

void write_reference(const ReferenceAlignment& reference, std::ostream& out) {
  for (const auto& pair : reference.pairs()) {
    out << pair.first << '\t' << pair.second << '\t' << *reference.label(pair) << '\n';
  }
  check_written(out, "reference alignment");
}

void write_reference_file(const ReferenceAlignment& reference, const std::string& path) {
  auto out = open_output(path);
  write_reference(reference, out);
}

}  // namespace ontomatch
