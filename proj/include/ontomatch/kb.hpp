#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ontomatch {

enum class DefinitionSource { kNone, kNative, kExternal };

// One ontology concept, normalized to the attribute set every matcher consumes.
struct Entity {
  std::string id;
  std::string name;
  std::vector<std::string> aliases;
  std::optional<std::string> definition;
  std::vector<std::string> contexts;
  DefinitionSource definition_source = DefinitionSource::kNone;

  bool operator==(const Entity&) const = default;
};

// Entity fields as read from a KB line, before trimming and dedup.
struct RawEntity {
  std::string id;
  std::string name;
  std::vector<std::string> aliases;
  std::optional<std::string> definition;
  std::vector<std::string> contexts;
  std::optional<DefinitionSource> definition_source;
};

// Trims every field, drops empty aliases/contexts, dedups aliases
// case-insensitively (first occurrence wins). Throws ValidationError on an
// empty name or id.
Entity validate_entity(RawEntity raw);

// Immutable list of entities with an id index. Safe to share across threads.
class Ontology {
 public:
  Ontology() = default;
  // Throws DuplicateIdError if two entities share an id.
  explicit Ontology(std::vector<Entity> entities);

  const std::vector<Entity>& entities() const { return entities_; }
  std::size_t size() const { return entities_.size(); }
  bool empty() const { return entities_.empty(); }
  const Entity& operator[](std::size_t i) const { return entities_[i]; }

  std::optional<std::size_t> position(std::string_view id) const;
  const Entity* find(std::string_view id) const;
  // Throws ValidationError naming the id when it is unknown.
  const Entity& at(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;

  auto begin() const { return entities_.begin(); }
  auto end() const { return entities_.end(); }

  bool operator==(const Ontology& other) const { return entities_ == other.entities_; }

 private:
  std::vector<Entity> entities_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class Provenance { kExactMatch, kModel };

struct Alignment {
  std::string source_id;
  std::string target_id;
  double score = 0.0;
  Provenance provenance = Provenance::kModel;

  bool operator==(const Alignment&) const = default;
};

using IdPair = std::pair<std::string, std::string>;

// Gold (source, target) pairs with 0/1 labels. Insertion order is kept.
class ReferenceAlignment {
 public:
  // Re-adding a pair overwrites its label.
  void add(std::string source_id, std::string target_id, int label);

  const std::vector<IdPair>& pairs() const { return pairs_; }
  std::optional<int> label(const IdPair& pair) const;
  std::set<IdPair> positives() const;
  std::size_t size() const { return pairs_.size(); }

 private:
  std::vector<IdPair> pairs_;
  std::map<IdPair, int> labels_;
};

std::string_view to_string(Provenance p);
std::string_view to_string(DefinitionSource s);

// Score in units of 1e-4, rounded half-to-even. This is the value that is
// serialized and the key alignments are sorted by.
std::int64_t score_units(double score);
std::string format_score(double score);

// KB files: UTF-8 JSON-lines, one entity per line. Blank lines are skipped.
Ontology parse_kb(std::istream& in);
Ontology read_kb_file(const std::string& path);
void write_kb(const Ontology& ontology, std::ostream& out);
void write_kb_file(const Ontology& ontology, const std::string& path);

// Orders alignments by (source_id, descending serialized score, target_id).
void sort_alignments(std::vector<Alignment>& alignments);

// Alignment files: TSV source_id, target_id, score (4 decimals), provenance.
void write_alignment(std::span<const Alignment> alignments, std::ostream& out);
void write_alignment_file(std::span<const Alignment> alignments, const std::string& path);
std::vector<Alignment> parse_alignment(std::istream& in);
std::vector<Alignment> read_alignment_file(const std::string& path);

// Reference files: TSV source_id, target_id, label (0 or 1).
ReferenceAlignment parse_reference(std::istream& in);
ReferenceAlignment read_reference_file(const std::string& path);
void write_reference(const ReferenceAlignment& reference, std::ostream& out);
void write_reference_file(const ReferenceAlignment& reference, const std::string& path);

// Splits a line on tabs; used by every TSV reader here.
std::vector<std::string_view> split_tabs(std::string_view line);

}  // namespace ontomatch
