#include "ontomatch/synthetic.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "json.hpp"
#include "ontomatch/errors.hpp"
#include "ontomatch/io.hpp"
#include "ontomatch/random.hpp"

namespace ontomatch {
namespace {

// Connective words used by definition and context templates.
const std::vector<std::string> kFiller = {"a",    "an",   "the",  "of",    "with", "and",   "by",   "in",
                                          "form", "type", "kind", "which", "that", "often", "from", "to"};

struct Thesaurus {
  std::vector<std::vector<std::string>> groups;  // heads first
  std::size_t heads = 0;
};

std::string pseudo_word(Rng& rng) {
  static const char* onsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
                                 "br", "dr", "gl", "kr", "pl", "st", "tr", "ch", "sh", "th"};
  static const char* vowels[] = {"a", "e", "i", "o", "u", "ai", "ou", "ea"};
  static const char* codas[] = {"", "", "", "n", "r", "s", "l", "m", "x", "nt", "st"};
  std::string w;
  const std::size_t syllables = 2 + rng.uniform_index(2);
  for (std::size_t s = 0; s < syllables; ++s) {
    w += onsets[rng.uniform_index(std::size(onsets))];
    w += vowels[rng.uniform_index(std::size(vowels))];
  }
  w += codas[rng.uniform_index(std::size(codas))];
  return w;
}

Thesaurus make_thesaurus(const SyntheticConfig& c) {
  Rng rng(mix_seed(c.thesaurus_seed, 0x7448455341ULL));
  std::set<std::string> used(kFiller.begin(), kFiller.end());
  Thesaurus t;
  t.heads = c.head_groups;
  t.groups.resize(c.head_groups + c.modifier_groups);
  for (auto& g : t.groups) {
    while (g.size() < c.synonyms) {
      std::string w = pseudo_word(rng);
      if (used.insert(w).second) g.push_back(std::move(w));
    }
  }
  return t;
}

nn::Embeddings make_embeddings(const Thesaurus& t, const SyntheticConfig& c) {
  Rng rng(mix_seed(c.thesaurus_seed, 0x454D42ULL));
  auto gaussian = [&] {
    // Box-Muller from the portable uniform draws.
    const double u1 = std::max(rng.uniform01(), 1e-300);
    const double u2 = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  };
  const int dim = c.embedding_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<std::pair<std::string, Eigen::VectorXf>> rows;
  auto random_vector = [&](double s) {
    Eigen::VectorXf v(dim);
    for (int i = 0; i < dim; ++i) v(i) = static_cast<float>(gaussian() * s);
    return v;
  };
  for (const auto& w : kFiller) rows.emplace_back(w, random_vector(scale));
  for (const auto& g : t.groups) {
    const Eigen::VectorXf centre = random_vector(scale);
    for (const auto& w : g) rows.emplace_back(w, centre + random_vector(scale * c.embedding_noise));
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  nn::Embeddings e;
  e.vectors.resize(dim, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    e.words.push_back(rows[i].first);
    e.vectors.col(static_cast<Eigen::Index>(i)) = rows[i].second;
  }
  return e;
}

// A concept is a list of synonym groups: modifiers followed by one head,
// plus groups that only appear in its definition and contexts.
struct Concept {
  std::vector<std::size_t> name;
  std::vector<std::size_t> gloss;
};

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

class Writer {
 public:
  Writer(const Thesaurus& t, Rng& rng) : t_(t), rng_(rng) {}

  const std::string& any(std::size_t group) {
    const auto& g = t_.groups[group];
    return g[rng_.uniform_index(g.size())];
  }

  // Surface form of a group list; `keep` picks the first synonym.
  std::vector<std::string> surface(const std::vector<std::size_t>& groups, bool canonical) {
    std::vector<std::string> out;
    for (std::size_t g : groups) out.push_back(canonical ? t_.groups[g][0] : any(g));
    return out;
  }

  // Replaces words by another synonym with probability `rate`.
  std::vector<std::string> swap(const std::vector<std::size_t>& groups, std::vector<std::string> words, double rate) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (!rng_.bernoulli(rate)) continue;
      const auto& g = t_.groups[groups[i]];
      std::string repl = words[i];
      while (repl == words[i] && g.size() > 1) repl = g[rng_.uniform_index(g.size())];
      words[i] = repl;
    }
    return words;
  }

  std::string filler() { return kFiller[rng_.uniform_index(kFiller.size())]; }

  std::string definition(const Concept& c) {
    std::vector<std::string> w = {"a", any(c.name.back()), "of", "the"};
    for (std::size_t i = 0; i + 1 < c.name.size(); ++i) w.push_back(any(c.name[i]));
    w.push_back("with");
    for (std::size_t i = 0; i < c.gloss.size(); ++i) {
      if (i > 0) w.push_back(i + 1 == c.gloss.size() ? "and" : filler());
      w.push_back(any(c.gloss[i]));
    }
    return join(w) + ".";
  }

  std::string context(const Concept& c) {
    std::vector<std::string> w = {"the"};
    for (std::size_t g : c.name) w.push_back(any(g));
    w.push_back(filler());
    w.push_back(any(c.gloss[rng_.uniform_index(c.gloss.size())]));
    w.push_back(filler());
    w.push_back(any(c.gloss[rng_.uniform_index(c.gloss.size())]));
    return join(w) + ".";
  }

 private:
  const Thesaurus& t_;
  Rng& rng_;
};

std::vector<Concept> make_concepts(const Thesaurus& t, const SyntheticConfig& c, Rng& rng) {
  const std::size_t n_mod = c.modifier_groups;
  if (n_mod < 8 || t.heads < 1) throw ValidationError("synthetic: too few groups");
  std::set<std::vector<std::size_t>> seen;
  std::vector<Concept> out;
  std::size_t family_base = 0;
  std::size_t attempts = 0;
  while (out.size() < c.entities) {
    if (++attempts > c.entities * 1000) throw ValidationError("synthetic: cannot draw enough distinct concepts");
    if (out.size() % std::max<std::size_t>(1, c.family_size) == 0) {
      family_base = t.heads + rng.uniform_index(n_mod);
    }
    Concept k;
    k.name.push_back(family_base);
    const std::size_t extra = rng.uniform_index(3);  // 0..2 more modifiers
    for (std::size_t i = 0; i < extra; ++i) k.name.push_back(t.heads + rng.uniform_index(n_mod));
    k.name.push_back(rng.uniform_index(t.heads));
    std::vector<std::size_t> key = k.name;
    std::sort(key.begin(), key.end());
    if (std::adjacent_find(key.begin(), key.end()) != key.end() || !seen.insert(key).second) continue;
    const std::size_t gloss = 3 + rng.uniform_index(2);
    for (std::size_t i = 0; i < gloss; ++i) k.gloss.push_back(t.heads + rng.uniform_index(n_mod));
    out.push_back(std::move(k));
  }
  return out;
}

}  // namespace

SyntheticBenchmark generate_benchmark(const SyntheticConfig& c) {
  if (c.entities == 0) throw ValidationError("synthetic: entity count must be positive");
  if (c.synonyms < 2) throw ValidationError("synthetic: need at least two synonyms per group");
  const Thesaurus thesaurus = make_thesaurus(c);
  Rng rng(mix_seed(c.seed, 0x42454E4348ULL));
  const std::vector<Concept> concepts = make_concepts(thesaurus, c, rng);
  Writer w(thesaurus, rng);

  std::vector<Entity> source, target;
  SyntheticBenchmark b;
  std::vector<std::size_t> target_order(concepts.size());
  for (std::size_t i = 0; i < concepts.size(); ++i) target_order[i] = i;
  rng.shuffle(std::span<std::size_t>(target_order));
  std::vector<std::string> target_ids(concepts.size());
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "T%05zu", target_order[i] + 1);
    target_ids[i] = buf;
  }

  std::set<std::string> source_forms, target_forms;
  auto unique_form = [](std::set<std::string>& used, const std::string& form) { return used.insert(form).second; };

  for (std::size_t i = 0; i < concepts.size(); ++i) {
    const Concept& k = concepts[i];
    char buf[32];
    std::snprintf(buf, sizeof buf, "S%05zu", i + 1);
    Entity s;
    s.id = buf;
    const std::vector<std::string> s_name = w.surface(k.name, true);
    s.name = join(s_name);
    unique_form(source_forms, s.name);

    // Source aliases: synonym variants of the name.
    std::vector<std::vector<std::string>> s_aliases;
    const std::size_t n_alias = rng.uniform_index(4);
    for (std::size_t a = 0; a < n_alias; ++a) {
      std::vector<std::string> alias = w.swap(k.name, s_name, 0.7);
      if (alias.size() > 1 && rng.bernoulli(0.3)) {
        // "head of modifiers" reordering
        std::vector<std::string> r = {alias.back(), "of"};
        r.insert(r.end(), alias.begin(), alias.end() - 1);
        alias = r;
      }
      if (unique_form(source_forms, join(alias))) {
        s_aliases.push_back(alias);
        s.aliases.push_back(join(alias));
      }
    }
    if (rng.bernoulli(c.definition_rate)) {
      s.definition = w.definition(k);
      s.definition_source = DefinitionSource::kNative;
    }

    // Corrupted copy.
    Entity t;
    t.id = target_ids[i];
    std::vector<std::string> t_name = w.swap(k.name, s_name, c.swap_rate);
    if (t_name.size() > 1 && rng.bernoulli(c.shuffle_rate)) rng.shuffle(std::span<std::string>(t_name));
    t.name = join(t_name);
    unique_form(target_forms, t.name);
    for (const auto& alias : s_aliases) {
      if (rng.bernoulli(c.alias_drop_rate)) continue;
      std::vector<std::string> copy = alias;
      for (auto& word : copy) {
        if (word == "of" || !rng.bernoulli(c.swap_rate)) continue;
        for (std::size_t g : k.name) {
          const auto& syn = thesaurus.groups[g];
          if (std::find(syn.begin(), syn.end(), word) != syn.end()) {
            word = syn[rng.uniform_index(syn.size())];
            break;
          }
        }
      }
      if (unique_form(target_forms, join(copy))) t.aliases.push_back(join(copy));
    }
    std::optional<std::string> t_definition;
    if (rng.bernoulli(c.definition_rate)) t_definition = w.definition(k);
    if (t_definition) {
      b.definition_fixture.emplace_back(t.name, *t_definition + " It was first described in the " +
                                                    w.any(k.gloss[0]) + " literature.");
      if (!c.strip_target_definitions) {
        t.definition = t_definition;
        t.definition_source = DefinitionSource::kNative;
      }
    }

    for (const Entity* e : {&s, &t}) {
      if (!rng.bernoulli(c.context_rate)) continue;
      auto& list = b.contexts[e->id];
      const std::size_t n = 1 + rng.uniform_index(c.max_contexts_per_entity);
      for (std::size_t j = 0; j < n; ++j) list.push_back(w.context(k));
    }
    b.reference.add(s.id, t.id, 1);
    source.push_back(std::move(s));
    target.push_back(std::move(t));
  }
  Rng table_rng(mix_seed(c.seed, 0x5441424C45ULL));
  for (const auto& [s_id, t_id] : b.reference.pairs()) {
    if (table_rng.bernoulli(c.table_fraction)) b.table.add(s_id, t_id, 1);
  }
  std::vector<Entity> shuffled(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) shuffled[target_order[i]] = std::move(target[i]);
  b.source = Ontology(std::move(source));
  b.target = Ontology(std::move(shuffled));
  b.embeddings = make_embeddings(thesaurus, c);
  return b;
}

void write_benchmark(const SyntheticBenchmark& b, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
  const std::filesystem::path root(dir);
  write_kb_file(b.source, (root / "source.jsonl").string());
  write_kb_file(b.target, (root / "target.jsonl").string());
  write_reference_file(b.reference, (root / "reference.tsv").string());
  write_reference_file(b.table, (root / "table.tsv").string());
  {
    const std::string path = (root / "contexts.jsonl").string();
    auto out = open_output(path);
    std::vector<std::string> ids;
    for (const auto& [id, _] : b.contexts) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    for (const auto& id : ids) out << nlohmann::json{{"id", id}, {"contexts", b.contexts.at(id)}}.dump() << '\n';
    check_written(out, path);
  }
  {
    const std::string path = (root / "definitions.jsonl").string();
    auto out = open_output(path);
    for (const auto& [q, lead] : b.definition_fixture) out << nlohmann::json{{"query", q}, {"lead", lead}}.dump() << '\n';
    check_written(out, path);
  }
  nn::write_embeddings_file(b.embeddings, (root / "embeddings.txt").string());
}

}  // namespace ontomatch
