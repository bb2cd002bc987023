#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "ontomatch/candidate_index.hpp"
#include "ontomatch/dataset.hpp"
#include "ontomatch/enrichment.hpp"
#include "ontomatch/errors.hpp"
#include "ontomatch/io.hpp"
#include "ontomatch/kb.hpp"
#include "ontomatch/log.hpp"
#include "ontomatch/pipeline.hpp"
#include "ontomatch/synthetic.hpp"

namespace fs = std::filesystem;
using namespace ontomatch;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

// Definition and context sources shared by enrich, train and align.
struct EnrichInputs {
  std::string definitions;  // fixture path
  bool live = false;        // query ENRICH_ENDPOINT
  std::string contexts;     // corpus path
  std::uint64_t context_seed = 0;

  void add_options(CLI::App* app) {
    app->add_option("--definitions", definitions, "Definition fixture (JSON-lines of query/lead)");
    app->add_flag("--live", live, "Fetch definitions from the endpoint in ENRICH_ENDPOINT");
    app->add_option("--contexts", contexts, "Context corpus (JSON-lines of id/contexts)");
    app->add_option("--context-seed", context_seed, "Seed for sampling contexts");
  }

  std::unique_ptr<DefinitionProvider> provider() const {
    if (!definitions.empty() && live) throw ValidationError("--definitions and --live are exclusive");
    if (!definitions.empty()) {
      return std::make_unique<FixtureDefinitionSource>(FixtureDefinitionSource::load(definitions));
    }
    if (live) return WikipediaDefinitionSource::from_environment();
    return nullptr;
  }
};

// Applies variant toggles to both ontologies of a run.
struct Variant {
  bool use_external_defs = false;
  bool use_contexts = false;
  EnrichInputs inputs;

  void add_options(CLI::App* app) {
    app->add_flag("--use-external-defs", use_external_defs, "Use definitions from enrichment");
    app->add_flag("--use-contexts", use_contexts, "Use usage contexts");
    inputs.add_options(app);
  }

  std::pair<Ontology, Ontology> prepare(const Ontology& source, const Ontology& target) const {
    const std::unique_ptr<DefinitionProvider> provider = use_external_defs ? inputs.provider() : nullptr;
    std::optional<DefinitionFetcher> fetcher;
    if (provider) fetcher.emplace(*provider);
    std::optional<ContextCorpus> corpus;
    if (use_contexts && !inputs.contexts.empty()) corpus = load_context_corpus(inputs.contexts);
    const VariantOptions options{use_external_defs, use_contexts, inputs.context_seed};
    DefinitionFetcher* f = fetcher ? &*fetcher : nullptr;
    const ContextCorpus* c = corpus ? &*corpus : nullptr;
    return {prepare_ontology(source, options, f, c), prepare_ontology(target, options, f, c)};
  }
};

void write_text_or_stdout(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  auto out = open_output(path);
  out << text;
  check_written(out, path);
}

int run_derive(const std::string& table, const std::string& source_path, const std::string& target_path,
               const std::string& out_dir, std::uint64_t seed, std::size_t k) {
  const Ontology source = read_kb_file(source_path);
  const Ontology target = read_kb_file(target_path);
  const ReferenceAlignment reference = read_reference_file(table);
  NegativeSamplingReport report;
  const std::vector<LabeledExample> examples = derive_examples(reference, source, target, seed, k, &report);
  const DatasetSplit split = split_examples(examples, seed);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory '" + out_dir + "': " + ec.message());
  const fs::path root(out_dir);
  write_examples_file(examples, (root / "examples.tsv").string());
  write_examples_file(split.train, (root / "train.tsv").string());
  write_examples_file(split.dev, (root / "dev.tsv").string());
  write_examples_file(split.test, (root / "test.tsv").string());
  std::size_t positives = 0;
  for (const auto& e : examples) positives += e.label;
  const nlohmann::json j = {{"examples", examples.size()},     {"positives", positives},
                            {"train", split.train.size()},     {"dev", split.dev.size()},
                            {"test", split.test.size()},       {"easy_skipped", report.easy_skipped},
                            {"hard_skipped", report.hard_skipped}};
  std::cout << j.dump() << '\n';
  return 0;
}

int run_enrich(const std::string& kb, const std::string& out, const EnrichInputs& inputs, const std::string& report_path) {
  Ontology ontology = read_kb_file(kb);
  nlohmann::json j;
  const std::unique_ptr<DefinitionProvider> provider = inputs.provider();
  if (provider) {
    DefinitionFetcher fetcher(*provider);
    EnrichmentReport report;
    ontology = enrich_definitions(ontology, fetcher, &report);
    j["definitions"] = {{"native", report.native},
                        {"external", report.external},
                        {"none", report.none},
                        {"coverage", report.definition_coverage()},
                        {"lookups", fetcher.source_calls()},
                        {"cache_hits", fetcher.cache_hits()}};
  }
  if (!inputs.contexts.empty()) {
    const ContextCorpus corpus = load_context_corpus(inputs.contexts);
    ontology = attach_contexts(ontology, corpus, kMaxContexts, inputs.context_seed);
    std::size_t with = 0;
    for (const Entity& e : ontology) with += !e.contexts.empty();
    j["contexts"] = {{"entities_with_contexts", with}};
  }
  if (!provider && inputs.contexts.empty()) {
    throw ValidationError("enrich needs --definitions, --live or --contexts");
  }
  write_kb_file(ontology, out);
  write_text_or_stdout(report_path, j.dump() + "\n");
  return 0;
}

struct TrainArgs {
  std::string model_kind = "nn";
  std::string source, target, train, dev, embeddings, out;
  int epochs = 30;
  int patience = 5;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double dropout = 0.2;
  std::uint64_t seed = 1;
  bool no_features = false;
  bool train_embeddings = false;
  int threads = 0;
  double l2 = 1e-4;
  Variant variant;
};

int run_train(const TrainArgs& a) {
  const auto [source, target] = a.variant.prepare(read_kb_file(a.source), read_kb_file(a.target));
  const std::vector<LabeledExample> train = read_examples_file(a.train);
  const std::vector<LabeledExample> dev = a.dev.empty() ? std::vector<LabeledExample>{} : read_examples_file(a.dev);
  nlohmann::json j = {{"model", a.model_kind}, {"train_examples", train.size()}, {"dev_examples", dev.size()}};
  if (a.model_kind == "lr") {
    LrTrainConfig config;
    config.l2_lambda = a.l2;
    LrTrainReport report;
    const LrModel model = train_lr_model(train, source, target, config, &report);
    save_lr(model, a.out);
    j["iterations"] = report.iterations;
    j["converged"] = report.converged;
    j["final_loss"] = report.final_loss;
  } else {
    NnTrainOptions options;
    options.use_features = !a.no_features;
    options.train.max_epochs = a.epochs;
    options.train.patience = a.patience;
    options.train.batch_size = a.batch_size;
    options.train.learning_rate = a.learning_rate;
    options.train.dropout = a.dropout;
    options.train.seed = a.seed;
    options.train.threads = a.threads;
    options.train.train_word_embeddings = a.train_embeddings;
    std::optional<nn::Embeddings> embeddings;
    if (!a.embeddings.empty()) embeddings = nn::read_embeddings_file(a.embeddings, options.dims.word_dim);
    nn::TrainReport report;
    const nn::NnModel model =
        train_nn_model(train, dev, source, target, embeddings ? &*embeddings : nullptr, options, &report);
    nn::save_nn_model(model, a.out);
    nlohmann::json epochs = nlohmann::json::array();
    for (const auto& e : report.epochs) {
      epochs.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"dev_f1", e.dev_f1}});
    }
    j["epochs"] = epochs;
    j["best_epoch"] = report.best_epoch;
    j["best_dev_f1"] = report.best_dev_f1;
  }
  std::cout << j.dump() << '\n';
  return 0;
}

struct AlignArgs {
  std::string source, target, model, out;
  std::size_t k = CandidateIndex::kDefaultK;
  double threshold = 0.5;
  bool no_one_to_one = false;
  int threads = 0;
  Variant variant;
};

int run_align(const AlignArgs& a) {
  const auto [source, target] = a.variant.prepare(read_kb_file(a.source), read_kb_file(a.target));
  const std::unique_ptr<PairScorer> scorer = load_scorer(a.model, a.threads);
  AlignConfig config;
  config.k = a.k;
  config.threshold = a.threshold;
  config.one_to_one = !a.no_one_to_one;
  config.use_external_defs = a.variant.use_external_defs;
  config.use_contexts = a.variant.use_contexts;
  config.threads = a.threads;
  const std::vector<Alignment> alignments = align(source, target, *scorer, config);
  if (a.out.empty() || a.out == "-") {
    write_alignment(alignments, std::cout);
    std::cout.flush();
    if (!std::cout) throw IoError("cannot write alignments to standard output");
  } else {
    write_alignment_file(alignments, a.out);
  }
  return 0;
}

int run_evaluate(const std::string& alignment, const std::string& reference) {
  const std::vector<Alignment> predicted = read_alignment_file(alignment);
  const ReferenceAlignment gold = read_reference_file(reference);
  std::cout << metrics_to_json(evaluate(predicted, gold)) << '\n';
  return 0;
}

int run_embed(const std::string& corpus_path, const std::string& out, const nn::SkipGramConfig& config) {
  auto in = open_input(corpus_path);
  std::vector<std::vector<std::string>> sentences;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = tokenize(line);
    if (!tokens.empty()) sentences.push_back(std::move(tokens));
  }
  if (in.bad()) throw IoError("read error in '" + corpus_path + "'");
  const nn::Embeddings e = nn::train_skipgram(sentences, config);
  nn::write_embeddings_file(e, out);
  std::cout << nlohmann::json{{"words", e.size()}, {"dim", e.dim()}}.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ontology alignment: candidate blocking, pair features and a siamese scorer"};
  app.require_subcommand(1);
  std::string log_level;
  app.add_option("--log", log_level, "debug|info|warning|error|silent");

  // derive
  std::string d_table, d_source, d_target, d_out;
  std::uint64_t d_seed = 1;
  std::size_t d_k = CandidateIndex::kDefaultK;
  auto* derive = app.add_subcommand("derive", "Labeled examples and 64/16/20 splits from an alignment table");
  derive->add_option("--alignment", d_table, "Reference TSV (source_id, target_id, label)")->required();
  derive->add_option("--source", d_source, "Source KB")->required();
  derive->add_option("--target", d_target, "Target KB")->required();
  derive->add_option("--out-dir", d_out, "Output directory")->required();
  derive->add_option("--seed", d_seed, "Sampling and split seed");
  derive->add_option("--k", d_k, "Candidates searched for hard negatives")->check(CLI::PositiveNumber);

  // enrich
  std::string e_kb, e_out, e_report;
  EnrichInputs e_inputs;
  auto* enrich = app.add_subcommand("enrich", "Add external definitions and usage contexts to a KB");
  enrich->add_option("--kb", e_kb, "Input KB")->required();
  enrich->add_option("--out", e_out, "Enriched KB")->required();
  enrich->add_option("--report", e_report, "Report JSON path (default stdout)");
  e_inputs.add_options(enrich);

  // train
  TrainArgs t;
  auto* train = app.add_subcommand("train", "Train the logistic-regression or neural scorer");
  train->add_option("--model", t.model_kind, "lr or nn")->check(CLI::IsMember({"lr", "nn"}));
  train->add_option("--source", t.source, "Source KB")->required();
  train->add_option("--target", t.target, "Target KB")->required();
  train->add_option("--train", t.train, "Training examples TSV")->required();
  train->add_option("--dev", t.dev, "Development examples TSV");
  train->add_option("--embeddings", t.embeddings, "Pretrained word vectors");
  train->add_option("--out", t.out, "Model file")->required();
  train->add_option("--epochs", t.epochs)->check(CLI::PositiveNumber);
  train->add_option("--patience", t.patience)->check(CLI::PositiveNumber);
  train->add_option("--batch-size", t.batch_size)->check(CLI::PositiveNumber);
  train->add_option("--learning-rate", t.learning_rate)->check(CLI::PositiveNumber);
  train->add_option("--dropout", t.dropout)->check(CLI::Range(0.0, 0.95));
  train->add_option("--l2", t.l2, "L2 penalty for lr")->check(CLI::NonNegativeNumber);
  train->add_option("--seed", t.seed);
  train->add_option("--threads", t.threads)->check(CLI::NonNegativeNumber);
  train->add_flag("--no-features", t.no_features, "Feed zeros instead of the 32 engineered features");
  train->add_flag("--train-embeddings", t.train_embeddings, "Update word vectors during training");
  t.variant.add_options(train);

  // align
  AlignArgs a;
  auto* align_cmd = app.add_subcommand("align", "Align two KBs with a trained model");
  align_cmd->add_option("--source", a.source, "Source KB")->required();
  align_cmd->add_option("--target", a.target, "Target KB")->required();
  align_cmd->add_option("--model", a.model, "Model file (lr JSON or nn archive)")->required();
  align_cmd->add_option("--out", a.out, "Alignment TSV (default stdout)");
  align_cmd->add_option("--k", a.k, "Candidates per source entity")->check(CLI::PositiveNumber);
  align_cmd->add_option("--threshold", a.threshold, "Minimum match probability, in (0, 1]");
  align_cmd->add_flag("--no-one-to-one", a.no_one_to_one, "Keep every pair above the threshold");
  align_cmd->add_option("--threads", a.threads)->check(CLI::NonNegativeNumber);
  a.variant.add_options(align_cmd);

  // evaluate
  std::string v_alignment, v_reference;
  auto* eval = app.add_subcommand("evaluate", "Precision, recall and F1 as JSON");
  eval->add_option("--alignment", v_alignment, "Alignment TSV")->required();
  eval->add_option("--reference", v_reference, "Reference TSV")->required();

  // synth
  SyntheticConfig s;
  std::string s_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic benchmark with a known mapping");
  synth->add_option("--out-dir", s_out, "Output directory")->required();
  synth->add_option("--entities", s.entities)->check(CLI::PositiveNumber);
  synth->add_option("--seed", s.seed);
  synth->add_option("--thesaurus-seed", s.thesaurus_seed);
  synth->add_flag("--strip-target-definitions", s.strip_target_definitions,
                  "Leave target definitions only in the definition fixture");

  // embed
  std::string m_corpus, m_out;
  nn::SkipGramConfig m;
  auto* embed = app.add_subcommand("embed", "Train skip-gram word vectors on a text corpus");
  embed->add_option("--corpus", m_corpus, "Text, one sentence per line")->required();
  embed->add_option("--out", m_out, "Embedding file")->required();
  embed->add_option("--dim", m.dim)->check(CLI::PositiveNumber);
  embed->add_option("--epochs", m.epochs)->check(CLI::PositiveNumber);
  embed->add_option("--window", m.window)->check(CLI::PositiveNumber);
  embed->add_option("--seed", m.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (!log_level.empty()) {
      static const std::map<std::string, LogLevel> levels = {{"debug", LogLevel::kDebug},
                                                             {"info", LogLevel::kInfo},
                                                             {"warning", LogLevel::kWarning},
                                                             {"error", LogLevel::kError},
                                                             {"silent", LogLevel::kSilent}};
      const auto it = levels.find(log_level);
      if (it == levels.end()) throw ValidationError("unknown log level '" + log_level + "'");
      set_log_level(it->second);
    }
    if (*derive) return run_derive(d_table, d_source, d_target, d_out, d_seed, d_k);
    if (*enrich) return run_enrich(e_kb, e_out, e_inputs, e_report);
    if (*train) return run_train(t);
    if (*align_cmd) return run_align(a);
    if (*eval) return run_evaluate(v_alignment, v_reference);
    if (*synth) {
      write_benchmark(generate_benchmark(s), s_out);
      return 0;
    }
    if (*embed) return run_embed(m_corpus, m_out, m);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
