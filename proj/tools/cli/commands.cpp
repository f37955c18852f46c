#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "chis/corpus.hpp"
#include "chis/error.hpp"
#include "chis/pipeline.hpp"
#include "manifest.hpp"

#ifndef CHIS_VERSION
#define CHIS_VERSION "0.0.0"
#endif

namespace chis::cli {

namespace {

namespace fs = std::filesystem;
using pipeline::PipelineConfig;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct LexiconArgs {
  fs::path nouns;
  fs::path gloss;
  fs::path sentiment;

  void bind(CLI::App& app) {
    app.add_option("--nouns", nouns, "Noun lexicon (one word per line)");
    app.add_option("--gloss", gloss, "Gloss dictionary TSV (term<TAB>gloss)");
    app.add_option("--sentiment", sentiment,
                   "Sentiment lexicon TSV (term<TAB>pos<TAB>neg)");
  }

  pipeline::LexiconPaths paths() const { return {nouns, gloss, sentiment}; }

  void record(RunManifest& m) const {
    for (const auto& p : {nouns, gloss, sentiment}) {
      if (!p.empty()) m.add_input(p);
    }
  }
};

struct SvmArgs {
  std::optional<double> c;
  std::optional<std::string> kernel;
  std::optional<double> gamma;
  std::optional<int> degree;
  std::optional<double> coef0;
  std::optional<double> tol;
  std::optional<int> max_passes;
  std::optional<double> eps;

  void bind(CLI::App& app) {
    app.add_option("--C,--cost", c, "Box constraint C");
    app.add_option("--kernel", kernel, "linear | poly | rbf");
    app.add_option("--gamma", gamma, "Kernel gamma");
    app.add_option("--degree", degree, "Polynomial degree");
    app.add_option("--coef0", coef0, "Polynomial offset");
    app.add_option("--tol", tol, "KKT tolerance");
    app.add_option("--max-passes", max_passes, "Iteration budget in passes over the data");
    app.add_option("--eps", eps, "Support-vector alpha floor");
  }

  svm::SvmConfig apply(svm::SvmConfig cfg) const {
    if (c) cfg.c = *c;
    if (kernel) cfg.kernel.kind = svm::parse_kernel_kind(*kernel);
    if (gamma) cfg.kernel.gamma = *gamma;
    if (degree) cfg.kernel.degree = *degree;
    if (coef0) cfg.kernel.coef0 = *coef0;
    if (tol) cfg.tol = *tol;
    if (max_passes) cfg.max_passes = *max_passes;
    if (eps) cfg.eps = *eps;
    cfg.validate();
    return cfg;
  }
};

void record_svm(RunManifest& m, const svm::SvmConfig& cfg) {
  m.config["C"] = num(cfg.c);
  m.config["kernel"] = std::string(svm::to_string(cfg.kernel.kind));
  m.config["gamma"] = num(cfg.kernel.gamma);
  m.config["degree"] = std::to_string(cfg.kernel.degree);
  m.config["coef0"] = num(cfg.kernel.coef0);
  m.config["tol"] = num(cfg.tol);
  m.config["max_passes"] = std::to_string(cfg.max_passes);
  m.config["eps"] = num(cfg.eps);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

void finish_manifest(RunManifest& m, const fs::path& artifact) {
  m.add_output(artifact);
  m.finished_at = utc_timestamp();
  write_text(manifest_path_for(artifact), m.to_json());
}

RunManifest start_manifest(std::string command, std::uint64_t seed) {
  RunManifest m;
  m.command = std::move(command);
  m.tool_version = CHIS_VERSION;
  m.seed = seed;
  m.started_at = utc_timestamp();
  return m;
}

// train ---------------------------------------------------------------------

struct TrainArgs {
  int task = 1;
  fs::path data;
  fs::path out;
  LexiconArgs lexicons;
  SvmArgs svm;
  std::string stance_classes = "three_class";
  double train_fraction = 0.6;
  std::uint64_t seed = 0;
  bool retrain_full = true;
  std::vector<double> grid_c;
  std::vector<double> grid_gamma;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  PipelineConfig cfg;
  cfg.seed = a.seed;
  cfg.train_fraction = a.train_fraction;
  cfg.retrain_full = a.retrain_full;
  cfg.stance_classes = pipeline::parse_stance_classes(a.stance_classes);
  cfg.lexicons = a.lexicons.paths();
  auto& svm_cfg = a.task == 1 ? cfg.task1 : cfg.task2;
  svm_cfg = a.svm.apply(svm_cfg);

  RunManifest manifest = start_manifest("train", a.seed);
  const auto resources = pipeline::Resources::load(cfg.lexicons);
  const auto records = corpus::load_dataset(a.data, true);
  manifest.add_input(a.data);
  a.lexicons.record(manifest);

  const auto task = a.task == 1 ? pipeline::Task::Relevance : pipeline::Task::Stance;
  if (!a.grid_c.empty() || !a.grid_gamma.empty()) {
    const std::vector<double> cs = a.grid_c.empty() ? std::vector{svm_cfg.c} : a.grid_c;
    const std::vector<double> gs =
        a.grid_gamma.empty() ? std::vector{svm_cfg.kernel.gamma} : a.grid_gamma;
    const auto grid = pipeline::make_grid(svm_cfg, cs, gs);
    const auto result = pipeline::grid_search(records, grid, task, resources, cfg);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out << "grid C=" << num(grid[i].c) << " gamma=" << num(grid[i].kernel.gamma)
          << " dev_accuracy=" << num(result.accuracies[i]) << '\n';
    }
    svm_cfg = result.best;
    out << "selected C=" << num(svm_cfg.c) << " gamma=" << num(svm_cfg.kernel.gamma)
        << '\n';
    manifest.config["grid_dev_accuracy"] = num(result.dev_accuracy);
  }

  const auto subset = pipeline::training_subset(records, cfg);
  const svm::MulticlassModel* classifier = nullptr;
  pipeline::Task1Model m1;
  pipeline::Task2Model m2;
  if (a.task == 1) {
    m1 = pipeline::train_task1(subset, resources, cfg);
    pipeline::save(m1, a.out);
    classifier = &m1.classifier;
  } else {
    m2 = pipeline::train_task2(subset, pipeline::gold_relevance(subset), resources, cfg);
    pipeline::save(m2, a.out);
    classifier = &m2.classifier;
  }

  if (!cfg.retrain_full) {
    const auto split = corpus::split_train_dev(records, cfg.train_fraction, cfg.seed);
    std::size_t correct = 0;
    if (a.task == 1) {
      const auto pred = pipeline::predict_task1(m1, split.dev, resources);
      for (std::size_t i = 0; i < pred.size(); ++i) {
        correct += pred[i] == *split.dev[i].relevance ? 1 : 0;
      }
    } else {
      const auto pred = pipeline::predict_task2(
          m2, split.dev, pipeline::gold_relevance(split.dev), resources);
      for (std::size_t i = 0; i < pred.size(); ++i) {
        correct += split.dev[i].stance && pred[i] == *split.dev[i].stance ? 1 : 0;
      }
    }
    const double acc = split.dev.empty() ? 0.0
                                         : static_cast<double>(correct) /
                                               static_cast<double>(split.dev.size());
    out << "dev accuracy (" << split.dev.size() << " rows): " << num(acc) << '\n';
    manifest.config["dev_accuracy"] = num(acc);
  }

  manifest.config["task"] = std::to_string(a.task);
  manifest.config["stance_classes"] = std::string(pipeline::to_string(cfg.stance_classes));
  manifest.config["train_fraction"] = num(cfg.train_fraction);
  manifest.config["retrain_full"] = cfg.retrain_full ? "true" : "false";
  record_svm(manifest, svm_cfg);
  finish_manifest(manifest, a.out);

  std::size_t n_sv = 0;
  bool converged = true;
  for (const auto& m : classifier->machines) {
    n_sv += m.support_vectors.size();
    converged = converged && m.converged;
  }
  out << "trained task " << a.task << " on " << subset.size() << " records: "
      << classifier->machines.size() << " machine(s), " << n_sv
      << " support vectors" << (converged ? "" : " (iteration budget exhausted)")
      << "\nwrote " << a.out.string() << '\n';
  return 0;
}

// predict -------------------------------------------------------------------

struct PredictArgs {
  fs::path data;
  fs::path task1_model;
  fs::path task2_model;
  fs::path out;
  LexiconArgs lexicons;
  bool chain = false;
};

std::size_t ensure_column(corpus::CsvTable& table, const std::string& name) {
  if (const auto c = table.column(name)) return *c;
  table.header.push_back(name);
  for (auto& row : table.rows) row.emplace_back();
  return table.header.size() - 1;
}

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  if (a.chain && (a.task1_model.empty() || a.task2_model.empty())) {
    throw CLI::ValidationError("--chain needs both --task1-model and --task2-model");
  }
  if (a.task1_model.empty() && a.task2_model.empty()) {
    throw CLI::ValidationError("give --task1-model and/or --task2-model");
  }
  RunManifest manifest = start_manifest("predict", 0);
  const auto resources = pipeline::Resources::load(a.lexicons.paths());
  auto table = corpus::read_csv_file(a.data);
  const auto records = corpus::records_from_table(table, false);
  manifest.add_input(a.data);
  a.lexicons.record(manifest);

  std::optional<std::vector<corpus::Relevance>> relevance;
  if (!a.task1_model.empty()) {
    const auto model = pipeline::load_task1(a.task1_model);
    manifest.add_input(a.task1_model);
    relevance = pipeline::predict_task1(model, records, resources);
    const auto col = ensure_column(table, "predicted_relevance");
    for (std::size_t i = 0; i < records.size(); ++i) {
      table.rows[i][col] = std::string(corpus::to_string((*relevance)[i]));
    }
  }
  if (!a.task2_model.empty()) {
    const auto model = pipeline::load_task2(a.task2_model);
    manifest.add_input(a.task2_model);
    if (!relevance) {
      // Without task 1 the relevance flag comes from the data's labels.
      relevance = pipeline::gold_relevance(corpus::records_from_table(table, true));
    }
    const auto stance = pipeline::predict_task2(model, records, *relevance, resources);
    const auto col = ensure_column(table, "predicted_stance");
    for (std::size_t i = 0; i < records.size(); ++i) {
      table.rows[i][col] = std::string(corpus::to_string(stance[i]));
    }
  }

  std::ostringstream csv;
  corpus::write_csv_row(csv, table.header);
  for (const auto& row : table.rows) corpus::write_csv_row(csv, row);
  if (a.out.empty()) {
    out << csv.str();
    return 0;
  }
  write_text(a.out, csv.str());
  manifest.config["chain"] = a.chain || (!a.task1_model.empty() && !a.task2_model.empty())
                                 ? "true" : "false";
  finish_manifest(manifest, a.out);
  out << "wrote " << records.size() << " predictions to " << a.out.string() << '\n';
  return 0;
}

// evaluate ------------------------------------------------------------------

struct EvaluateArgs {
  fs::path gold;
  fs::path pred;
  std::string column = "relevance";
  fs::path csv;
  std::string title;
};

std::vector<std::string> normalized_labels(const corpus::CsvTable& table,
                                           std::size_t col, bool relevance,
                                           const std::string& what) {
  std::vector<std::string> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cell = table.rows[r][col];
    std::optional<std::string> label;
    if (relevance) {
      if (auto v = corpus::parse_relevance(cell, r + 1)) label = corpus::to_string(*v);
    } else {
      if (auto v = corpus::parse_stance(cell, r + 1)) label = corpus::to_string(*v);
    }
    if (!label) throw Error(ErrorCode::BadLabel, "empty " + what + " label", r + 1);
    out.push_back(*label);
  }
  return out;
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const bool relevance = a.column == "relevance";
  const auto gold = corpus::read_csv_file(a.gold);
  const auto pred = corpus::read_csv_file(a.pred);
  const auto gold_col = gold.column(a.column);
  if (!gold_col) {
    throw Error(ErrorCode::MissingColumn, a.gold.string() + " has no '" + a.column + "' column");
  }
  auto pred_col = pred.column("predicted_" + a.column);
  if (!pred_col) pred_col = pred.column(a.column);
  if (!pred_col) {
    throw Error(ErrorCode::MissingColumn,
                a.pred.string() + " has no 'predicted_" + a.column + "' column");
  }
  const auto group_col = gold.column("query_id");
  if (!group_col) {
    throw Error(ErrorCode::MissingColumn, a.gold.string() + " has no 'query_id' column");
  }
  if (gold.rows.size() != pred.rows.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "gold has " + std::to_string(gold.rows.size()) + " rows, predictions " +
                    std::to_string(pred.rows.size()));
  }
  const auto g = normalized_labels(gold, *gold_col, relevance, "gold");
  const auto p = normalized_labels(pred, *pred_col, relevance, "predicted");
  std::vector<std::string> groups;
  groups.reserve(gold.rows.size());
  for (const auto& row : gold.rows) groups.push_back(row[*group_col]);

  const auto report = pipeline::evaluate(g, p, groups);
  const std::string title =
      a.title.empty() ? (relevance ? "Task 1 (relevance) accuracy"
                                   : "Task 2 (stance) accuracy")
                      : a.title;
  out << pipeline::render_table(report, title);
  if (!a.csv.empty()) {
    RunManifest manifest = start_manifest("evaluate", 0);
    manifest.add_input(a.gold);
    manifest.add_input(a.pred);
    manifest.config["column"] = a.column;
    write_text(a.csv, pipeline::render_csv(report));
    finish_manifest(manifest, a.csv);
  }
  return 0;
}

// features ------------------------------------------------------------------

struct FeaturesArgs {
  int task = 1;
  fs::path data;
  fs::path model;
  fs::path out;
  LexiconArgs lexicons;
};

int cmd_features(const FeaturesArgs& a, std::ostream& out) {
  RunManifest manifest = start_manifest("features", 0);
  const auto resources = pipeline::Resources::load(a.lexicons.paths());
  const auto table = corpus::read_csv_file(a.data);
  const auto records = corpus::records_from_table(table, false);
  manifest.add_input(a.data);
  a.lexicons.record(manifest);
  if (!a.model.empty()) manifest.add_input(a.model);

  std::ostringstream csv;
  std::vector<features::FeatureVector> rows;
  std::vector<std::string> header = {"query_id", "row"};
  if (a.task == 1) {
    const auto vocabularies = a.model.empty()
                                  ? pipeline::fit_query_vocabularies(records)
                                  : pipeline::load_task1(a.model).vocabularies;
    rows = pipeline::task1_feature_matrix(records, vocabularies, resources);
    csv << "# schema_id=task1-v1 dims=" << features::kTask1Dims << '\n';
    for (const char* name : {"exact", "stemmed", "noun", "neighborhood", "cosine"}) {
      header.emplace_back(name);
    }
  } else {
    features::VocabularyModel vocab;
    if (a.model.empty()) {
      std::vector<std::vector<textproc::Token>> sentences;
      for (const auto& r : records) sentences.push_back(textproc::tokenize(r.sentence_text));
      vocab = features::VocabularyModel::fit(sentences);
    } else {
      vocab = pipeline::load_task2(a.model).vocabulary;
    }
    // Relevance flag from the data's labels; unlabeled rows count as irrelevant.
    std::vector<corpus::Relevance> relevance;
    const auto rel_col = table.column("relevance");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto v = rel_col ? corpus::parse_relevance(table.rows[r][*rel_col], r + 1)
                             : std::nullopt;
      relevance.push_back(v.value_or(corpus::Relevance::Irrelevant));
    }
    rows = pipeline::task2_feature_matrix(records, relevance, vocab, resources);
    csv << "# schema_id=task2-v1 dims=" << vocab.size() + 4 << " N=" << vocab.size()
        << '\n';
    for (const auto& term : vocab.terms()) header.push_back("tfidf:" + term);
    for (const char* name : {"positive", "negative", "neutral", "relevance"}) {
      header.emplace_back(name);
    }
  }
  corpus::write_csv_row(csv, header);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<std::string> fields = {records[i].query_id, std::to_string(i + 1)};
    for (const double v : rows[i].values) fields.push_back(num(v));
    corpus::write_csv_row(csv, fields);
  }

  if (a.out.empty()) {
    out << csv.str();
    return 0;
  }
  write_text(a.out, csv.str());
  manifest.config["task"] = std::to_string(a.task);
  finish_manifest(manifest, a.out);
  out << "wrote " << rows.size() << " feature rows to " << a.out.string() << '\n';
  return 0;
}

// Reads key=value config files. Keys outside any [section] belong to the
// subcommand being run, so `task=1` in a file passed to `chis train` fills
// `--task`; [train]-style sections still address a subcommand explicitly.
class SubcommandConfig : public CLI::ConfigTOML {
 public:
  explicit SubcommandConfig(const CLI::App& app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigTOML::from_config(input);
    const auto active = app_.get_subcommands();
    if (active.empty()) return items;
    for (auto& item : items) {
      if (item.parents.empty()) item.parents.push_back(active.front()->get_name());
    }
    return items;
  }

 private:
  const CLI::App& app_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"chis: sentence relevance and stance classification for "
               "consumer health queries"};
  app.name("chis");
  app.set_version_flag("--version", CHIS_VERSION);
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; explicit flags win");
  app.config_formatter(std::make_shared<SubcommandConfig>(app));
  app.fallthrough();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a task-1 or task-2 model");
  train_cmd->add_option("--task", train.task, "1 = relevance, 2 = stance")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  train_cmd->add_option("--data", train.data, "Labeled dataset CSV")->required();
  train_cmd->add_option("--out", train.out, "Model file to write")->required();
  train.lexicons.bind(*train_cmd);
  train.svm.bind(*train_cmd);
  train_cmd->add_option("--stance-classes", train.stance_classes,
                        "three_class (default) or two_class");
  train_cmd->add_option("--train-fraction", train.train_fraction,
                        "Train share of the tuning split")
      ->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--seed", train.seed, "Random seed");
  train_cmd->add_flag("--retrain-full,!--no-retrain-full", train.retrain_full,
                      "Fit the final model on all rows (default) or on the "
                      "train side of the split only");
  train_cmd->add_option("--grid-C", train.grid_c, "C values to tune over")->delimiter(',');
  train_cmd->add_option("--grid-gamma", train.grid_gamma, "Gamma values to tune over")
      ->delimiter(',');

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Predict relevance and/or stance");
  predict_cmd->add_option("--data", predict.data, "Dataset CSV (labels ignored)")
      ->required();
  predict_cmd->add_option("--task1-model", predict.task1_model, "Task-1 model file");
  predict_cmd->add_option("--task2-model", predict.task2_model, "Task-2 model file");
  predict_cmd->add_option("--out", predict.out, "Predictions CSV (default: stdout)");
  predict_cmd->add_flag("--chain", predict.chain,
                        "Feed task-1 predictions into task 2's relevance flag");
  predict.lexicons.bind(*predict_cmd);

  EvaluateArgs evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "Per-query accuracy and macro average");
  eval_cmd->add_option("--gold", evaluate.gold, "Gold dataset CSV")->required();
  eval_cmd->add_option("--pred", evaluate.pred, "Predictions CSV")->required();
  eval_cmd->add_option("--column", evaluate.column, "relevance or stance")
      ->check(CLI::IsMember({"relevance", "stance"}));
  eval_cmd->add_option("--csv", evaluate.csv, "Also write the report as CSV");
  eval_cmd->add_option("--title", evaluate.title, "Table title");

  FeaturesArgs feats;
  auto* feat_cmd = app.add_subcommand("features", "Dump feature vectors as CSV");
  feat_cmd->add_option("--task", feats.task, "1 or 2")->check(CLI::IsMember({1, 2}));
  feat_cmd->add_option("--data", feats.data, "Dataset CSV")->required();
  feat_cmd->add_option("--model", feats.model,
                       "Model whose vocabularies to use (default: fit on data)");
  feat_cmd->add_option("--out", feats.out, "Feature CSV (default: stdout)");
  feats.lexicons.bind(*feat_cmd);

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("chis");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train_cmd) return cmd_train(train, out);
    if (*predict_cmd) return cmd_predict(predict, out);
    if (*eval_cmd) return cmd_evaluate(evaluate, out);
    if (*feat_cmd) return cmd_features(feats, out);
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidArgument ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace chis::cli
