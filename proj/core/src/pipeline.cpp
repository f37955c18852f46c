#include "chis/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "chis/error.hpp"
#include "detail.hpp"
#include "model_json.hpp"

namespace chis::pipeline {

using features::FeatureVector;
using features::VocabularyModel;

std::string_view to_string(StanceClasses s) {
  return s == StanceClasses::ThreeClass ? "three_class" : "two_class";
}

StanceClasses parse_stance_classes(std::string_view text) {
  const std::string v = detail::ascii_lower(detail::trim(text));
  if (v == "three_class" || v == "3") return StanceClasses::ThreeClass;
  if (v == "two_class" || v == "2") return StanceClasses::TwoClass;
  throw Error(ErrorCode::InvalidArgument,
              "stance classes must be three_class or two_class, got '" +
                  std::string(text) + "'");
}

svm::SvmConfig default_task1_svm() {
  svm::SvmConfig cfg;
  cfg.c = 1e7;
  cfg.kernel = {svm::KernelKind::Poly, 0.006, 3, 0.0};
  return cfg;
}

svm::SvmConfig default_task2_svm() {
  svm::SvmConfig cfg;
  cfg.c = 1e7;
  cfg.kernel = {svm::KernelKind::Rbf, 0.005, 3, 0.0};
  return cfg;
}

Resources Resources::load(const LexiconPaths& paths) {
  Resources r;
  if (!paths.gloss.empty()) r.gloss = lexicons::GlossDictionary::load(paths.gloss);
  if (!paths.nouns.empty()) r.nouns = lexicons::NounLexicon::load(paths.nouns);
  if (!paths.sentiment.empty()) {
    r.sentiment = lexicons::SentimentLexicon::load(paths.sentiment);
  }
  return r;
}

std::map<std::string, VocabularyModel> fit_query_vocabularies(
    std::span<const SentenceRecord> records) {
  std::map<std::string, std::vector<std::vector<textproc::Token>>> sentences;
  for (const auto& rec : records) {
    sentences[rec.query_id].push_back(textproc::tokenize(rec.sentence_text));
  }
  std::map<std::string, VocabularyModel> out;
  for (const auto& [query_id, tokens] : sentences) {
    out.emplace(query_id, VocabularyModel::fit(tokens));
  }
  return out;
}

std::vector<FeatureVector> task1_feature_matrix(
    std::span<const SentenceRecord> records,
    const std::map<std::string, VocabularyModel>& vocabularies,
    const Resources& resources) {
  // Vocabularies for queries never seen in training.
  std::vector<SentenceRecord> unseen;
  for (const auto& rec : records) {
    if (!vocabularies.contains(rec.query_id)) unseen.push_back(rec);
  }
  const auto fallback = fit_query_vocabularies(unseen);

  std::vector<FeatureVector> out;
  out.reserve(records.size());
  for (const auto& rec : records) {
    const auto it = vocabularies.find(rec.query_id);
    const VocabularyModel& vocab =
        it != vocabularies.end() ? it->second : fallback.at(rec.query_id);
    out.push_back(features::task1_features(rec.query_text, rec.sentence_text,
                                           vocab, resources.gloss, resources.nouns));
  }
  return out;
}

std::vector<FeatureVector> task2_feature_matrix(
    std::span<const SentenceRecord> records, std::span<const Relevance> relevance,
    const VocabularyModel& vocabulary, const Resources& resources) {
  if (records.size() != relevance.size()) {
    throw Error(ErrorCode::AlignmentError,
                std::to_string(records.size()) + " records but " +
                    std::to_string(relevance.size()) + " relevance labels");
  }
  std::vector<FeatureVector> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    out.push_back(features::task2_features(records[i].sentence_text,
                                           relevance[i] == Relevance::Relevant,
                                           vocabulary, resources.sentiment));
  }
  return out;
}

std::vector<SentenceRecord> training_subset(std::span<const SentenceRecord> records,
                                            const PipelineConfig& cfg) {
  if (cfg.retrain_full) return {records.begin(), records.end()};
  return corpus::split_train_dev(records, cfg.train_fraction, cfg.seed).train;
}

std::vector<Relevance> gold_relevance(std::span<const SentenceRecord> records) {
  std::vector<Relevance> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].relevance) {
      throw Error(ErrorCode::UnlabeledRecord, "record has no relevance label", i + 1);
    }
    out.push_back(*records[i].relevance);
  }
  return out;
}

Task1Model train_task1(std::span<const SentenceRecord> records,
                       const Resources& resources, const PipelineConfig& cfg) {
  const auto gold = gold_relevance(records);
  Task1Model model;
  model.vocabularies = fit_query_vocabularies(records);
  const auto x = task1_feature_matrix(records, model.vocabularies, resources);
  std::vector<std::string> y;
  y.reserve(gold.size());
  for (const auto r : gold) y.emplace_back(corpus::to_string(r));
  model.classifier = svm::train_multiclass(x, y, cfg.task1, cfg.seed);
  return model;
}

std::vector<Relevance> predict_task1(const Task1Model& model,
                                     std::span<const SentenceRecord> records,
                                     const Resources& resources) {
  const auto x = task1_feature_matrix(records, model.vocabularies, resources);
  std::vector<Relevance> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.push_back(*corpus::parse_relevance(svm::predict(model.classifier, x[i]), i + 1));
  }
  return out;
}

Task2Model train_task2(std::span<const SentenceRecord> records,
                       std::span<const Relevance> relevance,
                       const Resources& resources, const PipelineConfig& cfg) {
  if (records.size() != relevance.size()) {
    throw Error(ErrorCode::AlignmentError, "records and relevance labels differ in length");
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].stance) {
      throw Error(ErrorCode::MissingStanceLabel, "record has no stance label", i + 1);
    }
  }
  if (records.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "no task-2 training records");
  }

  Task2Model model;
  model.stance_classes = cfg.stance_classes;
  std::vector<std::vector<textproc::Token>> sentences;
  sentences.reserve(records.size());
  for (const auto& rec : records) {
    sentences.push_back(textproc::tokenize(rec.sentence_text));
  }
  model.vocabulary = VocabularyModel::fit(sentences);

  std::vector<SentenceRecord> kept;
  std::vector<Relevance> kept_relevance;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (cfg.stance_classes == StanceClasses::TwoClass &&
        *records[i].stance == Stance::Neutral) {
      continue;
    }
    kept.push_back(records[i]);
    kept_relevance.push_back(relevance[i]);
  }
  const auto x = task2_feature_matrix(kept, kept_relevance, model.vocabulary, resources);
  std::vector<std::string> y;
  y.reserve(kept.size());
  for (const auto& rec : kept) y.emplace_back(corpus::to_string(*rec.stance));
  model.classifier = svm::train_multiclass(x, y, cfg.task2, cfg.seed);
  return model;
}

std::vector<Stance> predict_task2(const Task2Model& model,
                                  std::span<const SentenceRecord> records,
                                  std::span<const Relevance> task1_predictions,
                                  const Resources& resources) {
  if (records.size() != task1_predictions.size()) {
    throw Error(ErrorCode::AlignmentError,
                std::to_string(records.size()) + " records but " +
                    std::to_string(task1_predictions.size()) +
                    " task-1 predictions");
  }
  const auto x =
      task2_feature_matrix(records, task1_predictions, model.vocabulary, resources);
  std::vector<Stance> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (model.stance_classes == StanceClasses::TwoClass &&
        task1_predictions[i] == Relevance::Irrelevant) {
      out.push_back(Stance::Neutral);
      continue;
    }
    out.push_back(*corpus::parse_stance(svm::predict(model.classifier, x[i]), i + 1));
  }
  return out;
}

TrainedPipeline train_pipeline(std::span<const SentenceRecord> records,
                               const Resources& resources,
                               const PipelineConfig& cfg) {
  const auto subset = training_subset(records, cfg);
  TrainedPipeline p;
  p.config = cfg;
  p.task1 = train_task1(subset, resources, cfg);
  p.task2 = train_task2(subset, gold_relevance(subset), resources, cfg);
  return p;
}

ChainedPrediction predict_chain(const TrainedPipeline& pipeline,
                                std::span<const SentenceRecord> records,
                                const Resources& resources) {
  ChainedPrediction out;
  out.relevance = predict_task1(pipeline.task1, records, resources);
  out.stance = predict_task2(pipeline.task2, records, out.relevance, resources);
  return out;
}

std::vector<svm::SvmConfig> make_grid(const svm::SvmConfig& base,
                                      std::span<const double> c_values,
                                      std::span<const double> gammas) {
  std::vector<svm::SvmConfig> grid;
  for (const double c : c_values) {
    for (const double g : gammas) {
      auto cfg = base;
      cfg.c = c;
      cfg.kernel.gamma = g;
      grid.push_back(cfg);
    }
  }
  return grid;
}

GridResult grid_search(std::span<const SentenceRecord> records,
                       std::span<const svm::SvmConfig> grid, Task task,
                       const Resources& resources, const PipelineConfig& cfg) {
  if (grid.empty()) {
    throw Error(ErrorCode::InvalidArgument, "parameter grid is empty");
  }
  const auto split = corpus::split_train_dev(records, cfg.train_fraction, cfg.seed);
  if (split.dev.empty()) {
    throw Error(ErrorCode::EmptyInput, "dev side of the split is empty");
  }

  GridResult result;
  result.dev_accuracy = -1.0;
  for (const auto& point : grid) {
    PipelineConfig run = cfg;
    std::size_t correct = 0;
    if (task == Task::Relevance) {
      run.task1 = point;
      const auto model = train_task1(split.train, resources, run);
      const auto predicted = predict_task1(model, split.dev, resources);
      for (std::size_t i = 0; i < predicted.size(); ++i) {
        correct += predicted[i] == *split.dev[i].relevance ? 1 : 0;
      }
    } else {
      run.task2 = point;
      const auto model =
          train_task2(split.train, gold_relevance(split.train), resources, run);
      const auto predicted =
          predict_task2(model, split.dev, gold_relevance(split.dev), resources);
      for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (!split.dev[i].stance) {
          throw Error(ErrorCode::MissingStanceLabel, "dev record has no stance", i + 1);
        }
        correct += predicted[i] == *split.dev[i].stance ? 1 : 0;
      }
    }
    const double accuracy =
        static_cast<double>(correct) / static_cast<double>(split.dev.size());
    result.accuracies.push_back(accuracy);
    if (accuracy > result.dev_accuracy) {
      result.dev_accuracy = accuracy;
      result.best = point;
    }
  }
  return result;
}

// Model files --------------------------------------------------------------

namespace {

using nlohmann::json;

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptModel, std::string("unparseable model: ") + e.what());
  }
}

void expect_schema(const svm::MulticlassModel& model, features::Schema want) {
  if (model.schema != want) {
    throw Error(ErrorCode::SchemaMismatch,
                "model file holds a " +
                    std::string(features::to_string(model.schema)) +
                    " model, expected " + std::string(features::to_string(want)));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace

std::string serialize(const Task1Model& model) {
  json doc = detail::model_to_json(model.classifier);
  json vocabularies = json::object();
  for (const auto& [query_id, vocab] : model.vocabularies) {
    vocabularies[query_id] = detail::vocabulary_to_json(vocab);
  }
  doc["vocabularies"] = std::move(vocabularies);
  return doc.dump(1) + "\n";
}

std::string serialize(const Task2Model& model) {
  json doc = detail::model_to_json(model.classifier);
  doc["vocabulary"] = detail::vocabulary_to_json(model.vocabulary);
  doc["stance_classes"] = std::string(to_string(model.stance_classes));
  return doc.dump(1) + "\n";
}

Task1Model deserialize_task1(std::string_view text) {
  const json doc = parse_document(text);
  Task1Model model;
  model.classifier = detail::model_from_json(doc);
  expect_schema(model.classifier, features::Schema::Task1V1);
  try {
    for (const auto& [query_id, vocab] : doc.at("vocabularies").items()) {
      model.vocabularies.emplace(query_id, detail::vocabulary_from_json(vocab));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptModel, std::string("malformed model: ") + e.what());
  }
  return model;
}

Task2Model deserialize_task2(std::string_view text) {
  const json doc = parse_document(text);
  Task2Model model;
  model.classifier = detail::model_from_json(doc);
  expect_schema(model.classifier, features::Schema::Task2V1);
  try {
    model.vocabulary = detail::vocabulary_from_json(doc.at("vocabulary"));
    model.stance_classes =
        parse_stance_classes(doc.at("stance_classes").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptModel, std::string("malformed model: ") + e.what());
  }
  if (model.classifier.dims != model.vocabulary.size() + 4) {
    throw Error(ErrorCode::CorruptModel, "classifier dims do not match vocabulary size + 4");
  }
  return model;
}

void save(const Task1Model& model, const std::filesystem::path& path) {
  write_file(path, serialize(model));
}

void save(const Task2Model& model, const std::filesystem::path& path) {
  write_file(path, serialize(model));
}

Task1Model load_task1(const std::filesystem::path& path) {
  return deserialize_task1(read_file(path));
}

Task2Model load_task2(const std::filesystem::path& path) {
  return deserialize_task2(read_file(path));
}

features::Schema peek_schema(const std::filesystem::path& path) {
  const json doc = parse_document(read_file(path));
  try {
    return features::parse_schema(doc.at("schema_id").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptModel, std::string("malformed model: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::CorruptModel, e.what());
  }
}

}  // namespace chis::pipeline
