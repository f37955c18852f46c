#pragma once

// End-to-end orchestration: task 1 (relevance) feeds its predicted label into
// the relevance flag of task 2 (stance).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chis/corpus.hpp"
#include "chis/features.hpp"
#include "chis/lexicons.hpp"
#include "chis/svm.hpp"

namespace chis::pipeline {

using corpus::Relevance;
using corpus::SentenceRecord;
using corpus::Stance;

enum class StanceClasses { ThreeClass, TwoClass };

std::string_view to_string(StanceClasses s);
StanceClasses parse_stance_classes(std::string_view text);

/// C = 1e7, poly kernel (gamma 0.006, degree 3, coef0 0).
svm::SvmConfig default_task1_svm();
/// C = 1e7, rbf kernel (gamma 0.005).
svm::SvmConfig default_task2_svm();

struct LexiconPaths {
  std::filesystem::path nouns;
  std::filesystem::path gloss;
  std::filesystem::path sentiment;
};

/// Loaded word resources. Any path left empty yields an empty resource.
struct Resources {
  lexicons::GlossDictionary gloss;
  lexicons::NounLexicon nouns;
  lexicons::SentimentLexicon sentiment;

  static Resources load(const LexiconPaths& paths);
};

struct PipelineConfig {
  svm::SvmConfig task1 = default_task1_svm();
  svm::SvmConfig task2 = default_task2_svm();
  StanceClasses stance_classes = StanceClasses::ThreeClass;
  double train_fraction = 0.6;
  std::uint64_t seed = 0;
  bool retrain_full = true;
  LexiconPaths lexicons;
};

struct Task1Model {
  svm::MulticlassModel classifier;
  std::map<std::string, features::VocabularyModel> vocabularies;  // per query_id
};

struct Task2Model {
  svm::MulticlassModel classifier;
  features::VocabularyModel vocabulary;  // global
  StanceClasses stance_classes = StanceClasses::ThreeClass;
};

struct TrainedPipeline {
  Task1Model task1;
  Task2Model task2;
  PipelineConfig config;
};

struct ChainedPrediction {
  std::vector<Relevance> relevance;
  std::vector<Stance> stance;
};

/// Per-query vocabularies over each group's sentences.
std::map<std::string, features::VocabularyModel> fit_query_vocabularies(
    std::span<const SentenceRecord> records);

/// Task-1 vectors in record order. Queries absent from `vocabularies` get a
/// vocabulary fitted on their own sentences.
std::vector<features::FeatureVector> task1_feature_matrix(
    std::span<const SentenceRecord> records,
    const std::map<std::string, features::VocabularyModel>& vocabularies,
    const Resources& resources);

std::vector<features::FeatureVector> task2_feature_matrix(
    std::span<const SentenceRecord> records, std::span<const Relevance> relevance,
    const features::VocabularyModel& vocabulary, const Resources& resources);

/// The records actually used for training: all of them when
/// cfg.retrain_full, otherwise the train side of the seeded split.
std::vector<SentenceRecord> training_subset(std::span<const SentenceRecord> records,
                                            const PipelineConfig& cfg);

Task1Model train_task1(std::span<const SentenceRecord> records,
                       const Resources& resources, const PipelineConfig& cfg);

std::vector<Relevance> predict_task1(const Task1Model& model,
                                     std::span<const SentenceRecord> records,
                                     const Resources& resources);

/// `relevance` supplies each record's relevance flag (gold labels at
/// training time).
Task2Model train_task2(std::span<const SentenceRecord> records,
                       std::span<const Relevance> relevance,
                       const Resources& resources, const PipelineConfig& cfg);

/// In two-class mode, records predicted irrelevant come back neutral
/// without consulting the classifier.
std::vector<Stance> predict_task2(const Task2Model& model,
                                  std::span<const SentenceRecord> records,
                                  std::span<const Relevance> task1_predictions,
                                  const Resources& resources);

/// Trains both tasks; task 2 uses the gold relevance labels.
TrainedPipeline train_pipeline(std::span<const SentenceRecord> records,
                               const Resources& resources,
                               const PipelineConfig& cfg);

ChainedPrediction predict_chain(const TrainedPipeline& pipeline,
                                std::span<const SentenceRecord> records,
                                const Resources& resources);

std::vector<Relevance> gold_relevance(std::span<const SentenceRecord> records);

// Evaluation ---------------------------------------------------------------

struct QueryAccuracy {
  std::string query_id;
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;  // percent
};

struct EvaluationReport {
  std::vector<QueryAccuracy> rows;  // order of first appearance
  double macro_average = 0.0;       // unweighted mean of row accuracies
};

/// Unweighted mean; throws EmptyInput on an empty span.
double macro_average(std::span<const double> accuracies);

EvaluationReport evaluate(std::span<const std::string> gold,
                          std::span<const std::string> predicted,
                          std::span<const std::string> groups);

/// Aligned text table, one row per query plus the macro average.
std::string render_table(const EvaluationReport& report, std::string_view title);
/// `query_id,accuracy` rows followed by a MACRO_AVERAGE row.
std::string render_csv(const EvaluationReport& report);

// Tuning -------------------------------------------------------------------

enum class Task { Relevance, Stance };

struct GridResult {
  svm::SvmConfig best;
  double dev_accuracy = 0.0;         // fraction in [0, 1]
  std::vector<double> accuracies;    // one per grid point, grid order
};

/// Trains each grid point on the train side of split_train_dev and scores
/// accuracy on the dev side. Ties keep the earliest grid point.
GridResult grid_search(std::span<const SentenceRecord> records,
                       std::span<const svm::SvmConfig> grid, Task task,
                       const Resources& resources, const PipelineConfig& cfg);

/// Cartesian product of C values and gammas over a base configuration.
std::vector<svm::SvmConfig> make_grid(const svm::SvmConfig& base,
                                      std::span<const double> c_values,
                                      std::span<const double> gammas);

// Model files --------------------------------------------------------------

std::string serialize(const Task1Model& model);
std::string serialize(const Task2Model& model);
Task1Model deserialize_task1(std::string_view text);
Task2Model deserialize_task2(std::string_view text);

void save(const Task1Model& model, const std::filesystem::path& path);
void save(const Task2Model& model, const std::filesystem::path& path);
/// Throws SchemaMismatch when the file holds the other task's model.
Task1Model load_task1(const std::filesystem::path& path);
Task2Model load_task2(const std::filesystem::path& path);

/// Schema recorded in a model file, without loading the rest.
features::Schema peek_schema(const std::filesystem::path& path);

}  // namespace chis::pipeline
