#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "chis/error.hpp"
#include "chis/pipeline.hpp"
#include "synthetic_corpus.hpp"
#include "temp_dir.hpp"

using namespace chis;
using namespace chis::pipeline;

namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no chis::Error thrown";
  return ErrorCode::InvalidArgument;
}

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new std::filesystem::path(chis::testing::temp_dir("chis_pipeline_test"));
    std::filesystem::create_directories(*dir_);
    synth::write_lexicons(*dir_);
  }
  static void TearDownTestSuite() {
    std::filesystem::remove_all(*dir_);
    delete dir_;
  }

  static LexiconPaths paths() {
    return {*dir_ / "nouns.txt", *dir_ / "gloss.tsv", *dir_ / "sentiment.tsv"};
  }
  static Resources resources() { return Resources::load(paths()); }
  static std::vector<SentenceRecord> corpus(std::size_t per_query, std::uint64_t seed) {
    return synth::generate_corpus({std::vector<std::size_t>(5, per_query), seed, 0.5});
  }

  static std::filesystem::path* dir_;
};

std::filesystem::path* PipelineTest::dir_ = nullptr;

std::vector<std::string> relevance_strings(const std::vector<Relevance>& v) {
  std::vector<std::string> out;
  for (auto r : v) out.emplace_back(corpus::to_string(r));
  return out;
}

}  // namespace

TEST(Defaults, MatchPublishedSettings) {
  const auto t1 = default_task1_svm();
  EXPECT_EQ(t1.c, 1e7);
  EXPECT_EQ(t1.kernel.kind, svm::KernelKind::Poly);
  EXPECT_EQ(t1.kernel.gamma, 0.006);
  EXPECT_EQ(t1.kernel.degree, 3);
  EXPECT_EQ(t1.kernel.coef0, 0.0);
  const auto t2 = default_task2_svm();
  EXPECT_EQ(t2.c, 1e7);
  EXPECT_EQ(t2.kernel.kind, svm::KernelKind::Rbf);
  EXPECT_EQ(t2.kernel.gamma, 0.005);
  const PipelineConfig cfg;
  EXPECT_EQ(cfg.stance_classes, StanceClasses::ThreeClass);
  EXPECT_EQ(cfg.train_fraction, 0.6);
  EXPECT_TRUE(cfg.retrain_full);
  EXPECT_EQ(parse_stance_classes("Two_Class"), StanceClasses::TwoClass);
  EXPECT_EQ(parse_stance_classes("3"), StanceClasses::ThreeClass);
  EXPECT_THROW(parse_stance_classes("four"), Error);
}

TEST_F(PipelineTest, Task1SeparableCorpusFitsTrainingSet) {
  const auto recs = corpus(24, 1);
  const auto res = resources();
  const auto model = train_task1(recs, res, PipelineConfig{});
  EXPECT_EQ(model.classifier.machines.size(), 1u);
  EXPECT_EQ(model.classifier.labels, (std::vector<std::string>{"irrelevant", "relevant"}));
  EXPECT_EQ(model.vocabularies.size(), 5u);
  const auto predicted = predict_task1(model, recs, res);
  EXPECT_EQ(predicted, gold_relevance(recs));
  EXPECT_TRUE(predict_task1(model, std::vector<SentenceRecord>{}, res).empty());
}

TEST_F(PipelineTest, Task1UnseenQueryGetsItsOwnVocabulary) {
  const auto res = resources();
  const auto model = train_task1(corpus(16, 2), res, PipelineConfig{});
  std::vector<SentenceRecord> fresh = {
      {"new_query", "Is coffee bad for the heart?", "Coffee and the heart are linked.", {}, {}},
      {"new_query", "Is coffee bad for the heart?", "Football weather garden traffic.", {}, {}},
  };
  const auto predicted = predict_task1(model, fresh, res);
  ASSERT_EQ(predicted.size(), 2u);
  EXPECT_EQ(predicted[1], Relevance::Irrelevant);
}

TEST_F(PipelineTest, Task1SingleClass) {
  auto recs = corpus(6, 3);
  for (auto& r : recs) r.relevance = Relevance::Relevant;
  EXPECT_EQ(code_of([&] { train_task1(recs, resources(), PipelineConfig{}); }),
            ErrorCode::SingleClassInput);
}

TEST_F(PipelineTest, Task2DimensionsAndMachines) {
  const auto recs = corpus(20, 4);
  const auto res = resources();
  const auto model = train_task2(recs, gold_relevance(recs), res, PipelineConfig{});
  EXPECT_EQ(model.classifier.machines.size(), 3u);
  EXPECT_EQ(model.classifier.dims, model.vocabulary.size() + 4);
  std::set<std::string> distinct;
  for (const auto& r : recs) {
    for (const auto& t : textproc::tokenize(r.sentence_text)) distinct.insert(t);
  }
  EXPECT_EQ(model.vocabulary.size(), distinct.size());
  const auto x = task2_feature_matrix(recs, gold_relevance(recs), model.vocabulary, res);
  for (const auto& v : x) EXPECT_EQ(v.dims(), distinct.size() + 4);
}

TEST_F(PipelineTest, Task2TwoClassDropsNeutralAndMasksIrrelevant) {
  const auto recs = corpus(20, 5);
  const auto res = resources();
  PipelineConfig cfg;
  cfg.stance_classes = StanceClasses::TwoClass;
  const auto model = train_task2(recs, gold_relevance(recs), res, cfg);
  EXPECT_EQ(model.classifier.labels, (std::vector<std::string>{"oppose", "support"}));
  EXPECT_EQ(model.classifier.machines.size(), 1u);

  std::vector<Relevance> flags(recs.size(), Relevance::Irrelevant);
  for (auto s : predict_task2(model, recs, flags, res)) EXPECT_EQ(s, Stance::Neutral);
  flags.assign(recs.size(), Relevance::Relevant);
  for (auto s : predict_task2(model, recs, flags, res)) EXPECT_NE(s, Stance::Neutral);
}

TEST_F(PipelineTest, Task2Errors) {
  auto recs = corpus(6, 6);
  const auto res = resources();
  EXPECT_EQ(code_of([&] {
              train_task2(recs, std::vector<Relevance>(recs.size() - 1), res, PipelineConfig{});
            }),
            ErrorCode::AlignmentError);
  const auto model = train_task2(recs, gold_relevance(recs), res, PipelineConfig{});
  EXPECT_EQ(code_of([&] {
              predict_task2(model, recs, std::vector<Relevance>(2), res);
            }),
            ErrorCode::AlignmentError);
  recs[3].stance.reset();
  EXPECT_EQ(code_of([&] {
              train_task2(recs, gold_relevance(recs), res, PipelineConfig{});
            }),
            ErrorCode::MissingStanceLabel);
  EXPECT_EQ(code_of([&] {
              train_task2(std::vector<SentenceRecord>{}, std::vector<Relevance>{}, res,
                          PipelineConfig{});
            }),
            ErrorCode::EmptyCorpus);
}

TEST_F(PipelineTest, ChainFeedsPredictedRelevance) {
  const auto train = corpus(30, 7);
  const auto test = corpus(10, 8);
  const auto res = resources();
  const auto p = train_pipeline(train, res, PipelineConfig{});
  const auto chained = predict_chain(p, test, res);
  ASSERT_EQ(chained.relevance.size(), test.size());
  ASSERT_EQ(chained.stance.size(), test.size());
  EXPECT_EQ(chained.relevance, predict_task1(p.task1, test, res));
  EXPECT_EQ(chained.stance, predict_task2(p.task2, test, chained.relevance, res));
  const auto again = predict_chain(train_pipeline(train, res, PipelineConfig{}), test, res);
  EXPECT_EQ(again.relevance, chained.relevance);
  EXPECT_EQ(again.stance, chained.stance);
}

TEST_F(PipelineTest, RetrainFullControlsTrainingSubset) {
  const auto recs = corpus(10, 9);
  PipelineConfig cfg;
  EXPECT_EQ(training_subset(recs, cfg).size(), recs.size());
  cfg.retrain_full = false;
  EXPECT_EQ(training_subset(recs, cfg).size(), 30u);
}

TEST_F(PipelineTest, ModelFilesRoundTripAndAreDeterministic) {
  const auto recs = corpus(16, 10);
  const auto res = resources();
  const auto p = train_pipeline(recs, res, PipelineConfig{});
  const auto q = train_pipeline(recs, res, PipelineConfig{});
  EXPECT_EQ(serialize(p.task1), serialize(q.task1));
  EXPECT_EQ(serialize(p.task2), serialize(q.task2));

  const auto dir = chis::testing::temp_dir("chis_pipeline_models");
  std::filesystem::create_directories(dir);
  save(p.task1, dir / "t1.json");
  save(p.task2, dir / "t2.json");
  EXPECT_EQ(peek_schema(dir / "t1.json"), features::Schema::Task1V1);
  EXPECT_EQ(peek_schema(dir / "t2.json"), features::Schema::Task2V1);
  const auto t1 = load_task1(dir / "t1.json");
  const auto t2 = load_task2(dir / "t2.json");
  EXPECT_EQ(serialize(t1), serialize(p.task1));
  EXPECT_EQ(serialize(t2), serialize(p.task2));
  EXPECT_EQ(predict_task1(t1, recs, res), predict_task1(p.task1, recs, res));
  EXPECT_EQ(code_of([&] { load_task1(dir / "t2.json"); }), ErrorCode::SchemaMismatch);
  EXPECT_EQ(code_of([&] { load_task2(dir / "t1.json"); }), ErrorCode::SchemaMismatch);
  std::filesystem::remove_all(dir);
}

TEST_F(PipelineTest, GridSearchPicksSeparatingConfig) {
  const auto recs = corpus(20, 11);
  const auto res = resources();
  PipelineConfig cfg;
  svm::SvmConfig weak = default_task1_svm();
  weak.c = 1e-6;  // too small to move the bias off the majority class
  svm::SvmConfig strong = default_task1_svm();
  const std::vector<svm::SvmConfig> grid = {weak, strong};
  const auto result = grid_search(recs, grid, Task::Relevance, res, cfg);
  ASSERT_EQ(result.accuracies.size(), 2u);
  EXPECT_EQ(result.dev_accuracy, 1.0);
  EXPECT_EQ(result.best, strong);
  const auto repeat = grid_search(recs, grid, Task::Relevance, res, cfg);
  EXPECT_EQ(repeat.accuracies, result.accuracies);

  const std::vector<svm::SvmConfig> single = {weak};
  EXPECT_EQ(grid_search(recs, single, Task::Relevance, res, cfg).best, weak);

  // Equal dev accuracy (only the pruning floor differs); the earlier one is kept.
  svm::SvmConfig also_strong = strong;
  also_strong.eps = strong.eps / 2;
  const std::vector<svm::SvmConfig> ties = {also_strong, strong};
  const auto tied = grid_search(recs, ties, Task::Relevance, res, cfg);
  EXPECT_EQ(tied.accuracies, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(tied.best, also_strong);

  const auto stance = grid_search(recs, std::vector<svm::SvmConfig>{default_task2_svm()},
                                  Task::Stance, res, cfg);
  EXPECT_GE(stance.dev_accuracy, 0.9);
  EXPECT_THROW(grid_search(recs, std::vector<svm::SvmConfig>{}, Task::Relevance, res, cfg),
               Error);
}

TEST(MakeGrid, CartesianProduct) {
  const std::vector<double> cs = {1, 10};
  const std::vector<double> gs = {0.1, 0.2, 0.3};
  const auto grid = make_grid(default_task2_svm(), cs, gs);
  ASSERT_EQ(grid.size(), 6u);
  EXPECT_EQ(grid[0].c, 1.0);
  EXPECT_EQ(grid[0].kernel.gamma, 0.1);
  EXPECT_EQ(grid[5].c, 10.0);
  EXPECT_EQ(grid[5].kernel.gamma, 0.3);
  EXPECT_EQ(grid[5].kernel.kind, svm::KernelKind::Rbf);
}

TEST_F(PipelineTest, MissingLexiconIsIoError) {
  LexiconPaths p = paths();
  p.gloss = *dir_ / "absent.tsv";
  EXPECT_EQ(code_of([&] { Resources::load(p); }), ErrorCode::Io);
  EXPECT_EQ(Resources::load(LexiconPaths{}).gloss.size(), 0u);
}

TEST_F(PipelineTest, PredictionsRenderAsLabels) {
  const auto recs = corpus(8, 12);
  const auto res = resources();
  const auto model = train_task1(recs, res, PipelineConfig{});
  for (const auto& s : relevance_strings(predict_task1(model, recs, res))) {
    EXPECT_TRUE(s == "relevant" || s == "irrelevant");
  }
}
