#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "chis/error.hpp"
#include "chis/svm.hpp"
#include "oracles.hpp"
#include "svm_fixtures.hpp"
#include "temp_dir.hpp"

using namespace chis;
using namespace chis::svm;
using chis::testing::as_vectors;
using chis::testing::make_cfg;

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

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = chis::testing::temp_dir("chis_svm_test");
  std::filesystem::create_directories(dir);
  return dir / name;
}

MulticlassModel blobs_model(std::vector<features::FeatureVector>* xs = nullptr,
                            std::vector<std::string>* ys = nullptr) {
  std::vector<std::vector<double>> x;
  std::vector<std::string> y;
  const double centers[3][2] = {{0, 0}, {5, 0}, {0, 5}};
  const char* names[3] = {"oppose", "support", "neutral"};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> jitter(-0.5, 0.5);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 4; ++i) {
      x.push_back({centers[c][0] + jitter(rng), centers[c][1] + jitter(rng)});
      y.push_back(names[c]);
    }
  }
  auto fx = as_vectors(x);
  auto model = train_multiclass(fx, y, make_cfg(1e7, KernelKind::Linear), 0);
  if (xs) *xs = fx;
  if (ys) *ys = y;
  return model;
}

BinaryModel constant_machine(double bias, std::string pos, std::string neg) {
  BinaryModel m;
  m.bias = bias;
  m.positive_label = std::move(pos);
  m.negative_label = std::move(neg);
  m.converged = true;
  return m;
}

}  // namespace

TEST(Kernel, Values) {
  KernelConfig rbf;
  const std::vector<double> u = {0.3, -1.2, 4.0};
  EXPECT_EQ(kernel_eval(rbf, u, u), 1.0);
  KernelConfig lin{KernelKind::Linear};
  EXPECT_EQ(kernel_eval(lin, std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
  KernelConfig poly{KernelKind::Poly, 0.006, 3, 0.0};
  EXPECT_NEAR(kernel_eval(poly, std::vector<double>{10.0}, std::vector<double>{1.0}),
              2.16e-4, 1e-18);
  EXPECT_EQ(code_of([&] {
              kernel_eval(lin, std::vector<double>{1}, std::vector<double>{1, 2});
            }),
            ErrorCode::DimensionMismatch);
}

TEST(Kernel, SymmetricAndRbfUnitDiagonal) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  const KernelConfig kernels[] = {{KernelKind::Linear}, {KernelKind::Poly, 0.3, 3, 1.0},
                                  {KernelKind::Rbf, 0.7}};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> u(4), v(4);
    for (auto& a : u) a = g(rng);
    for (auto& a : v) a = g(rng);
    for (const auto& k : kernels) EXPECT_EQ(kernel_eval(k, u, v), kernel_eval(k, v, u));
    EXPECT_EQ(kernel_eval(kernels[2], u, u), 1.0);
  }
}

TEST(Config, Validation) {
  EXPECT_EQ(code_of([] { make_cfg(0.0, KernelKind::Rbf).validate(); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { make_cfg(1.0, KernelKind::Rbf, -1.0).validate(); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { make_cfg(1.0, KernelKind::Poly, 1.0, 0).validate(); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(parse_kernel_kind("POLY"), KernelKind::Poly);
  EXPECT_EQ(code_of([] { parse_kernel_kind("sigmoid"); }), ErrorCode::InvalidArgument);
}

TEST(TrainBinary, AnalyticToy) {
  const auto x = as_vectors({{-1.0}, {1.0}});
  const std::vector<int> y = {-1, 1};
  const auto cfg = make_cfg(1e7, KernelKind::Linear);
  const auto m = train_binary(x, y, cfg, 0);
  ASSERT_EQ(m.dual_coefs.size(), 2u);
  EXPECT_NEAR(std::abs(m.dual_coefs[0]), 0.5, 1e-6);
  EXPECT_NEAR(std::abs(m.dual_coefs[1]), 0.5, 1e-6);
  EXPECT_NEAR(m.bias, 0.0, 1e-6);
  EXPECT_NEAR(decision_value(m, std::vector<double>{1.0}, cfg.kernel), 1.0, 1e-6);
  EXPECT_NEAR(decision_value(m, std::vector<double>{-1.0}, cfg.kernel), -1.0, 1e-6);
  EXPECT_NEAR(decision_value(m, std::vector<double>{0.25}, cfg.kernel), 0.25, 1e-6);

  // alpha1 = alpha2 = t is the only feasible ray; its best point is t = 0.5.
  const auto fx = chis::testing::SvmFixture{"toy", {{-1.0}, {1.0}}, y, cfg};
  const double grid = chis::testing::grid_maximize_ray(chis::testing::gram(fx), y,
                                                       {1.0, 1.0}, 2.0, 20000);
  EXPECT_NEAR(dual_objective(m, cfg.kernel), grid, 1e-6);
  EXPECT_NEAR(grid, 0.5, 1e-9);
}

TEST(TrainBinary, RbfXorIsSeparated) {
  const auto x = as_vectors({{1, 1}, {-1, -1}, {1, -1}, {-1, 1}});
  const std::vector<int> y = {1, 1, -1, -1};
  const auto cfg = make_cfg(1e7, KernelKind::Rbf, 1.0);
  const auto m = train_binary(x, y, cfg, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_GT(y[i] * decision_value(m, x[i].values, cfg.kernel), 0.0);
  }
}

TEST(TrainBinary, FixtureSuiteMatchesEnumerationOracle) {
  for (const auto& f : chis::testing::svm_fixture_suite()) {
    SCOPED_TRACE(f.name);
    const auto m = train_binary(as_vectors(f.x), f.y, f.cfg, 0);
    EXPECT_TRUE(m.converged);
    const auto k = chis::testing::gram(f);
    const auto oracle = chis::testing::solve_dual_by_enumeration(k, f.y, f.cfg.c);
    const auto alpha = chis::testing::full_alpha(m, f.y);
    const double mine = chis::testing::objective_of(k, f.y, alpha);
    EXPECT_NEAR(mine, oracle.objective, 1e-4 * std::abs(oracle.objective));
    EXPECT_NEAR(dual_objective(m, f.cfg.kernel), mine, 1e-9 * std::abs(mine) + 1e-12);
    const auto kkt = chis::testing::check_kkt(k, f.y, alpha, m.bias, f.cfg.c);
    EXPECT_TRUE(kkt.feasible);
    EXPECT_LE(kkt.worst, 1e-3);
  }
}

TEST(TrainBinary, DualFeasibilityOnRandomProblems) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 8 + static_cast<int>(rng() % 20);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
      const int label = i % 2 ? 1 : -1;
      x.push_back({g(rng) + 0.8 * label, g(rng), g(rng)});
      y.push_back(label);
    }
    const double c = trial % 3 == 0 ? 1e7 : 0.5 + trial;
    const auto cfg = make_cfg(c, trial % 2 ? KernelKind::Rbf : KernelKind::Linear, 0.5);
    const auto m = train_binary(as_vectors(x), y, cfg, trial);
    double sum = 0.0;
    for (double coef : m.dual_coefs) {
      sum += coef;
      EXPECT_LE(std::abs(coef), c);
      EXPECT_GT(std::abs(coef), cfg.eps);
    }
    EXPECT_LE(std::abs(sum), 1e-6 * c);
    EXPECT_EQ(m.support_vectors.size(), m.dual_coefs.size());
  }
}

TEST(TrainBinary, HardMarginSeparableData) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  while (x.size() < 40) {
    const double a = u(rng), b = u(rng);
    const double s = a + 2 * b - 0.3;
    if (std::abs(s) < 0.2) continue;
    x.push_back({a, b});
    y.push_back(s > 0 ? 1 : -1);
  }
  const auto cfg = make_cfg(1e7, KernelKind::Linear);
  const auto m = train_binary(as_vectors(x), y, cfg, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = decision_value(m, x[i], cfg.kernel);
    EXPECT_GT(y[i] * d, 0.0);
  }
  // Free support vectors sit on the margin.
  for (std::size_t k = 0; k < m.support_vectors.size(); ++k) {
    if (std::abs(m.dual_coefs[k]) < cfg.c) {
      EXPECT_NEAR(std::abs(decision_value(m, m.support_vectors[k], cfg.kernel)), 1.0, 1e-3);
    }
  }
}

TEST(TrainBinary, DeterministicPerSeed) {
  const auto x = as_vectors({{0, 0}, {1, 0}, {0, 1}, {2, 2}, {3, 1}, {1, 3}});
  const std::vector<int> y = {-1, -1, -1, 1, 1, 1};
  const auto cfg = make_cfg(10.0, KernelKind::Rbf, 0.5);
  const auto a = train_binary(x, y, cfg, 9);
  const auto b = train_binary(x, y, cfg, 9);
  EXPECT_EQ(a.dual_coefs, b.dual_coefs);
  EXPECT_EQ(a.bias, b.bias);
  EXPECT_EQ(a.support_indices, b.support_indices);
}

TEST(TrainBinary, Errors) {
  const auto cfg = make_cfg(1.0, KernelKind::Linear);
  const auto x = as_vectors({{0.0}, {1.0}});
  EXPECT_EQ(code_of([&] { train_binary(x, std::vector<int>{1, 1}, cfg, 0); }),
            ErrorCode::SingleClassInput);
  EXPECT_EQ(code_of([&] { train_binary(x, std::vector<int>{1}, cfg, 0); }),
            ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of([&] { train_binary(x, std::vector<int>{1, 0}, cfg, 0); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] {
              train_binary(as_vectors({{0.0}, {1.0, 2.0}}), std::vector<int>{1, -1}, cfg, 0);
            }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] {
              train_binary(as_vectors({{0.0}, {std::nan("")}}), std::vector<int>{1, -1}, cfg,
                           0);
            }),
            ErrorCode::NonFinite);
  auto mixed = x;
  mixed[1].schema = features::Schema::Task2V1;
  EXPECT_EQ(code_of([&] { train_binary(mixed, std::vector<int>{1, -1}, cfg, 0); }),
            ErrorCode::SchemaMismatch);
}

TEST(Multiclass, MachineCountAndLabelOrder) {
  std::vector<features::FeatureVector> x;
  std::vector<std::string> y;
  const auto model = blobs_model(&x, &y);
  EXPECT_EQ(model.labels, (std::vector<std::string>{"neutral", "oppose", "support"}));
  EXPECT_EQ(model.machines.size(), 3u);
  EXPECT_EQ(model.machine(0, 2).positive_label, "neutral");
  EXPECT_EQ(model.machine(0, 2).negative_label, "support");
  EXPECT_EQ(model.machine(1, 2).positive_label, "oppose");
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(predict(model, x[i]), y[i]);

  const auto two = train_multiclass(as_vectors({{0.0}, {1.0}}),
                                    std::vector<std::string>{"b", "a"},
                                    make_cfg(1e7, KernelKind::Linear), 0);
  EXPECT_EQ(two.machines.size(), 1u);
  EXPECT_EQ(predict(two, {{0.0}, features::Schema::Task1V1}), "b");
  EXPECT_EQ(predict(two, {{1.0}, features::Schema::Task1V1}), "a");
}

TEST(Multiclass, UnanimousVoteAndCycles) {
  MulticlassModel m;
  m.labels = {"neutral", "oppose", "support"};
  m.kernel = KernelConfig{KernelKind::Linear};
  m.dims = 1;
  const features::FeatureVector x{{0.0}, features::Schema::Task1V1};

  m.machines = {constant_machine(-1, "neutral", "oppose"),
                constant_machine(-1, "neutral", "support"),
                constant_machine(-1, "oppose", "support")};
  EXPECT_EQ(predict(m, x), "support");

  // neutral beats oppose, oppose beats support, support beats neutral.
  m.machines = {constant_machine(1.0, "neutral", "oppose"),
                constant_machine(-2.0, "neutral", "support"),
                constant_machine(1.0, "oppose", "support")};
  EXPECT_EQ(predict(m, x), "support");  // largest summed margin

  m.machines = {constant_machine(1.0, "neutral", "oppose"),
                constant_machine(-1.0, "neutral", "support"),
                constant_machine(1.0, "oppose", "support")};
  for (int rep = 0; rep < 5; ++rep) EXPECT_EQ(predict(m, x), "neutral");

  // A zero decision goes to the positive label.
  m.machines = {constant_machine(0.0, "neutral", "oppose"),
                constant_machine(0.0, "neutral", "support"),
                constant_machine(0.0, "oppose", "support")};
  EXPECT_EQ(predict(m, x), "neutral");
}

TEST(Multiclass, PredictChecksSchemaAndDims) {
  const auto model = blobs_model();
  EXPECT_EQ(code_of([&] { predict(model, {{0.0, 0.0}, features::Schema::Task2V1}); }),
            ErrorCode::SchemaMismatch);
  EXPECT_EQ(code_of([&] { predict(model, {{0.0}, features::Schema::Task1V1}); }),
            ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([&] {
              train_multiclass(as_vectors({{0.0}, {1.0}}), std::vector<std::string>{"a", "a"},
                               make_cfg(1.0, KernelKind::Linear), 0);
            }),
            ErrorCode::SingleClassInput);
}

TEST(ModelFile, RoundTripPredictsIdentically) {
  const auto model = blobs_model();
  const auto path = temp_file("blobs.json");
  save_model(model, path);
  const auto loaded = load_model(path);
  EXPECT_EQ(serialize_model(loaded), serialize_model(model));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 8.0);
  for (int i = 0; i < 100; ++i) {
    const features::FeatureVector x{{u(rng), u(rng)}, features::Schema::Task1V1};
    EXPECT_EQ(predict(loaded, x), predict(model, x));
    for (std::size_t k = 0; k < model.machines.size(); ++k) {
      EXPECT_EQ(decision_value(loaded.machines[k], x.values, loaded.kernel),
                decision_value(model.machines[k], x.values, model.kernel));
    }
  }
}

TEST(ModelFile, VersionAndCorruption) {
  const auto text = serialize_model(blobs_model());
  auto tampered = text;
  const auto pos = tampered.find("\"format_version\": 1");
  ASSERT_NE(pos, std::string::npos);
  tampered.replace(pos, 19, "\"format_version\": 7");
  EXPECT_EQ(code_of([&] { deserialize_model(tampered); }), ErrorCode::VersionMismatch);
  EXPECT_EQ(code_of([&] { deserialize_model(text.substr(0, text.size() / 2)); }),
            ErrorCode::CorruptModel);
  EXPECT_EQ(code_of([&] { deserialize_model("{}"); }), ErrorCode::CorruptModel);
  EXPECT_EQ(code_of([&] { deserialize_model(""); }), ErrorCode::CorruptModel);

  const auto path = temp_file("truncated.json");
  {
    std::ofstream out(path, std::ios::binary);
    out << text.substr(0, text.size() - 40);
  }
  EXPECT_EQ(code_of([&] { load_model(path); }), ErrorCode::CorruptModel);
  EXPECT_EQ(code_of([&] { load_model(temp_file("absent.json")); }), ErrorCode::Io);
}
