#pragma once

// Kernel SVM trained by sequential minimal optimization on the soft-margin
// dual, with one-vs-one multiclass voting.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chis/features.hpp"

namespace chis::svm {

enum class KernelKind { Linear, Poly, Rbf };

std::string_view to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);

struct KernelConfig {
  KernelKind kind = KernelKind::Rbf;
  double gamma = 1.0;
  int degree = 3;      // poly only
  double coef0 = 0.0;  // poly only

  /// Throws InvalidArgument unless gamma > 0 and degree >= 1.
  void validate() const;
  bool operator==(const KernelConfig&) const = default;
};

struct SvmConfig {
  double c = 1e7;
  KernelConfig kernel;
  double tol = 1e-3;     // stop once the maximal KKT violation is below tol
  int max_passes = 1000; // iteration budget is max_passes * n
  double eps = 1e-8;     // alphas at or below eps are not support vectors

  void validate() const;
  bool operator==(const SvmConfig&) const = default;
};

/// linear: <u,v>; poly: (gamma <u,v> + coef0)^degree; rbf: exp(-gamma |u-v|^2).
double kernel_eval(const KernelConfig& cfg, std::span<const double> u,
                   std::span<const double> v);

struct BinaryModel {
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> dual_coefs;  // alpha_i * y_i
  std::vector<std::size_t> support_indices;  // positions in the training input
  double bias = 0.0;
  std::string positive_label;
  std::string negative_label;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Labels in `y` must be +1 or -1. Training is deterministic for a given
/// seed; the seed only reorders the working set scan.
BinaryModel train_binary(std::span<const features::FeatureVector> x,
                         std::span<const int> y, const SvmConfig& cfg,
                         std::uint64_t seed);

double decision_value(const BinaryModel& model, std::span<const double> x,
                      const KernelConfig& kernel);

/// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij,
/// evaluated over the retained support vectors.
double dual_objective(const BinaryModel& model, const KernelConfig& kernel);

struct MulticlassModel {
  std::vector<std::string> labels;    // lexicographic
  std::vector<BinaryModel> machines;  // pairs (0,1), (0,2), ..., (1,2), ...
  KernelConfig kernel;
  features::Schema schema = features::Schema::Task1V1;
  std::size_t dims = 0;

  const BinaryModel& machine(std::size_t a, std::size_t b) const;
};

/// One binary machine per unordered label pair, trained on that pair's
/// examples only. For the pair (a, b) with a < b, `a` is the positive label.
MulticlassModel train_multiclass(std::span<const features::FeatureVector> x,
                                 std::span<const std::string> y,
                                 const SvmConfig& cfg, std::uint64_t seed);

/// Pairwise voting. Ties go to the label with the larger summed |decision|
/// over the machines it won, then to the earliest label.
std::string predict(const MulticlassModel& model,
                    const features::FeatureVector& x);

void save_model(const MulticlassModel& model, const std::filesystem::path& path);
MulticlassModel load_model(const std::filesystem::path& path);

std::string serialize_model(const MulticlassModel& model);
MulticlassModel deserialize_model(std::string_view text);

inline constexpr int kModelFormatVersion = 1;

}  // namespace chis::svm
