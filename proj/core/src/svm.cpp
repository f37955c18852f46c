#include "chis/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "chis/error.hpp"
#include "detail.hpp"
#include "model_json.hpp"

namespace chis::svm {

namespace {

constexpr double kTau = 1e-12;  // floor for non-positive curvature
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dims(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                "vector dimensions " + std::to_string(a) + " and " +
                    std::to_string(b) + " differ");
  }
}

// Dual solver state for one binary problem. Minimizes
//   f(a) = 1/2 a'Qa - e'a,  Q_ij = y_i y_j K_ij,  0 <= a_i <= C,  y'a = 0
// choosing working pairs by maximal violation with second-order selection
// of the partner.
class SmoSolver {
 public:
  SmoSolver(std::vector<double> gram, std::vector<int> y, double c,
            std::vector<std::size_t> scan_order)
      : n_(y.size()),
        k_(std::move(gram)),
        y_(std::move(y)),
        c_(c),
        order_(std::move(scan_order)),
        alpha_(n_, 0.0),
        grad_(n_, -1.0) {}

  void solve(double tol, std::size_t max_iter) {
    for (iterations_ = 0; iterations_ < max_iter; ++iterations_) {
      std::size_t i = 0;
      std::size_t j = 0;
      if (!select_pair(tol, i, j)) {
        converged_ = true;
        return;
      }
      update_pair(i, j);
    }
    double gmax = -kInf;
    double gmin = kInf;
    violation(gmax, gmin);
    converged_ = gmax - gmin < tol;
  }

  // Offset b of f(x) = sum alpha_i y_i K(x_i, x) + b.
  double bias() const {
    double ub = kInf;
    double lb = -kInf;
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n_; ++t) {
      const double yg = y_[t] * grad_[t];
      if (at_upper(t)) {
        if (y_[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else if (at_lower(t)) {
        if (y_[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        ++n_free;
        sum_free += yg;
      }
    }
    const double rho =
        n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
    return -rho;
  }

  const std::vector<double>& alpha() const { return alpha_; }
  std::size_t iterations() const { return iterations_; }
  bool converged() const { return converged_; }

 private:
  double kern(std::size_t a, std::size_t b) const { return k_[a * n_ + b]; }
  double q(std::size_t a, std::size_t b) const {
    return static_cast<double>(y_[a] * y_[b]) * kern(a, b);
  }
  bool at_upper(std::size_t t) const { return alpha_[t] >= c_; }
  bool at_lower(std::size_t t) const { return alpha_[t] <= 0.0; }
  bool in_up(std::size_t t) const {
    return (y_[t] == 1 && !at_upper(t)) || (y_[t] == -1 && !at_lower(t));
  }
  bool in_low(std::size_t t) const {
    return (y_[t] == -1 && !at_upper(t)) || (y_[t] == 1 && !at_lower(t));
  }

  void violation(double& gmax, double& gmin) const {
    for (std::size_t t = 0; t < n_; ++t) {
      const double v = -y_[t] * grad_[t];
      if (in_up(t)) gmax = std::max(gmax, v);
      if (in_low(t)) gmin = std::min(gmin, v);
    }
  }

  bool select_pair(double tol, std::size_t& out_i, std::size_t& out_j) const {
    double gmax = -kInf;
    std::size_t i = n_;
    for (const std::size_t t : order_) {
      const double v = -y_[t] * grad_[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
    }
    if (i == n_) return false;

    double gmin = kInf;
    double best = kInf;
    std::size_t j = n_;
    for (const std::size_t t : order_) {
      if (!in_low(t)) continue;
      const double v = -y_[t] * grad_[t];
      gmin = std::min(gmin, v);
      const double b = gmax - v;
      if (b > 0.0) {
        double a = kern(i, i) + kern(t, t) - 2.0 * kern(i, t);
        if (a <= 0.0) a = kTau;
        const double score = -(b * b) / a;
        if (score < best) {
          best = score;
          j = t;
        }
      }
    }
    if (gmax - gmin < tol || j == n_) return false;
    out_i = i;
    out_j = j;
    return true;
  }

  void update_pair(std::size_t i, std::size_t j) {
    const double old_i = alpha_[i];
    const double old_j = alpha_[j];
    double& ai = alpha_[i];
    double& aj = alpha_[j];
    if (y_[i] != y_[j]) {
      double quad = kern(i, i) + kern(j, j) - 2.0 * kern(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) { aj = 0.0; ai = diff; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = -diff; }
      }
      if (diff > 0.0) {
        if (ai > c_) { ai = c_; aj = c_ - diff; }
      } else {
        if (aj > c_) { aj = c_; ai = c_ + diff; }
      }
    } else {
      double quad = kern(i, i) + kern(j, j) - 2.0 * kern(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c_) {
        if (ai > c_) { ai = c_; aj = sum - c_; }
      } else {
        if (aj < 0.0) { aj = 0.0; ai = sum; }
      }
      if (sum > c_) {
        if (aj > c_) { aj = c_; ai = sum - c_; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = sum; }
      }
    }
    const double di = ai - old_i;
    const double dj = aj - old_j;
    for (std::size_t t = 0; t < n_; ++t) {
      grad_[t] += q(i, t) * di + q(j, t) * dj;
    }
  }

  std::size_t n_;
  std::vector<double> k_;
  std::vector<int> y_;
  double c_;
  std::vector<std::size_t> order_;
  std::vector<double> alpha_;
  std::vector<double> grad_;
  std::size_t iterations_ = 0;
  bool converged_ = false;
};

void check_finite(std::span<const double> v) {
  for (const double d : v) {
    if (!std::isfinite(d)) {
      throw Error(ErrorCode::NonFinite, "feature vector contains NaN or infinity");
    }
  }
}

}  // namespace

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Linear: return "linear";
    case KernelKind::Poly: return "poly";
    case KernelKind::Rbf: return "rbf";
  }
  return "rbf";
}

KernelKind parse_kernel_kind(std::string_view name) {
  const std::string lower = detail::ascii_lower(detail::trim(name));
  if (lower == "linear") return KernelKind::Linear;
  if (lower == "poly") return KernelKind::Poly;
  if (lower == "rbf") return KernelKind::Rbf;
  throw Error(ErrorCode::InvalidArgument, "unknown kernel '" + std::string(name) + "'");
}

void KernelConfig::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::InvalidArgument, "kernel gamma must be > 0");
  }
  if (degree < 1) {
    throw Error(ErrorCode::InvalidArgument, "poly degree must be >= 1");
  }
  if (!std::isfinite(coef0)) {
    throw Error(ErrorCode::InvalidArgument, "coef0 must be finite");
  }
}

void SvmConfig::validate() const {
  kernel.validate();
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::InvalidArgument, "C must be > 0");
  }
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be > 0");
  if (max_passes < 1) {
    throw Error(ErrorCode::InvalidArgument, "max_passes must be >= 1");
  }
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be > 0");
}

double kernel_eval(const KernelConfig& cfg, std::span<const double> u,
                   std::span<const double> v) {
  check_dims(u.size(), v.size());
  switch (cfg.kind) {
    case KernelKind::Linear:
      return std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
    case KernelKind::Poly: {
      const double dot = std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
      return std::pow(cfg.gamma * dot + cfg.coef0, cfg.degree);
    }
    case KernelKind::Rbf: {
      double dist2 = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - v[i];
        dist2 += d * d;
      }
      return std::exp(-cfg.gamma * dist2);
    }
  }
  return 0.0;
}

BinaryModel train_binary(std::span<const features::FeatureVector> x,
                         std::span<const int> y, const SvmConfig& cfg,
                         std::uint64_t seed) {
  cfg.validate();
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "x and y differ in length");
  }
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  for (const int label : y) {
    if (label == 1) {
      ++n_pos;
    } else if (label == -1) {
      ++n_neg;
    } else {
      throw Error(ErrorCode::InvalidArgument, "binary labels must be +1 or -1");
    }
  }
  if (n_pos == 0 || n_neg == 0) {
    throw Error(ErrorCode::SingleClassInput,
                "binary training needs at least one example of each class");
  }
  const std::size_t n = x.size();
  const std::size_t dims = x.front().dims();
  for (const auto& v : x) {
    check_dims(dims, v.dims());
    if (v.schema != x.front().schema) {
      throw Error(ErrorCode::SchemaMismatch, "training vectors mix schemas");
    }
    check_finite(v.values);
  }

  std::vector<double> gram(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const double k = kernel_eval(cfg.kernel, x[a].values, x[b].values);
      gram[a * n + b] = k;
      gram[b * n + a] = k;
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  detail::shuffle(order, rng);

  SmoSolver solver(std::move(gram), std::vector<int>(y.begin(), y.end()), cfg.c,
                   std::move(order));
  solver.solve(cfg.tol, static_cast<std::size_t>(cfg.max_passes) * n);

  BinaryModel model;
  model.bias = solver.bias();
  model.iterations = solver.iterations();
  model.converged = solver.converged();
  const auto& alpha = solver.alpha();
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > cfg.eps) {
      model.support_vectors.push_back(x[t].values);
      model.dual_coefs.push_back(alpha[t] * y[t]);
      model.support_indices.push_back(t);
    }
  }
  return model;
}

double decision_value(const BinaryModel& model, std::span<const double> x,
                      const KernelConfig& kernel) {
  double sum = model.bias;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    sum += model.dual_coefs[i] * kernel_eval(kernel, model.support_vectors[i], x);
  }
  return sum;
}

double dual_objective(const BinaryModel& model, const KernelConfig& kernel) {
  double linear = 0.0;
  double quad = 0.0;
  const auto& sv = model.support_vectors;
  for (std::size_t a = 0; a < sv.size(); ++a) {
    linear += std::abs(model.dual_coefs[a]);
    for (std::size_t b = 0; b < sv.size(); ++b) {
      quad += model.dual_coefs[a] * model.dual_coefs[b] *
              kernel_eval(kernel, sv[a], sv[b]);
    }
  }
  return linear - 0.5 * quad;
}

const BinaryModel& MulticlassModel::machine(std::size_t a, std::size_t b) const {
  // Pairs are stored row-major over the upper triangle.
  const std::size_t k = labels.size();
  std::size_t index = 0;
  for (std::size_t r = 0; r < a; ++r) index += k - r - 1;
  return machines.at(index + (b - a - 1));
}

MulticlassModel train_multiclass(std::span<const features::FeatureVector> x,
                                 std::span<const std::string> y,
                                 const SvmConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, "x and y differ in length");
  }
  std::vector<std::string> labels(y.begin(), y.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  if (labels.size() < 2) {
    throw Error(ErrorCode::SingleClassInput,
                "multiclass training needs at least two distinct labels");
  }

  MulticlassModel model;
  model.labels = labels;
  model.kernel = cfg.kernel;
  model.schema = x.front().schema;
  model.dims = x.front().dims();

  for (std::size_t a = 0; a < labels.size(); ++a) {
    for (std::size_t b = a + 1; b < labels.size(); ++b) {
      std::vector<features::FeatureVector> px;
      std::vector<int> py;
      for (std::size_t t = 0; t < x.size(); ++t) {
        if (y[t] == labels[a]) {
          px.push_back(x[t]);
          py.push_back(1);
        } else if (y[t] == labels[b]) {
          px.push_back(x[t]);
          py.push_back(-1);
        }
      }
      auto machine = train_binary(px, py, cfg, seed);
      machine.positive_label = labels[a];
      machine.negative_label = labels[b];
      model.machines.push_back(std::move(machine));
    }
  }
  return model;
}

std::string predict(const MulticlassModel& model,
                    const features::FeatureVector& x) {
  if (x.schema != model.schema) {
    throw Error(ErrorCode::SchemaMismatch,
                "model expects " + std::string(features::to_string(model.schema)) +
                    " vectors, got " + std::string(features::to_string(x.schema)));
  }
  check_dims(model.dims, x.dims());
  const std::size_t k = model.labels.size();
  std::vector<int> votes(k, 0);
  std::vector<double> margin(k, 0.0);
  std::size_t m = 0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b, ++m) {
      const double d = decision_value(model.machines[m], x.values, model.kernel);
      const std::size_t winner = d >= 0.0 ? a : b;
      ++votes[winner];
      margin[winner] += std::abs(d);
    }
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < k; ++c) {
    if (votes[c] > votes[best] ||
        (votes[c] == votes[best] && margin[c] > margin[best])) {
      best = c;
    }
  }
  return model.labels[best];
}

std::string serialize_model(const MulticlassModel& model) {
  return detail::model_to_json(model).dump(1) + "\n";
}

MulticlassModel deserialize_model(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptModel, std::string("unparseable model: ") + e.what());
  }
  return detail::model_from_json(doc);
}

void save_model(const MulticlassModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << serialize_model(model);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

MulticlassModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return deserialize_model(text.str());
}

}  // namespace chis::svm

namespace chis::detail {

using nlohmann::json;

json model_to_json(const svm::MulticlassModel& model) {
  json doc;
  doc["format_version"] = svm::kModelFormatVersion;
  doc["schema_id"] = std::string(features::to_string(model.schema));
  doc["dims"] = model.dims;
  doc["labels"] = model.labels;
  doc["kernel"] = {{"kind", std::string(svm::to_string(model.kernel.kind))},
                   {"gamma", model.kernel.gamma},
                   {"degree", model.kernel.degree},
                   {"coef0", model.kernel.coef0}};
  json machines = json::array();
  for (const auto& m : model.machines) {
    machines.push_back({{"positive_label", m.positive_label},
                        {"negative_label", m.negative_label},
                        {"bias", m.bias},
                        {"dual_coefs", m.dual_coefs},
                        {"support_indices", m.support_indices},
                        {"support_vectors", m.support_vectors},
                        {"iterations", m.iterations},
                        {"converged", m.converged}});
  }
  doc["machines"] = std::move(machines);
  return doc;
}

svm::MulticlassModel model_from_json(const json& doc) {
  auto corrupt = [](const std::string& why) {
    return Error(ErrorCode::CorruptModel, why);
  };
  try {
    if (!doc.is_object()) throw corrupt("model document is not an object");
    const int version = doc.at("format_version").get<int>();
    if (version != svm::kModelFormatVersion) {
      throw Error(ErrorCode::VersionMismatch,
                  "model format_version " + std::to_string(version) +
                      ", expected " + std::to_string(svm::kModelFormatVersion));
    }
    svm::MulticlassModel model;
    model.schema = features::parse_schema(doc.at("schema_id").get<std::string>());
    model.dims = doc.at("dims").get<std::size_t>();
    model.labels = doc.at("labels").get<std::vector<std::string>>();
    const auto& k = doc.at("kernel");
    model.kernel.kind = svm::parse_kernel_kind(k.at("kind").get<std::string>());
    model.kernel.gamma = k.at("gamma").get<double>();
    model.kernel.degree = k.at("degree").get<int>();
    model.kernel.coef0 = k.at("coef0").get<double>();
    model.kernel.validate();

    if (!std::is_sorted(model.labels.begin(), model.labels.end()) ||
        std::adjacent_find(model.labels.begin(), model.labels.end()) !=
            model.labels.end() ||
        model.labels.size() < 2) {
      throw corrupt("labels must be >= 2, unique and sorted");
    }
    const std::size_t n_labels = model.labels.size();
    const auto& machines = doc.at("machines");
    if (!machines.is_array() ||
        machines.size() != n_labels * (n_labels - 1) / 2) {
      throw corrupt("machine count does not match label count");
    }
    for (const auto& m : machines) {
      svm::BinaryModel bm;
      bm.positive_label = m.at("positive_label").get<std::string>();
      bm.negative_label = m.at("negative_label").get<std::string>();
      bm.bias = m.at("bias").get<double>();
      bm.dual_coefs = m.at("dual_coefs").get<std::vector<double>>();
      bm.support_indices = m.at("support_indices").get<std::vector<std::size_t>>();
      bm.support_vectors =
          m.at("support_vectors").get<std::vector<std::vector<double>>>();
      bm.iterations = m.value("iterations", std::size_t{0});
      bm.converged = m.value("converged", false);
      if (bm.dual_coefs.size() != bm.support_vectors.size() ||
          bm.support_indices.size() != bm.support_vectors.size()) {
        throw corrupt("support vector arrays differ in length");
      }
      for (const auto& sv : bm.support_vectors) {
        if (sv.size() != model.dims) throw corrupt("support vector has wrong dims");
      }
      model.machines.push_back(std::move(bm));
    }
    std::size_t m = 0;
    for (std::size_t a = 0; a < n_labels; ++a) {
      for (std::size_t b = a + 1; b < n_labels; ++b, ++m) {
        if (model.machines[m].positive_label != model.labels[a] ||
            model.machines[m].negative_label != model.labels[b]) {
          throw corrupt("machine pair table out of order");
        }
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptModel, std::string("malformed model: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) {
      throw Error(ErrorCode::CorruptModel, e.what());
    }
    throw;
  }
}

json vocabulary_to_json(const features::VocabularyModel& vocab) {
  return {{"terms", vocab.terms()}, {"df", vocab.df()}, {"n_docs", vocab.n_docs()}};
}

features::VocabularyModel vocabulary_from_json(const json& doc) {
  try {
    return features::VocabularyModel::from_parts(
        doc.at("terms").get<std::vector<std::string>>(),
        doc.at("df").get<std::vector<std::size_t>>(),
        doc.at("n_docs").get<std::size_t>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptModel, std::string("malformed vocabulary: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::CorruptModel, e.what());
  }
}

}  // namespace chis::detail
