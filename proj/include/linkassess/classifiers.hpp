#pragma once

// From-scratch binary classifiers with class and probability outputs, plus
// k-fold splitting and cross-validation. Every model standardizes features
// with statistics from its training data before fitting.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <limits>
#include <list>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "linkassess/error.hpp"
#include "linkassess/features.hpp"
#include "linkassess/metrics.hpp"
#include "linkassess/random.hpp"
#include "linkassess/text.hpp"

namespace linkassess {

enum class ModelKind {
  logistic_regression,
  gaussian_nb,
  knn,
  decision_tree,
  svm_rbf,
  random_baseline,
  one_rule_baseline,
};

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::logistic_regression: return "logistic_regression";
    case ModelKind::gaussian_nb: return "gaussian_nb";
    case ModelKind::knn: return "knn";
    case ModelKind::decision_tree: return "decision_tree";
    case ModelKind::svm_rbf: return "svm_rbf";
    case ModelKind::random_baseline: return "random_baseline";
    case ModelKind::one_rule_baseline: return "one_rule_baseline";
  }
  return "?";
}

/// Accepts canonical names and the short forms lr, nb, kn, dt, svm, random, oner.
inline ModelKind parse_model_kind(std::string_view s) {
  static const std::map<std::string, ModelKind, std::less<>> names = {
      {"logistic_regression", ModelKind::logistic_regression},
      {"lr", ModelKind::logistic_regression},
      {"gaussian_nb", ModelKind::gaussian_nb},
      {"nb", ModelKind::gaussian_nb},
      {"knn", ModelKind::knn},
      {"kn", ModelKind::knn},
      {"decision_tree", ModelKind::decision_tree},
      {"dt", ModelKind::decision_tree},
      {"svm_rbf", ModelKind::svm_rbf},
      {"svm", ModelKind::svm_rbf},
      {"random_baseline", ModelKind::random_baseline},
      {"random", ModelKind::random_baseline},
      {"one_rule_baseline", ModelKind::one_rule_baseline},
      {"oner", ModelKind::one_rule_baseline},
  };
  auto it = names.find(s);
  if (it == names.end()) throw InvalidArgument("unknown model kind '" + std::string(s) + "'");
  return it->second;
}

/// Model kind plus string-valued hyperparameters with typed accessors.
/// Unset keys fall back to the documented defaults.
struct ModelSpec {
  ModelKind kind = ModelKind::svm_rbf;
  std::map<std::string, std::string> hyperparameters;

  ModelSpec() = default;
  explicit ModelSpec(ModelKind k, std::map<std::string, std::string> hp = {}) : kind(k), hyperparameters(std::move(hp)) {}

  ModelSpec& set(std::string key, std::string value) {
    hyperparameters[std::move(key)] = std::move(value);
    return *this;
  }
  ModelSpec& set(std::string key, double value) { return set(std::move(key), text::format_double(value)); }

  bool has(std::string_view key) const { return hyperparameters.find(std::string(key)) != hyperparameters.end(); }

  double number(std::string_view key, double fallback) const {
    auto it = hyperparameters.find(std::string(key));
    return it == hyperparameters.end() ? fallback : text::parse_double(it->second);
  }

  std::string word(std::string_view key, std::string fallback) const {
    auto it = hyperparameters.find(std::string(key));
    return it == hyperparameters.end() ? fallback : it->second;
  }

  std::optional<std::uint64_t> seed() const {
    auto it = hyperparameters.find("seed");
    if (it == hyperparameters.end()) return std::nullopt;
    return static_cast<std::uint64_t>(text::parse_int(it->second));
  }

  double threshold() const { return number("threshold", 0.5); }

  /// Keys accepted for this kind.
  std::vector<std::string_view> allowed_keys() const {
    std::vector<std::string_view> keys = {"seed", "threshold"};
    switch (kind) {
      case ModelKind::logistic_regression:
        keys.insert(keys.end(), {"lr.regularization", "lr.penalty", "lr.learning_rate", "lr.epochs"});
        break;
      case ModelKind::gaussian_nb: keys.insert(keys.end(), {"nb.var_smoothing"}); break;
      case ModelKind::knn: keys.insert(keys.end(), {"knn.k"}); break;
      case ModelKind::decision_tree: keys.insert(keys.end(), {"tree.max_depth", "tree.min_leaf"}); break;
      case ModelKind::svm_rbf:
        keys.insert(keys.end(), {"svm.C", "svm.gamma", "svm.tolerance", "svm.max_iter"});
        break;
      case ModelKind::random_baseline:
      case ModelKind::one_rule_baseline: break;
    }
    return keys;
  }

  void validate() const {
    auto allowed = allowed_keys();
    for (const auto& [key, value] : hyperparameters) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        throw InvalidArgument("hyperparameter '" + key + "' does not apply to " + std::string(to_string(kind)));
      }
      if (key == "lr.regularization") {
        if (value != "L1" && value != "L2") throw InvalidArgument("lr.regularization must be L1 or L2");
        continue;
      }
      if (key == "seed") {
        if (text::parse_int(value) < 0) throw InvalidArgument("seed must be non-negative");
        continue;
      }
      double x = text::parse_double(value);
      if (!(x > 0.0) || !std::isfinite(x)) throw InvalidArgument("hyperparameter '" + key + "' must be positive");
      if (key == "threshold" && !(x < 1.0)) throw InvalidArgument("threshold must lie in (0, 1)");
    }
    if (kind == ModelKind::random_baseline && !seed()) throw InvalidArgument("random_baseline needs a seed");
  }

  /// Plain-text "key=value" lines, starting with kind.
  std::string to_config() const {
    std::string out = "kind=" + std::string(to_string(kind)) + '\n';
    for (const auto& [k, v] : hyperparameters) out += k + '=' + v + '\n';
    return out;
  }

  static ModelSpec from_config(std::string_view cfg) {
    ModelSpec spec;
    bool have_kind = false;
    std::size_t lineno = 0;
    for (auto line : text::split(cfg, '\n')) {
      ++lineno;
      line = text::trim(line);
      if (line.empty() || line.front() == '#') continue;
      auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected key=value", lineno);
      auto key = text::trim(line.substr(0, eq));
      auto value = text::trim(line.substr(eq + 1));
      if (key == "kind") {
        spec.kind = parse_model_kind(value);
        have_kind = true;
      } else {
        spec.hyperparameters[std::string(key)] = std::string(value);
      }
    }
    if (!have_kind) throw ParseError("model config needs a 'kind' line", 0);
    spec.validate();
    return spec;
  }

  /// Compact one-line form, e.g. "svm_rbf(svm.C=1;svm.gamma=0.5)".
  std::string describe() const {
    std::string out(to_string(kind));
    if (hyperparameters.empty()) return out;
    out += '(';
    bool first = true;
    for (const auto& [k, v] : hyperparameters) {
      if (!first) out += ';';
      out += k + '=' + v;
      first = false;
    }
    return out + ')';
  }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Dense row-major feature matrix with 0/1 labels and per-row identity keys.
struct Samples {
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<int> labels;
  std::vector<std::uint64_t> keys;

  Samples() = default;
  explicit Samples(std::size_t c) : cols(c) {}

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }

  void add(std::span<const double> x, int label, std::uint64_t key = 0) {
    if (x.size() != cols) throw InvalidArgument("sample width does not match");
    values.insert(values.end(), x.begin(), x.end());
    labels.push_back(label);
    keys.push_back(key);
  }

  Samples subset(std::span<const std::size_t> idx) const {
    Samples out(cols);
    out.values.reserve(idx.size() * cols);
    for (std::size_t i : idx) out.add(row(i), labels[i], keys[i]);
    return out;
  }
};

inline std::uint64_t instance_key(const Instance& inst) {
  std::uint64_t h = fnv1a(inst.source_network);
  h = fnv1a(std::string_view("\x1f", 1), h);
  h = fnv1a(inst.u, h);
  h = fnv1a(std::string_view("\x1f", 1), h);
  return fnv1a(inst.v, h);
}

inline Samples to_samples(const FeatureDataModel& fdm) {
  Samples s(fdm.schema.column_count());
  s.values.reserve(fdm.size() * s.cols);
  for (const auto& inst : fdm.instances) {
    if (inst.features.size() != fdm.schema.proximity_count()) throw InvalidArgument("instance width does not match schema");
    s.add(feature_row(fdm.schema, inst), inst.label, instance_key(inst));
  }
  return s;
}

/// Per-feature (mean, std); constant features get scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Samples& s) {
    Standardizer st;
    st.mean.assign(s.cols, 0.0);
    st.scale.assign(s.cols, 1.0);
    const double n = static_cast<double>(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto r = s.row(i);
      for (std::size_t c = 0; c < s.cols; ++c) st.mean[c] += r[c];
    }
    for (double& m : st.mean) m /= n;
    std::vector<double> var(s.cols, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto r = s.row(i);
      for (std::size_t c = 0; c < s.cols; ++c) var[c] += (r[c] - st.mean[c]) * (r[c] - st.mean[c]);
    }
    for (std::size_t c = 0; c < s.cols; ++c) {
      double sd = std::sqrt(var[c] / n);
      if (sd > 1e-12 * std::max(1.0, std::abs(st.mean[c]))) st.scale[c] = sd;
    }
    return st;
  }

  void apply(std::span<const double> x, std::span<double> out) const {
    for (std::size_t c = 0; c < x.size(); ++c) out[c] = (x[c] - mean[c]) / scale[c];
  }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> out(x.size());
    apply(x, out);
    return out;
  }

  Samples apply(const Samples& s) const {
    Samples out = s;
    for (std::size_t i = 0; i < s.size(); ++i) {
      apply(s.row(i), std::span<double>(out.values.data() + i * s.cols, s.cols));
    }
    return out;
  }
};

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------------------
// Logistic regression

enum class Penalty { l1, l2 };

namespace logistic {

/// Mean log-loss plus penalty. `theta` holds the weights followed by the bias;
/// the bias is not penalized. L2 uses lambda/2 * |w|^2, L1 uses lambda * |w|_1.
inline double objective(std::span<const double> theta, const Samples& s, Penalty penalty, double lambda) {
  const std::size_t d = s.cols;
  double loss = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto x = s.row(i);
    double z = theta[d];
    for (std::size_t c = 0; c < d; ++c) z += theta[c] * x[c];
    // log(1 + e^z) - y z, evaluated stably
    double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    loss += softplus - s.labels[i] * z;
  }
  loss /= static_cast<double>(s.size());
  double reg = 0.0;
  for (std::size_t c = 0; c < d; ++c) reg += penalty == Penalty::l2 ? 0.5 * theta[c] * theta[c] : std::abs(theta[c]);
  return loss + lambda * reg;
}

/// Gradient of `objective` (subgradient 0 at w_c = 0 for L1).
inline std::vector<double> gradient(std::span<const double> theta, const Samples& s, Penalty penalty, double lambda) {
  const std::size_t d = s.cols;
  std::vector<double> g(d + 1, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto x = s.row(i);
    double z = theta[d];
    for (std::size_t c = 0; c < d; ++c) z += theta[c] * x[c];
    double r = sigmoid(z) - s.labels[i];
    for (std::size_t c = 0; c < d; ++c) g[c] += r * x[c];
    g[d] += r;
  }
  const double n = static_cast<double>(s.size());
  for (double& v : g) v /= n;
  for (std::size_t c = 0; c < d; ++c) {
    if (penalty == Penalty::l2) {
      g[c] += lambda * theta[c];
    } else if (theta[c] != 0.0) {
      g[c] += lambda * (theta[c] > 0 ? 1.0 : -1.0);
    }
  }
  return g;
}

}  // namespace logistic

struct LogisticModel {
  std::vector<double> theta;  // weights then bias, in standardized space

  double probability(std::span<const double> z) const {
    const std::size_t d = theta.size() - 1;
    double s = theta[d];
    for (std::size_t c = 0; c < d; ++c) s += theta[c] * z[c];
    return sigmoid(s);
  }
};

inline LogisticModel fit_logistic(const Samples& z, const ModelSpec& spec) {
  const Penalty penalty = spec.word("lr.regularization", "L2") == "L1" ? Penalty::l1 : Penalty::l2;
  const double lambda = spec.number("lr.penalty", 1e-4);
  const double rate = spec.number("lr.learning_rate", 0.1);
  const auto epochs = static_cast<std::size_t>(spec.number("lr.epochs", 500));
  LogisticModel m;
  m.theta.assign(z.cols + 1, 0.0);
  for (std::size_t e = 0; e < epochs; ++e) {
    auto g = logistic::gradient(m.theta, z, penalty, lambda);
    for (std::size_t c = 0; c < m.theta.size(); ++c) m.theta[c] -= rate * g[c];
  }
  return m;
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

struct GaussianNbModel {
  std::array<std::vector<double>, 2> mean;
  std::array<std::vector<double>, 2> var;
  std::array<double, 2> log_prior{};

  double probability(std::span<const double> z) const {
    std::array<double, 2> ll{};
    for (int c = 0; c < 2; ++c) {
      double s = log_prior[c];
      for (std::size_t j = 0; j < z.size(); ++j) {
        double d = z[j] - mean[c][j];
        s -= 0.5 * (std::log(2.0 * std::numbers::pi * var[c][j]) + d * d / var[c][j]);
      }
      ll[c] = s;
    }
    // posterior of class 1 via log-sum-exp
    return sigmoid(ll[1] - ll[0]);
  }
};

inline GaussianNbModel fit_gaussian_nb(const Samples& z, const ModelSpec& spec) {
  const double smoothing = spec.number("nb.var_smoothing", 1e-9);
  GaussianNbModel m;
  std::array<std::size_t, 2> count{};
  for (int c = 0; c < 2; ++c) {
    m.mean[c].assign(z.cols, 0.0);
    m.var[c].assign(z.cols, 0.0);
  }
  for (std::size_t i = 0; i < z.size(); ++i) {
    int c = z.labels[i];
    ++count[c];
    auto r = z.row(i);
    for (std::size_t j = 0; j < z.cols; ++j) m.mean[c][j] += r[j];
  }
  for (int c = 0; c < 2; ++c) {
    for (double& v : m.mean[c]) v /= static_cast<double>(count[c]);
  }
  for (std::size_t i = 0; i < z.size(); ++i) {
    int c = z.labels[i];
    auto r = z.row(i);
    for (std::size_t j = 0; j < z.cols; ++j) m.var[c][j] += (r[j] - m.mean[c][j]) * (r[j] - m.mean[c][j]);
  }
  // variance floor: smoothing times the largest overall feature variance
  double max_var = 0.0;
  {
    Standardizer overall = Standardizer::fit(z);
    for (double s : overall.scale) max_var = std::max(max_var, s * s);
  }
  const double floor = std::max(smoothing * max_var, 1e-12);
  for (int c = 0; c < 2; ++c) {
    for (double& v : m.var[c]) v = v / static_cast<double>(count[c]) + floor;
    m.log_prior[c] = std::log(static_cast<double>(count[c]) / static_cast<double>(z.size()));
  }
  return m;
}

// ---------------------------------------------------------------------------
// k-nearest neighbours

struct KnnModel {
  Samples points;  // standardized training data
  std::size_t k = 5;

  /// Fraction of the k nearest training points labelled 1; distance ties go
  /// to the lower training index.
  double probability(std::span<const double> z) const {
    std::vector<std::pair<double, std::size_t>> dist(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto r = points.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < z.size(); ++j) s += (r[j] - z[j]) * (r[j] - z[j]);
      dist[i] = {s, i};
    }
    const std::size_t kk = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
    std::size_t ones = 0;
    for (std::size_t t = 0; t < kk; ++t) ones += static_cast<std::size_t>(points.labels[dist[t].second]);
    return static_cast<double>(ones) / static_cast<double>(kk);
  }
};

// ---------------------------------------------------------------------------
// Decision tree (CART, Gini)

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;  // go left iff x[feature] <= threshold
  int left = -1;
  int right = -1;
  double probability = 0.0;  // fraction of label 1 among training rows reaching the node
};

struct TreeModel {
  std::vector<TreeNode> nodes;

  double probability(std::span<const double> z) const {
    int at = 0;
    while (nodes[at].feature >= 0) at = z[nodes[at].feature] <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
    return nodes[at].probability;
  }

  std::size_t depth() const {
    std::size_t best = 0;
    std::vector<std::pair<int, std::size_t>> stack = {{0, 0}};
    while (!stack.empty()) {
      auto [at, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (nodes[at].feature >= 0) {
        stack.emplace_back(nodes[at].left, d + 1);
        stack.emplace_back(nodes[at].right, d + 1);
      }
    }
    return best;
  }
};

namespace detail {

inline double gini(double ones, double n) {
  if (n <= 0) return 0.0;
  double p = ones / n;
  return 2.0 * p * (1.0 - p);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = std::numeric_limits<double>::infinity();  // weighted child impurity
};

/// Best "x[f] <= t" split with thresholds placed at training values, so the
/// partition is unchanged under any increasing transform of a feature.
inline Split best_split(const Samples& z, std::span<const std::size_t> rows, std::size_t min_leaf) {
  Split best;
  const double n = static_cast<double>(rows.size());
  double total_ones = 0;
  for (auto r : rows) total_ones += z.labels[r];
  std::vector<std::size_t> order(rows.begin(), rows.end());
  for (std::size_t f = 0; f < z.cols; ++f) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return z.values[a * z.cols + f] < z.values[b * z.cols + f];
    });
    double left_ones = 0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      left_ones += z.labels[order[k]];
      const double xk = z.values[order[k] * z.cols + f];
      const double xn = z.values[order[k + 1] * z.cols + f];
      if (!(xk < xn)) continue;
      const std::size_t nl = k + 1;
      const std::size_t nr = order.size() - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double score = (static_cast<double>(nl) * gini(left_ones, static_cast<double>(nl)) +
                            static_cast<double>(nr) * gini(total_ones - left_ones, static_cast<double>(nr))) /
                           n;
      if (score < best.score - 1e-12) best = {static_cast<int>(f), xk, score};
    }
  }
  return best;
}

}  // namespace detail

inline TreeModel fit_tree(const Samples& z, const ModelSpec& spec) {
  const auto max_depth = static_cast<std::size_t>(spec.number("tree.max_depth", 8));
  const auto min_leaf = static_cast<std::size_t>(spec.number("tree.min_leaf", 5));
  TreeModel m;
  struct Work {
    int node;
    std::vector<std::size_t> rows;
    std::size_t depth;
  };
  std::vector<std::size_t> all(z.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  m.nodes.emplace_back();
  std::vector<Work> stack;
  stack.push_back({0, std::move(all), 0});
  while (!stack.empty()) {
    Work w = std::move(stack.back());
    stack.pop_back();
    double ones = 0;
    for (auto r : w.rows) ones += z.labels[r];
    const double n = static_cast<double>(w.rows.size());
    m.nodes[w.node].probability = ones / n;
    const double impurity = detail::gini(ones, n);
    if (w.depth >= max_depth || impurity == 0.0 || w.rows.size() < 2 * min_leaf) continue;
    auto split = detail::best_split(z, w.rows, min_leaf);
    if (split.feature < 0 || !(split.score < impurity - 1e-12)) continue;
    std::vector<std::size_t> left, right;
    for (auto r : w.rows) {
      (z.values[r * z.cols + static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right).push_back(r);
    }
    const int li = static_cast<int>(m.nodes.size());
    m.nodes.emplace_back();
    m.nodes.emplace_back();
    m.nodes[w.node].feature = split.feature;
    m.nodes[w.node].threshold = split.threshold;
    m.nodes[w.node].left = li;
    m.nodes[w.node].right = li + 1;
    stack.push_back({li + 1, std::move(right), w.depth + 1});
    stack.push_back({li, std::move(left), w.depth + 1});
  }
  return m;
}

// ---------------------------------------------------------------------------
// RBF support vector machine, trained by SMO

inline double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::exp(-gamma * s);
}

/// LRU cache of kernel matrix rows under a byte budget.
class KernelRowCache {
 public:
  KernelRowCache(const Samples& x, double gamma, std::size_t budget_bytes)
      : x_(x), gamma_(gamma),
        capacity_(std::max<std::size_t>(2, budget_bytes / (sizeof(double) * std::max<std::size_t>(1, x.size())))) {}

  std::span<const double> row(std::size_t i) {
    auto it = rows_.find(i);
    if (it != rows_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.first);
      return it->second.second;
    }
    if (rows_.size() >= capacity_) {
      rows_.erase(lru_.back());
      lru_.pop_back();
    }
    std::vector<double> r(x_.size());
    auto xi = x_.row(i);
    for (std::size_t t = 0; t < x_.size(); ++t) r[t] = rbf(xi, x_.row(t), gamma_);
    lru_.push_front(i);
    auto [pos, _] = rows_.emplace(i, std::make_pair(lru_.begin(), std::move(r)));
    return pos->second.second;
  }

 private:
  const Samples& x_;
  double gamma_;
  std::size_t capacity_;
  std::list<std::size_t> lru_;
  std::unordered_map<std::size_t, std::pair<std::list<std::size_t>::iterator, std::vector<double>>> rows_;
};

struct SmoOptions {
  double C = 1.0;
  double gamma = 1.0;
  double tolerance = 1e-3;
  std::size_t max_iter = 0;  // 0: max(10^6, 100 n)
  bool record_objective = false;
  std::size_t cache_bytes = std::size_t{256} << 20;
};

struct SmoResult {
  std::vector<double> alpha;
  double rho = 0.0;  // decision value is sum_t alpha_t y_t K(x_t, x) - rho
  std::size_t iterations = 0;
  double violation = 0.0;  // final maximal KKT violation, m(alpha) - M(alpha)
  bool converged = false;
  std::vector<double> objective;  // dual objective after each iteration, if recorded
};

/// Dual objective sum(alpha) - 1/2 alpha' Q alpha given the gradient G = Q alpha - 1.
inline double svm_dual_objective(std::span<const double> alpha, std::span<const double> grad) {
  double f = 0.0;
  for (std::size_t t = 0; t < alpha.size(); ++t) f += alpha[t] * (grad[t] - 1.0);
  return -0.5 * f;
}

/// C-SVC dual solved by SMO with second-order working-set selection.
/// `y` holds +1/-1 labels.
inline SmoResult smo_solve(const Samples& x, std::span<const int> y, const SmoOptions& opt) {
  const std::size_t n = x.size();
  const double C = opt.C;
  const double tau = 1e-12;
  const std::size_t max_iter = opt.max_iter ? opt.max_iter : std::max<std::size_t>(1000000, 100 * n);
  KernelRowCache cache(x, opt.gamma, opt.cache_bytes);

  SmoResult res;
  res.alpha.assign(n, 0.0);
  std::vector<double> G(n, -1.0);
  auto& a = res.alpha;

  for (;;) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == 1) {
        if (a[t] < C && -G[t] >= gmax) {
          gmax = -G[t];
          i = static_cast<std::ptrdiff_t>(t);
        }
      } else if (a[t] > 0 && G[t] >= gmax) {
        gmax = G[t];
        i = static_cast<std::ptrdiff_t>(t);
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t j = -1;
    double best = std::numeric_limits<double>::infinity();
    std::span<const double> Ki;
    if (i >= 0) Ki = cache.row(static_cast<std::size_t>(i));
    for (std::size_t t = 0; t < n; ++t) {
      double grad_diff;
      if (y[t] == 1) {
        if (!(a[t] > 0)) continue;
        gmax2 = std::max(gmax2, G[t]);
        grad_diff = gmax + G[t];
      } else {
        if (!(a[t] < C)) continue;
        gmax2 = std::max(gmax2, -G[t]);
        grad_diff = gmax - G[t];
      }
      if (grad_diff > 0 && i >= 0) {
        double quad = 2.0 - 2.0 * Ki[t];
        if (quad <= 0) quad = tau;
        double obj = -(grad_diff * grad_diff) / quad;
        if (obj <= best) {
          best = obj;
          j = static_cast<std::ptrdiff_t>(t);
        }
      }
    }
    res.violation = gmax + gmax2;
    if (res.violation < opt.tolerance || j < 0) {
      res.converged = true;
      break;
    }
    if (res.iterations >= max_iter) break;
    ++res.iterations;

    const auto ui = static_cast<std::size_t>(i);
    const auto uj = static_cast<std::size_t>(j);
    auto Kj = cache.row(uj);
    Ki = cache.row(ui);
    const double yi = y[ui], yj = y[uj];
    const double old_ai = a[ui], old_aj = a[uj];
    double quad = 2.0 - 2.0 * Ki[uj];
    if (quad <= 0) quad = tau;
    if (yi != yj) {
      const double delta = (-G[ui] - G[uj]) / quad;
      const double diff = a[ui] - a[uj];
      a[ui] += delta;
      a[uj] += delta;
      if (diff > 0) {
        if (a[uj] < 0) {
          a[uj] = 0;
          a[ui] = diff;
        }
      } else if (a[ui] < 0) {
        a[ui] = 0;
        a[uj] = -diff;
      }
      if (diff > 0) {
        if (a[ui] > C) {
          a[ui] = C;
          a[uj] = C - diff;
        }
      } else if (a[uj] > C) {
        a[uj] = C;
        a[ui] = C + diff;
      }
    } else {
      const double delta = (G[ui] - G[uj]) / quad;
      const double sum = a[ui] + a[uj];
      a[ui] -= delta;
      a[uj] += delta;
      if (sum > C) {
        if (a[ui] > C) {
          a[ui] = C;
          a[uj] = sum - C;
        }
      } else if (a[uj] < 0) {
        a[uj] = 0;
        a[ui] = sum;
      }
      if (sum > C) {
        if (a[uj] > C) {
          a[uj] = C;
          a[ui] = sum - C;
        }
      } else if (a[ui] < 0) {
        a[ui] = 0;
        a[uj] = sum;
      }
    }
    const double dai = a[ui] - old_ai;
    const double daj = a[uj] - old_aj;
    for (std::size_t t = 0; t < n; ++t) G[t] += y[t] * (yi * Ki[t] * dai + yj * Kj[t] * daj);
    if (opt.record_objective) res.objective.push_back(svm_dual_objective(a, G));
  }

  // bias from free vectors, or the midpoint of the feasible interval
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t nr_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yG = y[t] * G[t];
    if (a[t] >= C) {
      if (y[t] == -1) ub = std::min(ub, yG); else lb = std::max(lb, yG);
    } else if (a[t] <= 0) {
      if (y[t] == 1) ub = std::min(ub, yG); else lb = std::max(lb, yG);
    } else {
      ++nr_free;
      sum_free += yG;
    }
  }
  res.rho = nr_free > 0 ? sum_free / static_cast<double>(nr_free) : (ub + lb) / 2.0;
  return res;
}

/// Sigmoid P(y=1 | f) = 1 / (1 + exp(A f + B)) fitted to decision values by
/// Newton's method with backtracking on the regularized-target log-loss.
struct PlattScaling {
  double A = 0.0;
  double B = 0.0;

  double operator()(double f) const {
    const double fApB = f * A + B;
    return fApB >= 0 ? std::exp(-fApB) / (1.0 + std::exp(-fApB)) : 1.0 / (1.0 + std::exp(fApB));
  }

  static PlattScaling fit(std::span<const double> dec, std::span<const int> labels) {
    const std::size_t n = dec.size();
    double prior1 = 0, prior0 = 0;
    for (int l : labels) (l == 1 ? prior1 : prior0) += 1;
    const double hi = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo = 1.0 / (prior0 + 2.0);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = labels[i] == 1 ? hi : lo;
    PlattScaling p;
    p.A = 0.0;
    p.B = std::log((prior0 + 1.0) / (prior1 + 1.0));
    auto loss = [&](double A, double B) {
      double f = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double fApB = dec[i] * A + B;
        f += fApB >= 0 ? t[i] * fApB + std::log1p(std::exp(-fApB)) : (t[i] - 1.0) * fApB + std::log1p(std::exp(fApB));
      }
      return f;
    };
    double fval = loss(p.A, p.B);
    const double sigma = 1e-12;
    for (int iter = 0; iter < 100; ++iter) {
      double h11 = sigma, h22 = sigma, h21 = 0, g1 = 0, g2 = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double fApB = dec[i] * p.A + p.B;
        double pr, q;
        if (fApB >= 0) {
          pr = std::exp(-fApB) / (1.0 + std::exp(-fApB));
          q = 1.0 / (1.0 + std::exp(-fApB));
        } else {
          pr = 1.0 / (1.0 + std::exp(fApB));
          q = std::exp(fApB) / (1.0 + std::exp(fApB));
        }
        const double d2 = pr * q;
        h11 += dec[i] * dec[i] * d2;
        h22 += d2;
        h21 += dec[i] * d2;
        const double d1 = t[i] - pr;
        g1 += dec[i] * d1;
        g2 += d1;
      }
      if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
      const double det = h11 * h22 - h21 * h21;
      const double dA = -(h22 * g1 - h21 * g2) / det;
      const double dB = -(-h21 * g1 + h11 * g2) / det;
      const double gd = g1 * dA + g2 * dB;
      double step = 1.0;
      while (step >= 1e-10) {
        const double nA = p.A + step * dA;
        const double nB = p.B + step * dB;
        const double nf = loss(nA, nB);
        if (nf < fval + 1e-4 * step * gd) {
          p.A = nA;
          p.B = nB;
          fval = nf;
          break;
        }
        step /= 2.0;
      }
      if (step < 1e-10) break;
    }
    return p;
  }
};

struct SvmModel {
  Samples support;           // standardized support vectors
  std::vector<double> coef;  // alpha_t * y_t
  double rho = 0.0;
  double gamma = 1.0;
  PlattScaling platt;
  std::size_t iterations = 0;
  double violation = 0.0;

  double decision(std::span<const double> z) const {
    double f = -rho;
    for (std::size_t t = 0; t < support.size(); ++t) f += coef[t] * rbf(support.row(t), z, gamma);
    return f;
  }
  double probability(std::span<const double> z) const { return platt(decision(z)); }
};

inline SvmModel fit_svm(const Samples& z, const ModelSpec& spec) {
  SmoOptions opt;
  opt.C = spec.number("svm.C", 1.0);
  opt.gamma = spec.number("svm.gamma", 1.0 / static_cast<double>(z.cols));
  opt.tolerance = spec.number("svm.tolerance", 1e-3);
  opt.max_iter = static_cast<std::size_t>(spec.number("svm.max_iter", 0.0));
  std::vector<int> y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) y[i] = z.labels[i] == 1 ? 1 : -1;
  auto res = smo_solve(z, y, opt);
  SvmModel m;
  m.gamma = opt.gamma;
  m.rho = res.rho;
  m.iterations = res.iterations;
  m.violation = res.violation;
  m.support = Samples(z.cols);
  for (std::size_t t = 0; t < z.size(); ++t) {
    if (res.alpha[t] > 0) {
      m.support.add(z.row(t), z.labels[t]);
      m.coef.push_back(res.alpha[t] * y[t]);
    }
  }
  std::vector<double> dec(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) dec[i] = m.decision(z.row(i));
  m.platt = PlattScaling::fit(dec, z.labels);
  return m;
}

// ---------------------------------------------------------------------------
// Baselines

/// Uniform pseudo-random probability per row, seeded and keyed by row
/// identity; no relation to the features is learned.
struct RandomBaselineModel {
  std::uint64_t seed = 0;

  double probability(std::span<const double> x, std::uint64_t key) const {
    std::uint64_t h = key;
    if (h == 0) {
      for (double v : x) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        h = splitmix64(h ^ bits);
      }
    }
    return static_cast<double>(splitmix64(splitmix64(seed) ^ h) >> 11) * 0x1.0p-53;
  }
};

/// Single-feature threshold rule chosen for training accuracy.
struct OneRuleModel {
  int feature = -1;  // -1: constant prediction
  double threshold = 0.0;
  double left_probability = 0.0;   // x[feature] <= threshold
  double right_probability = 0.0;

  double probability(std::span<const double> z) const {
    if (feature < 0) return left_probability;
    return z[static_cast<std::size_t>(feature)] <= threshold ? left_probability : right_probability;
  }
};

inline OneRuleModel fit_one_rule(const Samples& z) {
  OneRuleModel m;
  const double n = static_cast<double>(z.size());
  double ones = 0;
  for (int l : z.labels) ones += l;
  m.left_probability = m.right_probability = n > 0 ? ones / n : 0.0;
  auto correct = [](double side_ones, double side_n) { return std::max(side_ones, side_n - side_ones); };
  double best = correct(ones, n);
  std::vector<std::size_t> order(z.size());
  for (std::size_t f = 0; f < z.cols; ++f) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return z.values[a * z.cols + f] < z.values[b * z.cols + f];
    });
    double left_ones = 0;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      left_ones += z.labels[order[k]];
      const double xk = z.values[order[k] * z.cols + f];
      if (!(xk < z.values[order[k + 1] * z.cols + f])) continue;
      const double nl = static_cast<double>(k + 1);
      const double score = correct(left_ones, nl) + correct(ones - left_ones, n - nl);
      if (score > best + 1e-9) {
        best = score;
        m.feature = static_cast<int>(f);
        m.threshold = xk;
        m.left_probability = left_ones / nl;
        m.right_probability = (ones - left_ones) / (n - nl);
      }
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Trained model facade

class TrainedModel {
 public:
  using Impl = std::variant<LogisticModel, GaussianNbModel, KnnModel, TreeModel, SvmModel, RandomBaselineModel,
                            OneRuleModel>;

  TrainedModel(ModelSpec spec, Standardizer st, Impl impl, std::size_t width)
      : spec_(std::move(spec)), standardizer_(std::move(st)), impl_(std::move(impl)), width_(width) {}

  const ModelSpec& spec() const noexcept { return spec_; }
  const Standardizer& standardizer() const noexcept { return standardizer_; }
  std::size_t feature_count() const noexcept { return width_; }
  double threshold() const { return spec_.threshold(); }
  const std::optional<FeatureSchema>& schema() const noexcept { return schema_; }
  void set_schema(FeatureSchema s) { schema_ = std::move(s); }

  template <typename T>
  const T* as() const noexcept {
    return std::get_if<T>(&impl_);
  }

  double predict_probability(std::span<const double> x, std::uint64_t key = 0) const {
    if (x.size() != width_) {
      throw InvalidArgument("model expects " + std::to_string(width_) + " features, got " + std::to_string(x.size()));
    }
    for (double v : x) {
      if (!std::isfinite(v)) throw InvalidArgument("non-finite feature value");
    }
    auto z = standardizer_.apply(x);
    double p = std::visit(
        [&](const auto& m) -> double {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, RandomBaselineModel>) {
            return m.probability(x, key);
          } else {
            return m.probability(z);
          }
        },
        impl_);
    return std::clamp(p, 0.0, 1.0);
  }

  int predict_class(std::span<const double> x, std::uint64_t key = 0) const {
    return predict_probability(x, key) >= threshold() ? 1 : 0;
  }

  double predict_probability(const Instance& inst) const { return predict_probability(row_of(inst), instance_key(inst)); }
  int predict_class(const Instance& inst) const { return predict_class(row_of(inst), instance_key(inst)); }

  std::vector<double> predict_probabilities(const Samples& s) const {
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = predict_probability(s.row(i), s.keys[i]);
    return out;
  }

  /// Checks the FDM schema against the training schema when one is known.
  std::vector<double> predict_probabilities(const FeatureDataModel& fdm) const {
    check_schema(fdm.schema);
    return predict_probabilities(to_samples(fdm));
  }

  void check_schema(const FeatureSchema& s) const {
    if (schema_ && !(*schema_ == s)) {
      throw InvalidArgument(std::string("schema mismatch: model trained on ") +
                            (schema_->directed ? "directed" : "undirected") +
                            (schema_->includes_global ? "+global" : "") + " features, got " +
                            (s.directed ? "directed" : "undirected") + (s.includes_global ? "+global" : ""));
    }
    if (s.column_count() != width_) throw InvalidArgument("schema width does not match model");
  }

 private:
  std::vector<double> row_of(const Instance& inst) const {
    std::vector<double> row = inst.features;
    if (schema_ ? schema_->includes_global : inst.global_density.has_value()) {
      if (!inst.global_density) throw InvalidArgument("instance lacks the global density feature");
      row.push_back(*inst.global_density);
    }
    return row;
  }

  ModelSpec spec_;
  Standardizer standardizer_;
  Impl impl_;
  std::size_t width_;
  std::optional<FeatureSchema> schema_;
};

inline TrainedModel fit(const ModelSpec& spec, const Samples& train) {
  spec.validate();
  if (train.size() == 0) throw InvalidArgument("fit: empty training data");
  if (train.cols == 0) throw InvalidArgument("fit: no features");
  for (double v : train.values) {
    if (!std::isfinite(v)) throw InvalidArgument("fit: non-finite feature value");
  }
  const auto ones = static_cast<std::size_t>(std::count(train.labels.begin(), train.labels.end(), 1));
  const bool baseline = spec.kind == ModelKind::random_baseline || spec.kind == ModelKind::one_rule_baseline;
  if (!baseline && (ones == 0 || ones == train.size())) {
    throw InvalidArgument("fit: training data must contain both labels for " + std::string(to_string(spec.kind)));
  }
  Standardizer st = Standardizer::fit(train);
  Samples z = st.apply(train);
  TrainedModel::Impl impl = [&]() -> TrainedModel::Impl {
    switch (spec.kind) {
      case ModelKind::logistic_regression: return fit_logistic(z, spec);
      case ModelKind::gaussian_nb: return fit_gaussian_nb(z, spec);
      case ModelKind::knn: return KnnModel{z, static_cast<std::size_t>(spec.number("knn.k", 5))};
      case ModelKind::decision_tree: return fit_tree(z, spec);
      case ModelKind::svm_rbf: return fit_svm(z, spec);
      case ModelKind::random_baseline: return RandomBaselineModel{*spec.seed()};
      case ModelKind::one_rule_baseline: return fit_one_rule(z);
    }
    throw InvalidArgument("unsupported model kind");
  }();
  return TrainedModel(spec, std::move(st), std::move(impl), train.cols);
}

inline TrainedModel fit(const ModelSpec& spec, const FeatureDataModel& train) {
  TrainedModel m = fit(spec, to_samples(train));
  m.set_schema(train.schema);
  return m;
}

// ---------------------------------------------------------------------------
// k-fold cross-validation

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// k disjoint test folds covering [0, n) whose sizes differ by at most one.
/// With labels, indices are shuffled within each class and dealt round-robin
/// class after class, so per-class counts per fold also differ by at most one.
inline std::vector<Fold> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed,
                                     std::span<const int> stratify_labels = {}) {
  if (k < 2 || k > n) throw InvalidArgument("kfold_split: need 2 <= k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  if (!stratify_labels.empty() && stratify_labels.size() != n) throw InvalidArgument("kfold_split: label count differs from n");
  Rng rng(seed);
  std::vector<std::size_t> order;
  order.reserve(n);
  if (stratify_labels.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
  } else {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < n; ++i) by_class[stratify_labels[i]].push_back(i);
    for (auto& [label, idx] : by_class) {
      rng.shuffle(idx);
      order.insert(order.end(), idx.begin(), idx.end());
    }
  }
  std::vector<Fold> folds(k);
  for (std::size_t pos = 0; pos < n; ++pos) folds[pos % k].test.push_back(order[pos]);
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(folds[f].test.begin(), folds[f].test.end());
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) folds[f].train.insert(folds[f].train.end(), folds[g].test.begin(), folds[g].test.end());
    }
  }
  for (auto& f : folds) std::sort(f.train.begin(), f.train.end());
  return folds;
}

/// Predictions of `model` on `test` as an evaluation report.
inline EvaluationReport evaluate_model(const TrainedModel& model, const Samples& test) {
  auto probs = model.predict_probabilities(test);
  std::vector<int> preds(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) preds[i] = probs[i] >= model.threshold() ? 1 : 0;
  EvaluationReport r = evaluate(preds, test.labels, probs);
  r.model = model.spec().describe();
  return r;
}

/// Stratified k-fold cross-validation. Aggregate counts are summed over folds;
/// aggregate rates are fold-size-weighted means of the per-fold rates (AUC over
/// the folds where it is defined).
/// `oof_scores`, when given, receives each instance's out-of-fold probability.
inline EvaluationReport cross_validate(const ModelSpec& spec, const Samples& data, std::size_t k, std::uint64_t seed,
                                       std::vector<double>* oof_scores = nullptr) {
  auto folds = kfold_split(data.size(), k, seed, data.labels);
  if (oof_scores) oof_scores->assign(data.size(), 0.0);
  EvaluationReport agg;
  double auc_weight = 0.0, auc_sum = 0.0;
  const double n = static_cast<double>(data.size());
  for (const auto& fold : folds) {
    auto model = fit(spec, data.subset(fold.train));
    auto r = evaluate_model(model, data.subset(fold.test));
    if (oof_scores) {
      for (std::size_t i : fold.test) (*oof_scores)[i] = model.predict_probability(data.row(i), data.keys[i]);
    }
    const double w = static_cast<double>(fold.test.size()) / n;
    agg.confusion += r.confusion;
    agg.accuracy += w * r.accuracy;
    agg.precision_weighted += w * r.precision_weighted;
    agg.recall_weighted += w * r.recall_weighted;
    agg.f_weighted += w * r.f_weighted;
    agg.precision_positive += w * r.precision_positive;
    agg.recall_positive += w * r.recall_positive;
    agg.f_positive += w * r.f_positive;
    agg.zero_division = agg.zero_division || r.zero_division;
    if (r.auc) {
      auc_sum += w * *r.auc;
      auc_weight += w;
    }
    agg.folds.push_back(std::move(r));
  }
  if (auc_weight > 0) agg.auc = auc_sum / auc_weight;
  agg.model = spec.describe();
  agg.seed = seed;
  return agg;
}

inline EvaluationReport cross_validate(const ModelSpec& spec, const FeatureDataModel& fdm, std::size_t k,
                                       std::uint64_t seed) {
  auto r = cross_validate(spec, to_samples(fdm), k, seed);
  r.train_source = fdm.source;
  r.test_source = fdm.source;
  for (auto& f : r.folds) {
    f.train_source = fdm.source;
    f.test_source = fdm.source;
    f.seed = seed;
  }
  return r;
}

}  // namespace linkassess
