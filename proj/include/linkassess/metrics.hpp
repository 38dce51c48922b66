#pragma once

// Confusion counts, support-weighted precision/recall/F, ROC and AUC, and the
// report records that carry them to disk.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "linkassess/error.hpp"
#include "linkassess/text.hpp"

namespace linkassess {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }

  ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

namespace detail {
inline void check_labels(std::span<const int> v, const char* what) {
  for (int x : v) {
    if (x != 0 && x != 1) throw InvalidArgument(std::string(what) + " must contain only 0/1 labels");
  }
}
}  // namespace detail

/// Positive class is 1.
inline ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truth) {
  if (preds.size() != truth.size()) throw InvalidArgument("confusion: prediction and truth lengths differ");
  if (preds.empty()) throw InvalidArgument("confusion: no instances");
  detail::check_labels(preds, "predictions");
  detail::check_labels(truth, "truth");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (truth[i] == 1) {
      preds[i] == 1 ? ++cm.tp : ++cm.fn;
    } else {
      preds[i] == 1 ? ++cm.fp : ++cm.tn;
    }
  }
  return cm;
}

/// Precision, recall and F for one class treated as positive.
struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  bool zero_division = false;  // a denominator was 0 and the score was set to 0
};

inline ClassScores class_scores(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassScores s;
  if (tp + fp > 0) {
    s.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  } else {
    s.zero_division = true;
  }
  if (tp + fn > 0) {
    s.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  } else {
    s.zero_division = true;
  }
  if (s.precision + s.recall > 0) s.f = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

struct WeightedMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  ClassScores positive;  // class 1 only
  ClassScores negative;  // class 0 only
  bool zero_division = false;
};

/// Accuracy plus per-class scores averaged with class-support weights.
inline WeightedMetrics weighted_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw InvalidArgument("weighted_metrics: no instances");
  const double total = static_cast<double>(cm.total());
  WeightedMetrics w;
  w.accuracy = static_cast<double>(cm.tp + cm.tn) / total;
  w.positive = class_scores(cm.tp, cm.fp, cm.fn);
  w.negative = class_scores(cm.tn, cm.fn, cm.fp);
  const double w1 = static_cast<double>(cm.tp + cm.fn) / total;
  const double w0 = static_cast<double>(cm.tn + cm.fp) / total;
  w.precision = w1 * w.positive.precision + w0 * w.negative.precision;
  w.recall = w1 * w.positive.recall + w0 * w.negative.recall;
  w.f = w1 * w.positive.f + w0 * w.negative.f;
  w.zero_division = w.positive.zero_division || w.negative.zero_division;
  return w;
}

inline WeightedMetrics weighted_metrics(std::span<const int> preds, std::span<const int> truth) {
  return weighted_metrics(confusion(preds, truth));
}

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr), from (0,0) to (1,1)
  double auc = 0.0;
};

namespace detail {
inline std::pair<std::size_t, std::size_t> class_counts(std::span<const double> scores, std::span<const int> truth) {
  if (scores.size() != truth.size()) throw InvalidArgument("roc: score and truth lengths differ");
  check_labels(truth, "truth");
  std::size_t pos = static_cast<std::size_t>(std::count(truth.begin(), truth.end(), 1));
  std::size_t neg = truth.size() - pos;
  if (pos == 0 || neg == 0) throw InvalidArgument("roc: truth must contain both classes");
  return {pos, neg};
}
}  // namespace detail

/// Threshold sweep over distinct scores (ties form one step), trapezoidal AUC.
inline RocCurve roc_auc(std::span<const double> scores, std::span<const int> truth) {
  auto [pos, neg] = detail::class_counts(scores, truth);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  RocCurve roc;
  roc.points.emplace_back(0.0, 0.0);
  std::size_t tp = 0, fp = 0;
  double area = 0.0;
  double prev_fpr = 0.0, prev_tpr = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    while (k < order.size() && scores[order[k]] == s) {
      truth[order[k]] == 1 ? ++tp : ++fp;
      ++k;
    }
    const double fpr = static_cast<double>(fp) / static_cast<double>(neg);
    const double tpr = static_cast<double>(tp) / static_cast<double>(pos);
    area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
    roc.points.emplace_back(fpr, tpr);
    prev_fpr = fpr;
    prev_tpr = tpr;
  }
  roc.auc = area;
  return roc;
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half (the Mann-Whitney U statistic scaled to [0, 1]).
inline double mann_whitney_auc(std::span<const double> scores, std::span<const int> truth) {
  auto [pos, neg] = detail::class_counts(scores, truth);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // mid-ranks
  double rank_sum_pos = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    std::size_t end = k;
    while (end < order.size() && scores[order[end]] == scores[order[k]]) ++end;
    const double mid = (static_cast<double>(k + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t t = k; t < end; ++t) {
      if (truth[order[t]] == 1) rank_sum_pos += mid;
    }
    k = end;
  }
  const double p = static_cast<double>(pos);
  const double u = rank_sum_pos - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(neg));
}

inline void write_roc(std::ostream& out, const RocCurve& roc) {
  out << "fpr\ttpr\n";
  for (const auto& [x, y] : roc.points) out << text::format_double(x) << '\t' << text::format_double(y) << '\n';
}

/// Metrics of one evaluation plus where it came from.
struct EvaluationReport {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  double precision_weighted = 0.0;
  double recall_weighted = 0.0;
  double f_weighted = 0.0;
  double precision_positive = 0.0;
  double recall_positive = 0.0;
  double f_positive = 0.0;
  std::optional<double> auc;
  bool zero_division = false;

  std::string train_source;
  std::string test_source;
  std::string model;
  std::uint64_t seed = 0;

  std::vector<EvaluationReport> folds;  // per-fold reports for cross-validation

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

/// Report from hard predictions and (optionally) probability scores.
inline EvaluationReport evaluate(std::span<const int> preds, std::span<const int> truth,
                                 std::span<const double> scores = {}) {
  EvaluationReport r;
  r.confusion = confusion(preds, truth);
  auto w = weighted_metrics(r.confusion);
  r.accuracy = w.accuracy;
  r.precision_weighted = w.precision;
  r.recall_weighted = w.recall;
  r.f_weighted = w.f;
  r.precision_positive = w.positive.precision;
  r.recall_positive = w.positive.recall;
  r.f_positive = w.positive.f;
  r.zero_division = w.zero_division;
  if (!scores.empty()) {
    const auto pos = std::count(truth.begin(), truth.end(), 1);
    if (pos > 0 && static_cast<std::size_t>(pos) < truth.size()) r.auc = roc_auc(scores, truth).auc;
  }
  return r;
}

/// Flat "key = value" record, one field per line, fixed key order.
inline void write_report(std::ostream& out, const EvaluationReport& r) {
  auto kv = [&](const char* k, const std::string& v) { out << k << " = " << v << '\n'; };
  kv("train_source", r.train_source);
  kv("test_source", r.test_source);
  kv("model", r.model);
  kv("seed", std::to_string(r.seed));
  kv("tp", std::to_string(r.confusion.tp));
  kv("tn", std::to_string(r.confusion.tn));
  kv("fp", std::to_string(r.confusion.fp));
  kv("fn", std::to_string(r.confusion.fn));
  kv("accuracy", text::format_double(r.accuracy));
  kv("precision_weighted", text::format_double(r.precision_weighted));
  kv("recall_weighted", text::format_double(r.recall_weighted));
  kv("f_weighted", text::format_double(r.f_weighted));
  kv("precision_positive", text::format_double(r.precision_positive));
  kv("recall_positive", text::format_double(r.recall_positive));
  kv("f_positive", text::format_double(r.f_positive));
  kv("auc", r.auc ? text::format_double(*r.auc) : std::string("na"));
  kv("zero_division", r.zero_division ? "1" : "0");
  kv("folds", std::to_string(r.folds.size()));
}

/// Inverse of write_report (per-fold detail is not part of the record).
inline EvaluationReport read_report(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = text::trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", lineno);
    kv[std::string(text::trim(s.substr(0, eq)))] = std::string(text::trim(s.substr(eq + 1)));
  }
  auto get = [&](const char* k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) throw ParseError(std::string("report is missing '") + k + "'", 0);
    return it->second;
  };
  auto count = [&](const char* k) { return static_cast<std::size_t>(text::parse_int(get(k))); };
  EvaluationReport r;
  r.train_source = get("train_source");
  r.test_source = get("test_source");
  r.model = get("model");
  r.seed = static_cast<std::uint64_t>(std::stoull(get("seed")));
  r.confusion = {count("tp"), count("tn"), count("fp"), count("fn")};
  r.accuracy = text::parse_double(get("accuracy"));
  r.precision_weighted = text::parse_double(get("precision_weighted"));
  r.recall_weighted = text::parse_double(get("recall_weighted"));
  r.f_weighted = text::parse_double(get("f_weighted"));
  r.precision_positive = text::parse_double(get("precision_positive"));
  r.recall_positive = text::parse_double(get("recall_positive"));
  r.f_positive = text::parse_double(get("f_positive"));
  if (get("auc") != "na") r.auc = text::parse_double(get("auc"));
  r.zero_division = get("zero_division") == "1";
  return r;
}

inline const char* report_table_header() {
  return "train\ttest\tmodel\tseed\taccuracy\tprecision_w\trecall_w\tf_w\tprecision_pos\trecall_pos\tf_pos\tauc";
}

/// One tab-separated row for aggregation across runs.
inline std::string report_table_row(const EvaluationReport& r) {
  std::string row = r.train_source + '\t' + r.test_source + '\t' + r.model + '\t' + std::to_string(r.seed);
  for (double x : {r.accuracy, r.precision_weighted, r.recall_weighted, r.f_weighted, r.precision_positive,
                   r.recall_positive, r.f_positive}) {
    row += '\t' + text::format_double(x);
  }
  row += '\t' + (r.auc ? text::format_double(*r.auc) : std::string("na"));
  return row;
}

}  // namespace linkassess
