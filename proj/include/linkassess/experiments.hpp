#pragma once

// Experiment protocols: train on one FDM and assess the social network's
// pairs, matched random-graph null models, and noise-edge injection.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linkassess/classifiers.hpp"
#include "linkassess/dataset.hpp"
#include "linkassess/error.hpp"
#include "linkassess/features.hpp"
#include "linkassess/graph.hpp"
#include "linkassess/metrics.hpp"
#include "linkassess/random.hpp"
#include "linkassess/text.hpp"

namespace linkassess {

/// What the classifier is trained on.
struct TrainSource {
  enum class Kind { network, aggregated, sn_self };
  Kind kind = Kind::aggregated;
  std::string network_id;  // for Kind::network

  static TrainSource parse(std::string_view s) {
    if (s == "aggregated") return {Kind::aggregated, {}};
    if (s == "sn_self" || s == "sn") return {Kind::sn_self, {}};
    if (s.empty()) throw InvalidArgument("empty training source");
    return {Kind::network, std::string(s)};
  }

  std::string label() const {
    switch (kind) {
      case Kind::aggregated: return "aggregated";
      case Kind::sn_self: return "sn_self";
      case Kind::network: return network_id;
    }
    return "?";
  }
};

struct AssessmentPlan {
  TrainSource train;
  ModelSpec model;
  std::size_t kfold_k = 10;  // sn_self only
  std::uint64_t seed = 0;
};

/// Training FDM for a source: single networks omit the density column,
/// the aggregate includes it.
inline FeatureDataModel training_fdm(const Dataset& data, const TrainSource& src) {
  switch (src.kind) {
    case TrainSource::Kind::network: {
      const auto& net = data.exogenous_network(src.network_id);
      if (net.directed() != data.directed()) throw InvalidArgument("training network directedness differs from SN");
      return build_fdm(net, false);
    }
    case TrainSource::Kind::aggregated:
      if (data.exogenous.empty()) throw InvalidArgument("dataset has no exogenous networks to aggregate");
      for (const auto& net : data.exogenous) {
        if (net.directed() != data.directed()) throw InvalidArgument("training network directedness differs from SN");
      }
      return build_aggregated_fdm(data.exogenous);
    case TrainSource::Kind::sn_self: return build_fdm(data.sn, false);
  }
  throw InvalidArgument("bad training source");
}

/// The plan's model spec with the plan seed filled in when the spec has none.
inline ModelSpec seeded_spec(const ModelSpec& spec, std::uint64_t seed) {
  ModelSpec s = spec;
  if (!s.seed()) s.set("seed", std::to_string(seed));
  return s;
}

/// Report plus the per-pair scores it was computed from.
struct AssessmentOutcome {
  EvaluationReport report;
  std::vector<double> scores;  // probability per SN pair (out-of-fold for sn_self)
  std::vector<int> truth;
};

inline AssessmentOutcome assess(const Dataset& data, const AssessmentPlan& plan) {
  const ModelSpec spec = seeded_spec(plan.model, plan.seed);
  AssessmentOutcome out;
  if (plan.train.kind == TrainSource::Kind::sn_self) {
    auto fdm = build_fdm(data.sn, false);
    Samples samples = to_samples(fdm);
    out.report = cross_validate(spec, samples, plan.kfold_k, plan.seed, &out.scores);
    out.truth = samples.labels;
  } else {
    auto train = training_fdm(data, plan.train);
    auto test = build_fdm(data.sn, train.schema.includes_global);
    auto model = fit(spec, train);
    model.check_schema(test.schema);
    Samples ts = to_samples(test);
    out.report = evaluate_model(model, ts);
    out.scores = model.predict_probabilities(ts);
    out.truth = ts.labels;
  }
  out.report.train_source = plan.train.label();
  out.report.test_source = data.sn.id();
  out.report.model = spec.describe();
  out.report.seed = plan.seed;
  return out;
}

/// psi(train, SN): fit on the training FDM and evaluate on the SN's FDM, or
/// stratified k-fold on the SN's own FDM for sn_self.
inline EvaluationReport run_assessment(const Dataset& data, const AssessmentPlan& plan) {
  return assess(data, plan).report;
}

/// Every network replaced by a uniform G(n, m) graph of the same size.
inline Dataset matched_random_dataset(const Dataset& data, std::uint64_t seed) {
  Dataset out;
  out.name = data.name + "-null";
  out.sn = random_graph(data.sn.node_count(), data.sn.edge_count(), derive_seed(seed, 0), data.directed(), data.sn.id());
  for (std::size_t k = 0; k < data.exogenous.size(); ++k) {
    const auto& net = data.exogenous[k];
    out.exogenous.push_back(
        random_graph(net.node_count(), net.edge_count(), derive_seed(seed, k + 1), net.directed(), net.id()));
  }
  return out;
}

struct MetricSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (0 for a single value)
};

inline MetricSummary summarize_values(std::span<const double> xs) {
  MetricSummary s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

struct NullModelResult {
  std::vector<EvaluationReport> replicates;
  MetricSummary accuracy, precision, recall, f, auc;
};

/// Replicate i regenerates every network with seed + i and reruns the plan.
inline NullModelResult run_null_model(const Dataset& data, const AssessmentPlan& plan, std::size_t n_replicates) {
  if (n_replicates == 0) throw InvalidArgument("run_null_model needs at least one replicate");
  NullModelResult res;
  std::vector<double> acc, p, r, f, auc;
  for (std::size_t i = 0; i < n_replicates; ++i) {
    const std::uint64_t rep_seed = plan.seed + i;
    Dataset rnd = matched_random_dataset(data, rep_seed);
    AssessmentPlan rp = plan;
    rp.seed = rep_seed;
    auto rep = run_assessment(rnd, rp);
    acc.push_back(rep.accuracy);
    p.push_back(rep.precision_weighted);
    r.push_back(rep.recall_weighted);
    f.push_back(rep.f_weighted);
    if (rep.auc) auc.push_back(*rep.auc);
    res.replicates.push_back(std::move(rep));
  }
  res.accuracy = summarize_values(acc);
  res.precision = summarize_values(p);
  res.recall = summarize_values(r);
  res.f = summarize_values(f);
  res.auc = summarize_values(auc);
  return res;
}

struct NoiseInjection {
  Network disguised;
  std::vector<NamePair> injected;
};

/// Add floor((max_pairs - m) * r) non-edges, sampled uniformly without replacement.
inline NoiseInjection inject_noise(const Network& sn, double r, std::uint64_t seed) {
  if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument("inject_noise: r must lie in (0, 1]");
  const std::size_t n = sn.node_count();
  std::vector<IndexPair> non_edges;
  non_edges.reserve(sn.max_edges() - sn.edge_count());
  for (NodeIndex u = 0; u < n; ++u) {
    for (NodeIndex v = sn.directed() ? 0 : u + 1; v < n; ++v) {
      if (u != v && !sn.has_edge(u, v)) non_edges.emplace_back(u, v);
    }
  }
  const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(non_edges.size()) * r));
  Rng rng(seed);
  auto picks = rng.sample_without_replacement(non_edges.size(), k);
  NoiseInjection out;
  auto edges = sn.edges();
  for (auto idx : picks) {
    const auto& e = non_edges[idx];
    edges.push_back(e);
    out.injected.emplace_back(sn.name(e.first), sn.name(e.second));
  }
  out.disguised = Network::from_index_edges(sn.id() + "-disguised", sn.directed(), sn.node_names(), std::move(edges));
  return out;
}

/// Fraction of `pairs` the model classifies as non-links, features taken from `basis`.
inline double flagged_fraction(const TrainedModel& model, const Network& basis, std::span<const NamePair> pairs) {
  if (pairs.empty()) throw InvalidArgument("noise_success_rate: no injected edges");
  const bool global = model.schema() ? model.schema()->includes_global : false;
  std::optional<double> eta;
  if (global) eta = density(basis);
  std::size_t flagged = 0;
  for (const auto& [u, v] : pairs) {
    if (model.predict_class(make_instance(basis, basis.index_of(u), basis.index_of(v), eta)) == 0) ++flagged;
  }
  return static_cast<double>(flagged) / static_cast<double>(pairs.size());
}

/// Fraction of injected pairs the model classifies as non-links, with
/// features computed on the disguised network.
inline double noise_success_rate(const TrainedModel& model, const Network& disguised,
                                 std::span<const NamePair> injected) {
  for (const auto& [u, v] : injected) {
    if (!disguised.has_edge(disguised.index_of(u), disguised.index_of(v))) {
      throw InvalidArgument("injected pair is not an edge of the disguised network");
    }
  }
  return flagged_fraction(model, disguised, injected);
}

/// Network the injected pairs' features are read from.
enum class FeatureBasis { disguised, original };

inline FeatureBasis parse_feature_basis(std::string_view s) {
  if (s == "disguised") return FeatureBasis::disguised;
  if (s == "original") return FeatureBasis::original;
  throw InvalidArgument("feature basis must be 'disguised' or 'original'");
}

struct NoisePlan {
  std::vector<double> r_values;
  std::size_t runs_per_r = 10;
  TrainSource train;
  ModelSpec model;
  std::uint64_t seed = 0;
  FeatureBasis basis = FeatureBasis::disguised;
};

struct NoiseCell {
  std::size_t r_index = 0;
  double r = 0.0;
  std::size_t run = 0;
  std::size_t injected = 0;
  double success = 0.0;
};

struct NoiseSummary {
  std::vector<NoiseCell> cells;   // r-major, then run
  std::vector<double> r_means;    // per r value
  double grand_mean = 0.0;        // uniform mean of r_means
};

/// Noise cells for an already trained model; cell (i, j) uses seed
/// derive_seed(plan.seed, i, j), so evaluation order never changes results.
inline NoiseSummary run_noise_experiment(const TrainedModel& model, const Network& sn, const NoisePlan& plan) {
  if (plan.r_values.empty()) throw InvalidArgument("noise plan has no r values");
  if (plan.runs_per_r == 0) throw InvalidArgument("noise plan needs at least one run per r");
  NoiseSummary out;
  for (std::size_t i = 0; i < plan.r_values.size(); ++i) {
    const double r = plan.r_values[i];
    if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument("noise plan r values must lie in (0, 1]");
    double sum = 0.0;
    for (std::size_t j = 0; j < plan.runs_per_r; ++j) {
      auto inj = inject_noise(sn, r, derive_seed(plan.seed, i, j));
      NoiseCell cell{i, r, j, inj.injected.size(), 0.0};
      if (inj.injected.empty()) throw InvalidArgument("noise plan r value injects no edges");
      cell.success = plan.basis == FeatureBasis::disguised ? noise_success_rate(model, inj.disguised, inj.injected)
                                                           : flagged_fraction(model, sn, inj.injected);
      sum += cell.success;
      out.cells.push_back(cell);
    }
    out.r_means.push_back(sum / static_cast<double>(plan.runs_per_r));
  }
  double total = 0.0;
  for (double m : out.r_means) total += m;
  out.grand_mean = total / static_cast<double>(out.r_means.size());
  return out;
}

/// Trains on exogenous data only; the disguised SN never enters training.
inline NoiseSummary run_noise_experiment(const Dataset& data, const NoisePlan& plan) {
  if (plan.train.kind == TrainSource::Kind::sn_self) {
    throw InvalidArgument("noise experiments train on exogenous networks, not the SN");
  }
  auto model = fit(seeded_spec(plan.model, plan.seed), training_fdm(data, plan.train));
  return run_noise_experiment(model, data.sn, plan);
}

inline void write_noise_summary(std::ostream& out, const NoiseSummary& s) {
  out << "kind\tr\trun\tinjected\tsuccess_rate\n";
  for (const auto& c : s.cells) {
    out << "cell\t" << text::format_double(c.r) << '\t' << c.run << '\t' << c.injected << '\t'
        << text::format_double(c.success) << '\n';
  }
  for (std::size_t i = 0; i < s.r_means.size(); ++i) {
    const double r = s.cells.empty() ? 0.0 : s.cells[i * (s.cells.size() / s.r_means.size())].r;
    out << "r_mean\t" << text::format_double(r) << "\t-\t-\t" << text::format_double(s.r_means[i]) << '\n';
  }
  out << "grand_mean\t-\t-\t-\t" << text::format_double(s.grand_mean) << '\n';
}

}  // namespace linkassess
