#pragma once

// Tie-strength ranking: every node pair of a ground-truth network scored by a
// classifier's probability and compared against the step-function ranking.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "linkassess/classifiers.hpp"
#include "linkassess/error.hpp"
#include "linkassess/features.hpp"
#include "linkassess/text.hpp"

namespace linkassess {

struct RankingEntry {
  std::string u;
  std::string v;
  double e_obs = 0.0;
  int e_real = 0;
  std::size_t pair_index = 0;  // position of the pair in the source FDM

  friend bool operator==(const RankingEntry&, const RankingEntry&) = default;
};

struct RankingError {
  double total = 0.0;
  double normalized = 0.0;
};

/// Sum of |e_obs - e_real| and its mean over all entries.
inline RankingError ranking_error(std::span<const RankingEntry> entries) {
  if (entries.empty()) throw InvalidArgument("ranking_error: no entries");
  RankingError err;
  for (const auto& e : entries) {
    if (!(e.e_obs >= 0.0 && e.e_obs <= 1.0)) throw InvalidArgument("ranking_error: e_obs outside [0, 1]");
    if (e.e_real != 0 && e.e_real != 1) throw InvalidArgument("ranking_error: e_real must be 0 or 1");
    err.total += std::abs(e.e_obs - e.e_real);
  }
  err.normalized = err.total / static_cast<double>(entries.size());
  return err;
}

struct RankingResult {
  std::vector<RankingEntry> entries;  // ascending e_obs, ties in pair order
  double error_total = 0.0;
  double error_normalized = 0.0;
  std::string model;
  std::string source;
};

/// Sort ascending by e_obs (stable on pair order) and attach both error forms.
inline RankingResult make_ranking(std::vector<RankingEntry> entries, std::string model, std::string source) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const RankingEntry& a, const RankingEntry& b) { return a.e_obs < b.e_obs; });
  RankingResult r;
  auto err = ranking_error(entries);
  r.entries = std::move(entries);
  r.error_total = err.total;
  r.error_normalized = err.normalized;
  r.model = std::move(model);
  r.source = std::move(source);
  return r;
}

/// The step function: every pair scored by its own label.
inline RankingResult best_ranker(const FeatureDataModel& fdm_sn) {
  std::vector<RankingEntry> entries;
  entries.reserve(fdm_sn.size());
  for (std::size_t i = 0; i < fdm_sn.size(); ++i) {
    const auto& inst = fdm_sn.instances[i];
    entries.push_back({inst.u, inst.v, static_cast<double>(inst.label), inst.label, i});
  }
  return make_ranking(std::move(entries), "best_ranker", fdm_sn.source);
}

/// Rank every pair of `fdm_sn` by the model's probability of an edge.
inline RankingResult rank_ties(const TrainedModel& model, const FeatureDataModel& fdm_sn) {
  auto probs = model.predict_probabilities(fdm_sn);
  std::vector<RankingEntry> entries;
  entries.reserve(fdm_sn.size());
  for (std::size_t i = 0; i < fdm_sn.size(); ++i) {
    const auto& inst = fdm_sn.instances[i];
    entries.push_back({inst.u, inst.v, probs[i], inst.label, i});
  }
  return make_ranking(std::move(entries), model.spec().describe(), fdm_sn.source);
}

/// Tab-separated: node_u, node_v, e_obs, e_real, rank_index.
inline void write_ranking(std::ostream& out, const RankingResult& r) {
  out << "node_u\tnode_v\te_obs\te_real\trank_index\n";
  for (std::size_t k = 0; k < r.entries.size(); ++k) {
    const auto& e = r.entries[k];
    out << e.u << '\t' << e.v << '\t' << text::format_double(e.e_obs) << '\t' << e.e_real << '\t' << k << '\n';
  }
}

}  // namespace linkassess
