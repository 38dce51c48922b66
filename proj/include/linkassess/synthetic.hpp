#pragma once

// Planted multiplex datasets: actors with latent positions on a unit torus;
// each interaction layer links the closest pairs under a jittered copy of the
// positions, and the social network is the first layer with a fraction of
// its edges rewired at random.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "linkassess/dataset.hpp"
#include "linkassess/error.hpp"
#include "linkassess/graph.hpp"
#include "linkassess/random.hpp"

namespace linkassess {

struct PlantedLayer {
  std::string id;
  std::size_t edges = 0;
  double jitter = 0.0;  // std-dev of the Gaussian displacement of latent positions
};

struct PlantedOptions {
  std::string name = "planted";
  std::size_t nodes = 60;
  bool directed = false;
  std::string sn_id = "sn";
  double sn_rewire = 0.05;  // fraction of the first layer's edges replaced by random non-edges
  std::vector<PlantedLayer> layers = {{"g1", 338, 0.0}};
};

namespace detail {

inline double gaussian(Rng& rng) {
  double u1 = rng.uniform01();
  double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double torus_distance(const std::pair<double, double>& a, const std::pair<double, double>& b) {
  double dx = std::abs(a.first - b.first);
  double dy = std::abs(a.second - b.second);
  dx = std::min(dx, 1.0 - dx);
  dy = std::min(dy, 1.0 - dy);
  return std::sqrt(dx * dx + dy * dy);
}

/// The `m` closest pairs; directed layers add a per-ordered-pair perturbation
/// so that reciprocity is partial.
inline std::vector<IndexPair> closest_pairs(const std::vector<std::pair<double, double>>& pos, std::size_t m,
                                            bool directed, Rng& rng) {
  const auto n = static_cast<NodeIndex>(pos.size());
  std::vector<std::pair<double, IndexPair>> scored;
  for (NodeIndex u = 0; u < n; ++u) {
    for (NodeIndex v = directed ? 0 : u + 1; v < n; ++v) {
      if (u == v) continue;
      double d = torus_distance(pos[u], pos[v]);
      if (directed) d *= 1.0 + 0.6 * rng.uniform01();
      scored.push_back({d, {u, v}});
    }
  }
  if (m > scored.size()) throw InvalidArgument("planted layer asks for more edges than node pairs");
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<IndexPair> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) out.push_back(scored[k].second);
  return out;
}

}  // namespace detail

/// Deterministic for a fixed seed. The SN has the first layer's edge count.
inline Dataset planted_multiplex(const PlantedOptions& opt, std::uint64_t seed) {
  if (opt.layers.empty()) throw InvalidArgument("planted dataset needs at least one layer");
  if (opt.nodes < 3) throw InvalidArgument("planted dataset needs at least three nodes");
  if (!(opt.sn_rewire >= 0.0 && opt.sn_rewire <= 1.0)) throw InvalidArgument("sn_rewire must lie in [0, 1]");
  Rng rng(seed);
  const auto names = numbered_names(opt.nodes, "a");
  std::vector<std::pair<double, double>> base(opt.nodes);
  for (auto& p : base) p = {rng.uniform01(), rng.uniform01()};

  Dataset data;
  data.name = opt.name;
  std::vector<IndexPair> first_edges;
  for (std::size_t li = 0; li < opt.layers.size(); ++li) {
    const auto& layer = opt.layers[li];
    Rng lrng(derive_seed(seed, li + 1));
    auto pos = base;
    if (layer.jitter > 0) {
      for (auto& p : pos) {
        p.first = std::fmod(p.first + layer.jitter * detail::gaussian(lrng) + 4.0, 1.0);
        p.second = std::fmod(p.second + layer.jitter * detail::gaussian(lrng) + 4.0, 1.0);
      }
    }
    auto edges = detail::closest_pairs(pos, layer.edges, opt.directed, lrng);
    if (li == 0) first_edges = edges;
    data.exogenous.push_back(Network::from_index_edges(layer.id, opt.directed, names, std::move(edges)));
  }

  // SN: first layer with round(rewire * m) edges swapped for random non-edges
  const Network& g1 = data.exogenous.front();
  Rng srng(derive_seed(seed, 0));
  const auto swaps = static_cast<std::size_t>(std::llround(opt.sn_rewire * static_cast<double>(g1.edge_count())));
  auto drop = srng.sample_without_replacement(first_edges.size(), swaps);
  std::vector<IndexPair> kept;
  kept.reserve(first_edges.size());
  {
    std::size_t d = 0;
    auto sorted_edges = g1.edges();
    for (std::size_t k = 0; k < sorted_edges.size(); ++k) {
      if (d < drop.size() && drop[d] == k) {
        ++d;
        continue;
      }
      kept.push_back(sorted_edges[k]);
    }
  }
  std::vector<IndexPair> non_edges;
  for (NodeIndex u = 0; u < opt.nodes; ++u) {
    for (NodeIndex v = opt.directed ? 0 : u + 1; v < opt.nodes; ++v) {
      if (u != v && !g1.has_edge(u, v)) non_edges.emplace_back(u, v);
    }
  }
  for (auto k : srng.sample_without_replacement(non_edges.size(), std::min(swaps, non_edges.size()))) {
    kept.push_back(non_edges[k]);
  }
  data.sn = Network::from_index_edges(opt.sn_id, opt.directed, names, std::move(kept));
  return data;
}

/// Research-group-shaped fixture: an undirected SN and four exogenous layers
/// of decreasing fidelity.
inline PlantedOptions research_group_shape() {
  PlantedOptions opt;
  opt.name = "planted-rg";
  opt.sn_id = "facebook";
  opt.layers = {{"work", 338, 0.0}, {"lunch", 386, 0.03}, {"leisure", 176, 0.05}, {"coauthor", 42, 0.08}};
  return opt;
}

/// Law-firm-shaped fixture: a directed SN and two exogenous layers.
inline PlantedOptions law_firm_shape() {
  PlantedOptions opt;
  opt.name = "planted-lf";
  opt.nodes = 71;
  opt.directed = true;
  opt.sn_id = "friends";
  opt.layers = {{"cowork", 726, 0.0}, {"advice", 717, 0.04}};
  return opt;
}

}  // namespace linkassess
