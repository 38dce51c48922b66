#pragma once

// Simple (no self-loops, no parallel edges) directed or undirected networks
// over string-named nodes, plus ingestion, summary statistics and G(n, m)
// random graphs.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "linkassess/error.hpp"
#include "linkassess/random.hpp"
#include "linkassess/text.hpp"

namespace linkassess {

using NodeIndex = std::uint32_t;
using IndexPair = std::pair<NodeIndex, NodeIndex>;
using NamePair = std::pair<std::string, std::string>;

/// Which neighbourhood to use. `undirected` is only valid on undirected
/// networks; `in`/`out` only on directed ones.
enum class Direction { undirected, in, out };

inline std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::undirected: return "undirected";
    case Direction::in: return "in";
    case Direction::out: return "out";
  }
  return "?";
}

/// Counts of what ingestion silently repaired.
struct EdgeListDiagnostics {
  std::size_t lines_read = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_collapsed = 0;
};

/// Immutable simple graph. Nodes are indexed in lexicographic order of their
/// names, so two networks built from the same edges compare equal regardless
/// of input order.
class Network {
 public:
  Network() = default;

  /// Build from named edges. Self-loops are dropped and duplicates collapsed
  /// (both counted in `diag`). `extra_nodes` adds isolated nodes.
  static Network from_named_edges(std::string id, bool directed, std::span<const NamePair> edges,
                                  std::span<const std::string> extra_nodes = {},
                                  EdgeListDiagnostics* diag = nullptr) {
    std::vector<std::string> names;
    names.reserve(edges.size() * 2 + extra_nodes.size());
    std::size_t loops = 0;
    for (const auto& [u, v] : edges) {
      if (u == v) {
        ++loops;
        continue;
      }
      names.push_back(u);
      names.push_back(v);
    }
    names.insert(names.end(), extra_nodes.begin(), extra_nodes.end());
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());

    std::unordered_map<std::string_view, NodeIndex> lookup;
    lookup.reserve(names.size());
    for (NodeIndex i = 0; i < names.size(); ++i) lookup.emplace(names[i], i);

    std::vector<IndexPair> idx;
    idx.reserve(edges.size());
    for (const auto& [u, v] : edges) {
      if (u == v) continue;
      idx.emplace_back(lookup.at(u), lookup.at(v));
    }
    std::size_t before = idx.size();
    Network net = from_index_edges(std::move(id), directed, std::move(names), std::move(idx));
    if (diag) {
      diag->self_loops_dropped += loops;
      diag->duplicates_collapsed += before - net.edge_count();
    }
    return net;
  }

  /// Build from index pairs over an already sorted, duplicate-free name list.
  static Network from_index_edges(std::string id, bool directed, std::vector<std::string> names,
                                  std::vector<IndexPair> edges) {
    if (!std::is_sorted(names.begin(), names.end()) ||
        std::adjacent_find(names.begin(), names.end()) != names.end()) {
      throw InvalidArgument("node names must be sorted and unique");
    }
    Network net;
    net.id_ = std::move(id);
    net.directed_ = directed;
    net.names_ = std::move(names);
    const std::size_t n = net.names_.size();
    for (auto& e : edges) {
      if (e.first >= n || e.second >= n) throw InvalidArgument("edge endpoint out of range");
      if (!directed && e.first > e.second) std::swap(e.first, e.second);
    }
    edges.erase(std::remove_if(edges.begin(), edges.end(), [](const IndexPair& e) { return e.first == e.second; }),
                edges.end());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    net.edge_count_ = edges.size();

    net.out_.assign(n, {});
    if (directed) net.in_.assign(n, {});
    for (const auto& [u, v] : edges) {
      net.out_[u].push_back(v);
      if (directed) {
        net.in_[v].push_back(u);
      } else {
        net.out_[v].push_back(u);
      }
    }
    for (auto& adj : net.out_) std::sort(adj.begin(), adj.end());
    for (auto& adj : net.in_) std::sort(adj.begin(), adj.end());
    net.lookup_.reserve(n);
    for (NodeIndex i = 0; i < n; ++i) net.lookup_.emplace(net.names_[i], i);
    return net;
  }

  const std::string& id() const noexcept { return id_; }
  bool directed() const noexcept { return directed_; }
  std::size_t node_count() const noexcept { return names_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  const std::vector<std::string>& node_names() const noexcept { return names_; }
  const std::string& name(NodeIndex v) const { return names_.at(v); }

  /// Number of node pairs that could be edges: C(n,2) or n(n-1).
  std::size_t max_edges() const noexcept { return max_edges_for(node_count(), directed_); }
  static std::size_t max_edges_for(std::size_t n, bool directed) noexcept {
    return n < 2 ? 0 : (directed ? n * (n - 1) : n * (n - 1) / 2);
  }

  std::optional<NodeIndex> find(std::string_view name) const {
    auto it = lookup_.find(std::string(name));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
  }

  NodeIndex index_of(std::string_view name) const {
    auto idx = find(name);
    if (!idx) throw InvalidArgument("unknown node '" + std::string(name) + "' in network '" + id_ + "'");
    return *idx;
  }

  /// Throws unless `d` is valid for this network kind.
  Direction check_direction(Direction d) const {
    if (directed_ == (d == Direction::undirected)) {
      throw InvalidArgument("direction '" + std::string(to_string(d)) + "' does not match " +
                            (directed_ ? "directed" : "undirected") + " network '" + id_ + "'");
    }
    return d;
  }

  /// Sorted neighbour indices. Unchecked fast path: `d` must match the network kind.
  std::span<const NodeIndex> adjacency(NodeIndex v, Direction d) const {
    return d == Direction::in ? std::span<const NodeIndex>(in_[v]) : std::span<const NodeIndex>(out_[v]);
  }

  std::size_t degree(NodeIndex v, Direction d) const { return adjacency(v, d).size(); }

  /// u -> v for directed networks, {u, v} otherwise.
  bool has_edge(NodeIndex u, NodeIndex v) const {
    const auto& adj = out_[u];
    return std::binary_search(adj.begin(), adj.end(), v);
  }

  /// All edges in sorted order; undirected edges reported with first < second.
  std::vector<IndexPair> edges() const {
    std::vector<IndexPair> out;
    out.reserve(edge_count_);
    for (NodeIndex u = 0; u < out_.size(); ++u) {
      for (NodeIndex v : out_[u]) {
        if (directed_ || u < v) out.emplace_back(u, v);
      }
    }
    return out;
  }

  std::vector<NamePair> named_edges() const {
    std::vector<NamePair> out;
    out.reserve(edge_count_);
    for (const auto& [u, v] : edges()) out.emplace_back(names_[u], names_[v]);
    return out;
  }

  Network renamed(std::string id) const {
    Network copy = *this;
    copy.id_ = std::move(id);
    return copy;
  }

  friend bool operator==(const Network& a, const Network& b) {
    return a.id_ == b.id_ && a.directed_ == b.directed_ && a.names_ == b.names_ && a.out_ == b.out_;
  }

 private:
  std::string id_;
  bool directed_ = false;
  std::vector<std::string> names_;
  std::vector<std::vector<NodeIndex>> out_;  // adjacency for undirected networks
  std::vector<std::vector<NodeIndex>> in_;   // empty for undirected networks
  std::size_t edge_count_ = 0;
  std::unordered_map<std::string, NodeIndex> lookup_;
};

/// Parse an edge list: one edge per line, two tokens separated by whitespace
/// or a comma; blank lines and lines starting with '#' are ignored.
inline Network read_edge_list(std::istream& in, bool directed, std::string id, EdgeListDiagnostics* diag = nullptr) {
  std::vector<NamePair> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = text::trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto tokens = text::tokenize(s, " \t,");
    if (tokens.size() != 2) {
      throw ParseError("expected exactly two node tokens, found " + std::to_string(tokens.size()), lineno);
    }
    edges.emplace_back(std::string(tokens[0]), std::string(tokens[1]));
  }
  if (edges.empty()) throw ParseError("edge list '" + id + "' contains no edges", 0);
  EdgeListDiagnostics local;
  local.lines_read = edges.size();
  Network net = Network::from_named_edges(std::move(id), directed, edges, {}, &local);
  if (net.edge_count() == 0) throw ParseError("edge list '" + net.id() + "' contains only self-loops", 0);
  if (diag) *diag = local;
  return net;
}

inline Network load_edge_list(const std::string& path, bool directed, std::string id,
                              EdgeListDiagnostics* diag = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list '" + path + "'");
  return read_edge_list(in, directed, std::move(id), diag);
}

inline void write_edge_list(std::ostream& out, const Network& net) {
  out << "# " << net.id() << (net.directed() ? " directed" : " undirected") << " n=" << net.node_count()
      << " m=" << net.edge_count() << '\n';
  for (const auto& [u, v] : net.named_edges()) out << u << ' ' << v << '\n';
}

/// Λ(v), Λ_in(v) or Λ_out(v) as sorted node names.
inline std::vector<std::string> neighbors(const Network& net, std::string_view v, Direction d) {
  net.check_direction(d);
  NodeIndex idx = net.index_of(v);
  std::vector<std::string> out;
  for (NodeIndex w : net.adjacency(idx, d)) out.push_back(net.name(w));
  return out;
}

/// 2m/(n(n-1)) for undirected networks, m/(n(n-1)) for directed ones.
inline double density(const Network& net) {
  const std::size_t n = net.node_count();
  if (n < 2) throw InvalidArgument("density needs at least two nodes");
  return static_cast<double>(net.edge_count()) / static_cast<double>(net.max_edges());
}

/// Mean local clustering coefficient. Directed networks use their undirected
/// projection; nodes of degree < 2 contribute 0.
inline double avg_clustering(const Network& net) {
  const std::size_t n = net.node_count();
  if (n == 0) return 0.0;
  std::vector<std::vector<NodeIndex>> adj(n);
  if (net.directed()) {
    for (NodeIndex v = 0; v < n; ++v) {
      auto o = net.adjacency(v, Direction::out);
      auto i = net.adjacency(v, Direction::in);
      std::set_union(o.begin(), o.end(), i.begin(), i.end(), std::back_inserter(adj[v]));
    }
  } else {
    for (NodeIndex v = 0; v < n; ++v) {
      auto a = net.adjacency(v, Direction::undirected);
      adj[v].assign(a.begin(), a.end());
    }
  }
  double total = 0.0;
  for (NodeIndex v = 0; v < n; ++v) {
    const auto& nv = adj[v];
    const std::size_t k = nv.size();
    if (k < 2) continue;
    std::size_t links = 0;
    for (std::size_t a = 0; a < k; ++a) {
      const auto& na = adj[nv[a]];
      for (std::size_t b = a + 1; b < k; ++b) {
        if (std::binary_search(na.begin(), na.end(), nv[b])) ++links;
      }
    }
    total += static_cast<double>(links) / (static_cast<double>(k) * static_cast<double>(k - 1) / 2.0);
  }
  return total / static_cast<double>(n);
}

/// Number of edges present in both networks, matched by node names.
inline std::size_t edge_overlap(const Network& a, const Network& b) {
  if (a.directed() != b.directed()) throw InvalidArgument("edge_overlap needs networks of the same directedness");
  const Network& small = a.edge_count() <= b.edge_count() ? a : b;
  const Network& large = &small == &a ? b : a;
  std::size_t count = 0;
  for (const auto& [u, v] : small.edges()) {
    auto lu = large.find(small.name(u));
    auto lv = large.find(small.name(v));
    if (lu && lv && large.has_edge(*lu, *lv)) ++count;
  }
  return count;
}

struct NetworkStats {
  std::size_t n = 0;
  std::size_t m = 0;
  double avg_clustering = 0.0;
  double density = 0.0;
};

inline NetworkStats network_stats(const Network& net) {
  NetworkStats s;
  s.n = net.node_count();
  s.m = net.edge_count();
  s.avg_clustering = avg_clustering(net);
  s.density = s.n >= 2 ? density(net) : 0.0;
  return s;
}

/// Zero-padded node names "v0".."v{n-1}" whose lexicographic order matches numeric order.
inline std::vector<std::string> numbered_names(std::size_t n, std::string_view prefix = "v") {
  std::size_t width = 1;
  for (std::size_t x = n > 0 ? n - 1 : 0; x >= 10; x /= 10) ++width;
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string digits = std::to_string(i);
    names.push_back(std::string(prefix) + std::string(width - digits.size(), '0') + digits);
  }
  return names;
}

/// Decode a pair index in [0, max_edges) to a node pair (row-major, i < j for undirected).
inline IndexPair decode_pair_index(std::uint64_t k, std::size_t n, bool directed) {
  if (directed) {
    auto u = static_cast<NodeIndex>(k / (n - 1));
    auto r = static_cast<NodeIndex>(k % (n - 1));
    return {u, r >= u ? r + 1 : r};
  }
  // row u holds pairs (u, u+1..n-1); walk rows, n is small enough in practice
  NodeIndex u = 0;
  std::uint64_t row = n - 1;
  while (k >= row) {
    k -= row;
    ++u;
    --row;
  }
  return {u, static_cast<NodeIndex>(u + 1 + k)};
}

/// Uniform G(n, m): m distinct non-loop edges sampled without replacement.
inline Network random_graph(std::size_t n, std::size_t m, std::uint64_t seed, bool directed, std::string id = {}) {
  const std::size_t max_m = Network::max_edges_for(n, directed);
  if (m > max_m) {
    throw InvalidArgument("random_graph: m=" + std::to_string(m) + " exceeds " + std::to_string(max_m) +
                          " possible edges");
  }
  if (id.empty()) id = "er-n" + std::to_string(n) + "-m" + std::to_string(m) + "-s" + std::to_string(seed);
  Rng rng(seed);
  auto picks = rng.sample_without_replacement(max_m, m);
  std::vector<IndexPair> edges;
  edges.reserve(m);
  // picks are ascending, so rows can be decoded incrementally
  NodeIndex u = 0;
  std::uint64_t row_start = 0;
  std::uint64_t row_len = directed ? n - 1 : (n > 0 ? n - 1 : 0);
  for (auto k : picks) {
    if (directed) {
      edges.push_back(decode_pair_index(k, n, true));
      continue;
    }
    while (k >= row_start + row_len) {
      row_start += row_len;
      ++u;
      --row_len;
    }
    edges.emplace_back(u, static_cast<NodeIndex>(u + 1 + (k - row_start)));
  }
  return Network::from_index_edges(std::move(id), directed, numbered_names(n), std::move(edges));
}

}  // namespace linkassess
