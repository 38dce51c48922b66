#pragma once

// Edge-proximity measures over node pairs and the feature data model (FDM):
// one labelled instance per node pair of a network.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linkassess/error.hpp"
#include "linkassess/graph.hpp"
#include "linkassess/text.hpp"

namespace linkassess {

enum class Measure {
  common_neighbors,
  resource_allocation,
  adamic_adar,
  jaccard,
  preferential_attachment,
  sorensen_dice,
  hub_promoted,
  hub_depressed,
  car_index,
};

inline constexpr std::size_t kMeasureCount = 9;

inline constexpr std::array<Measure, kMeasureCount> kMeasures = {
    Measure::common_neighbors, Measure::resource_allocation, Measure::adamic_adar,
    Measure::jaccard,          Measure::preferential_attachment, Measure::sorensen_dice,
    Measure::hub_promoted,     Measure::hub_depressed,       Measure::car_index,
};

inline std::string_view short_name(Measure m) {
  static constexpr std::array<std::string_view, kMeasureCount> names = {"CN", "RA",  "AAC", "JI", "PA",
                                                                        "SD", "HPI", "HDI", "CAR"};
  return names[static_cast<std::size_t>(m)];
}

using ProximityScores = std::array<double, kMeasureCount>;

namespace detail {

inline void check_pair(const Network& net, NodeIndex v, NodeIndex w) {
  if (v >= net.node_count() || w >= net.node_count()) throw InvalidArgument("node index out of range");
  if (v == w) throw InvalidArgument("proximity measures need two distinct nodes");
}

inline std::size_t intersection_size(std::span<const NodeIndex> a, std::span<const NodeIndex> b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

}  // namespace detail

/// All nine measures for (v, w) using neighbourhood `d`, sharing one
/// intersection pass. Degenerate denominators yield 0.
inline ProximityScores proximity_scores(const Network& net, NodeIndex v, NodeIndex w, Direction d) {
  net.check_direction(d);
  detail::check_pair(net, v, w);
  auto a = net.adjacency(v, d);
  auto b = net.adjacency(w, d);
  std::vector<NodeIndex> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));

  const double cn = static_cast<double>(common.size());
  const double da = static_cast<double>(a.size());
  const double db = static_cast<double>(b.size());
  double ra = 0.0, aac = 0.0, car = 0.0;
  for (NodeIndex z : common) {
    auto nz = net.adjacency(z, d);
    if (nz.empty()) continue;
    const double kz = static_cast<double>(nz.size());
    ra += 1.0 / kz;
    if (nz.size() > 1) aac += 1.0 / std::log(kz);
    car += static_cast<double>(detail::intersection_size(common, nz)) / kz;
  }
  const double uni = da + db - cn;

  ProximityScores s{};
  s[0] = cn;
  s[1] = ra;
  s[2] = aac;
  s[3] = uni > 0 ? cn / uni : 0.0;
  s[4] = da * db;
  s[5] = da + db > 0 ? 2.0 * cn / (da + db) : 0.0;
  s[6] = std::min(da, db) > 0 ? cn / std::min(da, db) : 0.0;
  s[7] = std::max(da, db) > 0 ? cn / std::max(da, db) : 0.0;
  s[8] = car;
  return s;
}

inline double proximity(const Network& net, std::string_view v, std::string_view w, Measure m,
                        Direction d = Direction::undirected) {
  return proximity_scores(net, net.index_of(v), net.index_of(w), d)[static_cast<std::size_t>(m)];
}

inline double common_neighbors(const Network& net, std::string_view v, std::string_view w,
                               Direction d = Direction::undirected) {
  return proximity(net, v, w, Measure::common_neighbors, d);
}
inline double resource_allocation(const Network& net, std::string_view v, std::string_view w,
                                  Direction d = Direction::undirected) {
  return proximity(net, v, w, Measure::resource_allocation, d);
}
/// Natural logarithm; common neighbours with |Λ(z)| <= 1 contribute 0.
inline double adamic_adar(const Network& net, std::string_view v, std::string_view w,
                          Direction d = Direction::undirected) {
  return proximity(net, v, w, Measure::adamic_adar, d);
}
inline double jaccard(const Network& net, std::string_view v, std::string_view w,
                      Direction d = Direction::undirected) {
  return proximity(net, v, w, Measure::jaccard, d);
}
inline double preferential_attachment(const Network& net, std::string_view v, std::string_view w,
                                      Direction d = Direction::undirected) {
  return proximity(net, v, w, Measure::preferential_attachment, d);
}
inline double sorensen_dice(const Network& net, std::string_view v, std::string_view w,
                            Direction d = Direction::undirected) {
  return proximity(net, v, w, Measure::sorensen_dice, d);
}
inline double hub_promoted(const Network& net, std::string_view v, std::string_view w,
                           Direction d = Direction::undirected) {
  return proximity(net, v, w, Measure::hub_promoted, d);
}
inline double hub_depressed(const Network& net, std::string_view v, std::string_view w,
                            Direction d = Direction::undirected) {
  return proximity(net, v, w, Measure::hub_depressed, d);
}
inline double car_index(const Network& net, std::string_view v, std::string_view w,
                        Direction d = Direction::undirected) {
  return proximity(net, v, w, Measure::car_index, d);
}

/// Column layout of an FDM.
struct FeatureSchema {
  std::vector<std::string> feature_names;  // proximity columns only
  bool directed = false;
  bool includes_global = false;

  static FeatureSchema for_network(bool directed, bool include_global) {
    FeatureSchema s;
    s.directed = directed;
    s.includes_global = include_global;
    for (Measure m : kMeasures) {
      if (directed) {
        s.feature_names.push_back(std::string(short_name(m)) + "_in");
        s.feature_names.push_back(std::string(short_name(m)) + "_out");
      } else {
        s.feature_names.emplace_back(short_name(m));
      }
    }
    return s;
  }

  std::size_t proximity_count() const noexcept { return feature_names.size(); }
  std::size_t column_count() const noexcept { return feature_names.size() + (includes_global ? 1 : 0); }

  /// Proximity names followed by "density" when the global feature is present.
  std::vector<std::string> column_names() const {
    auto cols = feature_names;
    if (includes_global) cols.emplace_back("density");
    return cols;
  }

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

struct Instance {
  std::string u;
  std::string v;
  std::vector<double> features;
  std::optional<double> global_density;
  int label = 0;
  std::string source_network;

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct FeatureDataModel {
  FeatureSchema schema;
  std::vector<Instance> instances;
  std::string source;

  std::size_t size() const noexcept { return instances.size(); }
  std::size_t positives() const {
    return static_cast<std::size_t>(
        std::count_if(instances.begin(), instances.end(), [](const Instance& i) { return i.label == 1; }));
  }

  friend bool operator==(const FeatureDataModel&, const FeatureDataModel&) = default;
};

/// Schema-ordered features of (v, w): undirected networks give the nine
/// measures; directed networks give in- then out-variant for each measure.
inline std::vector<double> pair_features(const Network& net, NodeIndex v, NodeIndex w) {
  std::vector<double> out;
  if (!net.directed()) {
    auto s = proximity_scores(net, v, w, Direction::undirected);
    out.assign(s.begin(), s.end());
    return out;
  }
  auto sin = proximity_scores(net, v, w, Direction::in);
  auto sout = proximity_scores(net, v, w, Direction::out);
  out.reserve(2 * kMeasureCount);
  for (std::size_t k = 0; k < kMeasureCount; ++k) {
    out.push_back(sin[k]);
    out.push_back(sout[k]);
  }
  return out;
}

inline std::vector<double> pair_features(const Network& net, std::string_view v, std::string_view w) {
  return pair_features(net, net.index_of(v), net.index_of(w));
}

/// Instance for one pair; label is edge presence in `net`.
inline Instance make_instance(const Network& net, NodeIndex v, NodeIndex w, std::optional<double> global) {
  Instance inst;
  inst.u = net.name(v);
  inst.v = net.name(w);
  inst.features = pair_features(net, v, w);
  inst.global_density = global;
  inst.label = net.has_edge(v, w) ? 1 : 0;
  inst.source_network = net.id();
  return inst;
}

/// One instance per unordered (undirected) or ordered (directed) node pair,
/// enumerated in ascending index order.
inline FeatureDataModel build_fdm(const Network& net, bool include_global) {
  const std::size_t n = net.node_count();
  if (n < 2) throw InvalidArgument("build_fdm needs a network with at least two nodes");
  FeatureDataModel fdm;
  fdm.schema = FeatureSchema::for_network(net.directed(), include_global);
  fdm.source = net.id();
  fdm.instances.reserve(net.max_edges());
  std::optional<double> global;
  if (include_global) global = density(net);
  for (NodeIndex v = 0; v < n; ++v) {
    for (NodeIndex w = net.directed() ? 0 : v + 1; w < n; ++w) {
      if (v == w) continue;
      fdm.instances.push_back(make_instance(net, v, w, global));
    }
  }
  return fdm;
}

/// Concatenated per-network FDMs, each instance carrying its network's density.
inline FeatureDataModel build_aggregated_fdm(std::span<const Network> nets) {
  if (nets.empty()) throw InvalidArgument("build_aggregated_fdm needs at least one network");
  const bool directed = nets.front().directed();
  for (const auto& net : nets) {
    if (net.directed() != directed) throw InvalidArgument("aggregated networks must share directedness");
  }
  FeatureDataModel agg;
  agg.schema = FeatureSchema::for_network(directed, true);
  agg.source = "aggregated";
  for (const auto& net : nets) {
    auto part = build_fdm(net, true);
    agg.instances.insert(agg.instances.end(), std::make_move_iterator(part.instances.begin()),
                         std::make_move_iterator(part.instances.end()));
  }
  return agg;
}

/// Expected instance count for `n` nodes.
inline std::size_t fdm_instance_count(std::size_t n, bool directed) { return Network::max_edges_for(n, directed); }

/// Feature row of an instance in schema column order (global last).
inline std::vector<double> feature_row(const FeatureSchema& schema, const Instance& inst) {
  std::vector<double> row = inst.features;
  if (schema.includes_global) row.push_back(inst.global_density.value_or(0.0));
  return row;
}

struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<double> values;          // row-major, names.size() squared
  std::vector<bool> constant_columns;  // columns whose correlations were set to 0

  std::size_t size() const noexcept { return names.size(); }
  double at(std::size_t i, std::size_t j) const { return values.at(i * names.size() + j); }
};

/// Pearson correlation of every pair of FDM columns. Diagonal is 1; a
/// constant column correlates 0 with everything else and is flagged.
inline CorrelationMatrix feature_correlation_matrix(const FeatureDataModel& fdm) {
  if (fdm.size() < 2) throw InvalidArgument("correlation needs at least two instances");
  const auto names = fdm.schema.column_names();
  const std::size_t d = names.size();
  const std::size_t n = fdm.size();
  std::vector<std::vector<double>> cols(d, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r) {
    auto row = feature_row(fdm.schema, fdm.instances[r]);
    for (std::size_t c = 0; c < d; ++c) cols[c][r] = row[c];
  }
  std::vector<double> sd(d);
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (double x : cols[c]) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double& x : cols[c]) {
      x -= mean;
      ss += x * x;
    }
    sd[c] = std::sqrt(ss);
  }
  CorrelationMatrix out;
  out.names = names;
  out.values.assign(d * d, 0.0);
  out.constant_columns.assign(d, false);
  for (std::size_t c = 0; c < d; ++c) out.constant_columns[c] = !(sd[c] > 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    out.values[i * d + i] = 1.0;
    for (std::size_t j = i + 1; j < d; ++j) {
      double r = 0.0;
      if (!out.constant_columns[i] && !out.constant_columns[j]) {
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) dot += cols[i][k] * cols[j][k];
        r = std::clamp(dot / (sd[i] * sd[j]), -1.0, 1.0);
      }
      out.values[i * d + j] = r;
      out.values[j * d + i] = r;
    }
  }
  return out;
}

/// Comma-separated export: a "# fdm" metadata line, a header row, then one
/// row per instance (source, u, v, schema columns, label).
inline void write_fdm(std::ostream& out, const FeatureDataModel& fdm) {
  out << "# fdm source=" << fdm.source << " directed=" << (fdm.schema.directed ? 1 : 0)
      << " global=" << (fdm.schema.includes_global ? 1 : 0) << '\n';
  out << "source,u,v";
  for (const auto& c : fdm.schema.column_names()) out << ',' << c;
  out << ",label\n";
  for (const auto& inst : fdm.instances) {
    out << inst.source_network << ',' << inst.u << ',' << inst.v;
    for (double x : feature_row(fdm.schema, inst)) out << ',' << text::format_double(x);
    out << ',' << inst.label << '\n';
  }
}

inline FeatureDataModel read_fdm(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  FeatureDataModel fdm;
  if (!std::getline(in, line)) throw ParseError("empty FDM file", 0);
  ++lineno;
  {
    auto tokens = text::tokenize(line, " ");
    if (tokens.size() != 5 || tokens[0] != "#" || tokens[1] != "fdm") throw ParseError("missing '# fdm' line", 1);
    auto value = [&](std::string_view tok, std::string_view key) {
      if (tok.substr(0, key.size() + 1) != std::string(key) + "=") throw ParseError("bad FDM metadata", 1);
      return tok.substr(key.size() + 1);
    };
    fdm.source = std::string(value(tokens[2], "source"));
    bool directed = value(tokens[3], "directed") == "1";
    bool global = value(tokens[4], "global") == "1";
    fdm.schema = FeatureSchema::for_network(directed, global);
  }
  if (!std::getline(in, line)) throw ParseError("missing FDM header", 2);
  ++lineno;
  auto header = text::split(text::trim(line), ',');
  auto cols = fdm.schema.column_names();
  if (header.size() != cols.size() + 4) throw ParseError("FDM header does not match schema", lineno);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (header[3 + c] != cols[c]) throw ParseError("unexpected FDM column '" + std::string(header[3 + c]) + "'", lineno);
  }
  while (std::getline(in, line)) {
    ++lineno;
    auto s = text::trim(line);
    if (s.empty()) continue;
    auto fields = text::split(s, ',');
    if (fields.size() != header.size()) throw ParseError("wrong number of FDM fields", lineno);
    Instance inst;
    inst.source_network = std::string(fields[0]);
    inst.u = std::string(fields[1]);
    inst.v = std::string(fields[2]);
    for (std::size_t c = 0; c < fdm.schema.proximity_count(); ++c) {
      inst.features.push_back(text::parse_double(fields[3 + c], lineno));
    }
    if (fdm.schema.includes_global) inst.global_density = text::parse_double(fields[3 + cols.size() - 1], lineno);
    inst.label = static_cast<int>(text::parse_int(fields.back(), lineno));
    if (inst.label != 0 && inst.label != 1) throw ParseError("label must be 0 or 1", lineno);
    fdm.instances.push_back(std::move(inst));
  }
  return fdm;
}

}  // namespace linkassess
