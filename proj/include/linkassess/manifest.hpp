#pragma once

// Dataset manifests, dataset summaries and the run ledger.
//
// Manifest format: one "key = value" per line, '#' starts a comment.
//   name    = <dataset name>
//   sn      = <id> <edge-list path> [directed|undirected]
//   network = <id> <edge-list path> [directed|undirected]     (repeatable)
//   model.kind = <model kind>       model.<hyperparameter> = <value>
//   kfold   = <k>                   seed = <integer>
// Relative paths resolve against the manifest's directory.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "linkassess/classifiers.hpp"
#include "linkassess/dataset.hpp"
#include "linkassess/error.hpp"
#include "linkassess/graph.hpp"
#include "linkassess/random.hpp"
#include "linkassess/text.hpp"

namespace linkassess {

struct NetworkDescriptor {
  std::string id;
  std::string path;  // as resolved against the manifest directory
  bool directed = false;
};

struct DatasetManifest {
  std::string name;
  NetworkDescriptor sn;
  std::vector<NetworkDescriptor> exogenous;
  std::optional<ModelSpec> default_model;
  std::size_t kfold_k = 10;
  std::optional<std::uint64_t> seed;
  Dataset data;
};

namespace detail {

inline NetworkDescriptor parse_descriptor(std::string_view value, const std::filesystem::path& base,
                                          std::size_t line) {
  auto tokens = text::tokenize(value, " \t");
  if (tokens.size() < 2 || tokens.size() > 3) {
    throw ParseError("network entry needs '<id> <path> [directed|undirected]'", line);
  }
  NetworkDescriptor d;
  d.id = std::string(tokens[0]);
  std::filesystem::path p{std::string(tokens[1])};
  d.path = (p.is_absolute() ? p : base / p).lexically_normal().string();
  if (tokens.size() == 3) {
    if (tokens[2] == "directed") {
      d.directed = true;
    } else if (tokens[2] != "undirected") {
      throw ParseError("directedness must be 'directed' or 'undirected'", line);
    }
  }
  return d;
}

}  // namespace detail

/// Parse manifest text without touching edge-list files.
inline DatasetManifest parse_manifest(std::istream& in, const std::filesystem::path& base) {
  DatasetManifest m;
  bool have_sn = false;
  std::optional<ModelKind> kind;
  std::map<std::string, std::string> hp;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = text::trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", lineno);
    auto key = text::trim(s.substr(0, eq));
    auto value = text::trim(s.substr(eq + 1));
    if (key == "name") {
      m.name = std::string(value);
    } else if (key == "sn") {
      if (have_sn) throw ParseError("manifest designates more than one social network", lineno);
      m.sn = detail::parse_descriptor(value, base, lineno);
      have_sn = true;
    } else if (key == "network") {
      m.exogenous.push_back(detail::parse_descriptor(value, base, lineno));
    } else if (key == "kfold") {
      auto k = text::parse_int(value, lineno);
      if (k < 2) throw ParseError("kfold must be at least 2", lineno);
      m.kfold_k = static_cast<std::size_t>(k);
    } else if (key == "seed") {
      auto v = text::parse_int(value, lineno);
      if (v < 0) throw ParseError("seed must be non-negative", lineno);
      m.seed = static_cast<std::uint64_t>(v);
    } else if (key == "model.kind") {
      kind = parse_model_kind(value);
    } else if (key.starts_with("model.")) {
      hp[std::string(key.substr(6))] = std::string(value);
    } else {
      throw ParseError("unknown manifest key '" + std::string(key) + "'", lineno);
    }
  }
  if (!have_sn) throw ParseError("manifest has no 'sn' entry", 0);
  if (!hp.empty() && !kind) throw ParseError("model hyperparameters given without model.kind", 0);
  if (kind) {
    m.default_model = ModelSpec(*kind, std::move(hp));
    m.default_model->validate();
  }
  std::vector<std::string> ids = {m.sn.id};
  for (const auto& d : m.exogenous) {
    if (std::find(ids.begin(), ids.end(), d.id) != ids.end()) throw ParseError("duplicate network id '" + d.id + "'", 0);
    if (d.directed != m.sn.directed) {
      throw ParseError("network '" + d.id + "' differs in directedness from the social network", 0);
    }
    ids.push_back(d.id);
  }
  if (m.name.empty()) m.name = m.sn.id;
  return m;
}

/// Parse the manifest and load every referenced edge list.
inline DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest '" + path + "'");
  auto base = std::filesystem::path(path).parent_path();
  DatasetManifest m = parse_manifest(in, base);
  m.data.name = m.name;
  m.data.sn = load_edge_list(m.sn.path, m.sn.directed, m.sn.id);
  for (const auto& d : m.exogenous) m.data.exogenous.push_back(load_edge_list(d.path, d.directed, d.id));
  m.data.validate();
  return m;
}

struct SummaryRow {
  std::string id;
  bool is_sn = false;
  NetworkStats stats;
  std::size_t overlap_with_sn = 0;
};

/// One row per network, SN first.
inline std::vector<SummaryRow> summarize(const Dataset& data) {
  std::vector<SummaryRow> rows;
  rows.push_back({data.sn.id(), true, network_stats(data.sn), data.sn.edge_count()});
  for (const auto& net : data.exogenous) rows.push_back({net.id(), false, network_stats(net), edge_overlap(net, data.sn)});
  return rows;
}

inline void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "network\trole\tn\tm\tavg_clustering\tdensity\toverlap_with_sn\n";
  for (const auto& r : rows) {
    out << r.id << '\t' << (r.is_sn ? "sn" : "exogenous") << '\t' << r.stats.n << '\t' << r.stats.m << '\t'
        << text::format_double(r.stats.avg_clustering) << '\t' << text::format_double(r.stats.density) << '\t'
        << r.overlap_with_sn << '\n';
  }
}

/// Space-aligned table with 3-decimal reals.
inline void write_summary_table(std::ostream& out, const std::vector<SummaryRow>& rows) {
  std::size_t w = 7;
  for (const auto& r : rows) w = std::max(w, r.id.size());
  auto pad = [](std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
  };
  out << pad("network", w) << "  " << pad("n", 6) << pad("m", 8) << pad("cc", 8) << pad("density", 9) << "overlap\n";
  for (const auto& r : rows) {
    out << pad(r.id, w) << "  " << pad(std::to_string(r.stats.n), 6) << pad(std::to_string(r.stats.m), 8)
        << pad(text::format_fixed3(r.stats.avg_clustering), 8) << pad(text::format_fixed3(r.stats.density), 9)
        << r.overlap_with_sn << '\n';
  }
}

/// Hex FNV-1a of a canonical plan description.
inline std::string plan_hash(std::string_view canonical) {
  static constexpr char digits[] = "0123456789abcdef";
  std::uint64_t h = fnv1a(canonical);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

/// Tab-separated table keyed by (plan hash, seed): re-running a plan replaces
/// its row, so the file depends only on the set of plans run.
class RunLedger {
 public:
  static constexpr std::string_view kHeader = "plan_hash\tseed\tcommand";

  explicit RunLedger(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line.starts_with("plan_hash\t")) continue;
      auto cols = text::split(line, '\t');
      if (cols.size() < 3) throw ParseError("run ledger row needs at least three columns", lineno);
      rows_[{std::string(cols[0]), std::string(cols[1])}] = line;
    }
  }

  /// `fields` are appended after the key and command columns.
  void upsert(const std::string& hash, std::uint64_t seed, const std::string& command, const std::string& fields) {
    std::string row = hash + '\t' + std::to_string(seed) + '\t' + command;
    if (!fields.empty()) row += '\t' + fields;
    rows_[{hash, std::to_string(seed)}] = std::move(row);
  }

  std::size_t size() const noexcept { return rows_.size(); }

  void save() const {
    std::ofstream out(path_, std::ios::trunc);
    if (!out) throw Error("cannot write run ledger '" + path_.string() + "'");
    out << kHeader << "\tdetails\n";
    for (const auto& [key, row] : rows_) out << row << '\n';
  }

 private:
  std::filesystem::path path_;
  std::map<std::pair<std::string, std::string>, std::string> rows_;
};

}  // namespace linkassess
