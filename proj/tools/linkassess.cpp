// Command-line experiment runner. Every output goes under --out; exit code 2
// means a usage or plan error, 1 a runtime failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "linkassess/linkassess.hpp"

namespace fs = std::filesystem;
using namespace linkassess;

namespace {

struct Common {
  std::string manifest;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string train = "aggregated";
  std::string model;
  std::vector<std::string> params;
  std::optional<std::size_t> kfold;
};

/// Raised for problems the user can fix by changing the command line.
struct UsageError : Error {
  using Error::Error;
};

void add_common(CLI::App* cmd, Common& c, bool stochastic) {
  cmd->add_option("--manifest", c.manifest, "dataset manifest")->required();
  cmd->add_option("--out", c.out, "output directory")->required();
  if (!stochastic) return;
  cmd->add_option("--seed", c.seed, "random seed (falls back to the manifest's)");
  cmd->add_option("--train", c.train, "training source: network id, aggregated or sn_self");
  cmd->add_option("--model", c.model, "model kind (falls back to the manifest's, then svm_rbf)");
  cmd->add_option("--param", c.params, "hyperparameter key=value (repeatable)");
  cmd->add_option("--kfold", c.kfold, "folds for sn_self")->check(CLI::Range(2, 1000));
}

fs::path out_dir(const Common& c) {
  fs::path dir(c.out);
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

std::uint64_t require_seed(const Common& c, const DatasetManifest& m) {
  if (c.seed) return *c.seed;
  if (m.seed) return *m.seed;
  throw UsageError("--seed is required (the manifest sets no default seed)");
}

ModelSpec model_spec(const std::string& kind, const Common& c, const DatasetManifest& m) {
  ModelSpec spec;
  if (!kind.empty()) {
    spec = ModelSpec(parse_model_kind(kind));
    if (m.default_model && m.default_model->kind == spec.kind) spec = *m.default_model;
  } else if (m.default_model) {
    spec = *m.default_model;
  }
  for (const auto& p : c.params) {
    auto eq = p.find('=');
    if (eq == std::string::npos) throw UsageError("--param expects key=value, got '" + p + "'");
    spec.set(p.substr(0, eq), p.substr(eq + 1));
  }
  spec.validate();
  return spec;
}

AssessmentPlan make_plan(const Common& c, const DatasetManifest& m, const std::string& kind) {
  AssessmentPlan plan;
  plan.train = TrainSource::parse(c.train);
  plan.model = model_spec(kind, c, m);
  plan.kfold_k = c.kfold.value_or(m.kfold_k);
  plan.seed = require_seed(c, m);
  return plan;
}

std::string canonical(const std::string& command, const DatasetManifest& m, const AssessmentPlan& plan,
                      const std::string& extra = {}) {
  std::string s = command + '|' + m.name + '|' + plan.train.label() + '|' + plan.model.describe() + '|' +
                  std::to_string(plan.kfold_k);
  return extra.empty() ? s : s + '|' + extra;
}

void record(const fs::path& dir, const std::string& command, const DatasetManifest& m, const AssessmentPlan& plan,
            const std::string& fields, const std::string& extra = {}) {
  RunLedger ledger(dir / "ledger.tsv");
  ledger.upsert(plan_hash(canonical(command, m, plan, extra)), plan.seed, command, fields);
  ledger.save();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto tok : text::split(s, ',')) {
    auto t = text::trim(tok);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

void cmd_summarize(const Common& c) {
  auto m = load_manifest(c.manifest);
  auto dir = out_dir(c);
  auto rows = summarize(m.data);
  auto tsv = open_out(dir / "summary.tsv");
  write_summary(tsv, rows);
  auto txt = open_out(dir / "summary.txt");
  write_summary_table(txt, rows);
  write_summary_table(std::cout, rows);
}

void cmd_fdm(const Common& c, const std::string& network, bool global) {
  auto m = load_manifest(c.manifest);
  auto dir = out_dir(c);
  FeatureDataModel fdm;
  if (network == "aggregated") {
    fdm = training_fdm(m.data, TrainSource::parse("aggregated"));
  } else if (network == m.data.sn.id()) {
    fdm = build_fdm(m.data.sn, global);
  } else {
    fdm = build_fdm(m.data.exogenous_network(network), global);
  }
  auto out = open_out(dir / ("fdm_" + network + ".csv"));
  write_fdm(out, fdm);
  auto corr = feature_correlation_matrix(fdm);
  auto cf = open_out(dir / ("correlation_" + network + ".tsv"));
  cf << "feature";
  for (const auto& n : corr.names) cf << '\t' << n;
  cf << '\n';
  for (std::size_t i = 0; i < corr.names.size(); ++i) {
    cf << corr.names[i];
    for (std::size_t j = 0; j < corr.names.size(); ++j) cf << '\t' << text::format_double(corr.at(i, j));
    cf << '\n';
  }
  std::cout << fdm.size() << " instances, " << fdm.positives() << " positive\n";
}

/// Probability over a steps x steps grid of two features, others held at
/// their training means.
void write_grid(const fs::path& path, const Dataset& data, const AssessmentPlan& plan, const std::string& features,
                std::size_t steps) {
  auto names = split_list(features);
  if (names.size() != 2) throw UsageError("--grid expects two comma-separated feature names");
  auto train = plan.train.kind == TrainSource::Kind::sn_self ? build_fdm(data.sn, false) : training_fdm(data, plan.train);
  auto cols = train.schema.column_names();
  std::size_t idx[2];
  for (int a = 0; a < 2; ++a) {
    auto it = std::find(cols.begin(), cols.end(), names[static_cast<std::size_t>(a)]);
    if (it == cols.end()) throw UsageError("unknown feature '" + names[static_cast<std::size_t>(a)] + "'");
    idx[a] = static_cast<std::size_t>(it - cols.begin());
  }
  auto model = fit(seeded_spec(plan.model, plan.seed), train);
  auto test = build_fdm(data.sn, train.schema.includes_global);
  Samples ts = to_samples(test);
  double lo[2], hi[2];
  for (int a = 0; a < 2; ++a) {
    lo[a] = hi[a] = ts.row(0)[idx[a]];
    for (std::size_t r = 0; r < ts.size(); ++r) {
      lo[a] = std::min(lo[a], ts.row(r)[idx[a]]);
      hi[a] = std::max(hi[a], ts.row(r)[idx[a]]);
    }
  }
  auto out = open_out(path);
  out << names[0] << '\t' << names[1] << "\tprobability\n";
  std::vector<double> x = model.standardizer().mean;
  for (std::size_t i = 0; i < steps; ++i) {
    x[idx[0]] = lo[0] + (hi[0] - lo[0]) * static_cast<double>(i) / static_cast<double>(steps - 1);
    for (std::size_t j = 0; j < steps; ++j) {
      x[idx[1]] = lo[1] + (hi[1] - lo[1]) * static_cast<double>(j) / static_cast<double>(steps - 1);
      out << text::format_double(x[idx[0]]) << '\t' << text::format_double(x[idx[1]]) << '\t'
          << text::format_double(model.predict_probability(x)) << '\n';
    }
  }
}

void cmd_assess(const Common& c, const std::string& grid, std::size_t grid_steps) {
  auto m = load_manifest(c.manifest);
  auto plan = make_plan(c, m, c.model);
  auto dir = out_dir(c);
  auto outcome = assess(m.data, plan);
  auto rf = open_out(dir / "report.txt");
  write_report(rf, outcome.report);
  if (outcome.report.auc) {
    auto roc = open_out(dir / "roc.tsv");
    write_roc(roc, roc_auc(outcome.scores, outcome.truth));
  }
  if (!grid.empty()) write_grid(dir / "grid.tsv", m.data, plan, grid, grid_steps);
  record(dir, "assess", m, plan, report_table_row(outcome.report));
  std::cout << report_table_header() << '\n' << report_table_row(outcome.report) << '\n';
}

void cmd_compare(const Common& c, const std::string& models) {
  auto m = load_manifest(c.manifest);
  auto kinds = split_list(models);
  if (kinds.empty()) throw UsageError("--models needs at least one model kind");
  auto dir = out_dir(c);
  auto tsv = open_out(dir / "compare.tsv");
  auto txt = open_out(dir / "compare.txt");
  tsv << report_table_header() << '\n';
  txt << "model                 ACC    P      R      F      AUC\n";
  for (const auto& kind : kinds) {
    auto plan = make_plan(c, m, kind);
    auto rep = run_assessment(m.data, plan);
    tsv << report_table_row(rep) << '\n';
    std::string name(to_string(plan.model.kind));
    name.resize(std::max<std::size_t>(name.size(), 20), ' ');
    txt << name << "  " << text::format_fixed3(rep.accuracy) << "  " << text::format_fixed3(rep.precision_weighted)
        << "  " << text::format_fixed3(rep.recall_weighted) << "  " << text::format_fixed3(rep.f_weighted) << "  "
        << (rep.auc ? text::format_fixed3(*rep.auc) : std::string("  na ")) << '\n';
    record(dir, "compare", m, plan, report_table_row(rep));
  }
  txt.flush();
  std::ifstream back(dir / "compare.txt");
  std::cout << back.rdbuf();
}

void cmd_rank(const Common& c) {
  auto m = load_manifest(c.manifest);
  auto plan = make_plan(c, m, c.model);
  if (plan.train.kind == TrainSource::Kind::sn_self) throw UsageError("rank trains on exogenous networks");
  auto dir = out_dir(c);
  auto train = training_fdm(m.data, plan.train);
  auto model = fit(seeded_spec(plan.model, plan.seed), train);
  auto sn_fdm = build_fdm(m.data.sn, train.schema.includes_global);
  auto ranking = rank_ties(model, sn_fdm);
  auto best = best_ranker(sn_fdm);
  auto rf = open_out(dir / "ranking.tsv");
  write_ranking(rf, ranking);
  auto bf = open_out(dir / "best_ranker.tsv");
  write_ranking(bf, best);
  auto ef = open_out(dir / "rank_error.txt");
  ef << "model = " << ranking.model << "\nerror_total = " << text::format_double(ranking.error_total)
     << "\nerror_normalized = " << text::format_double(ranking.error_normalized)
     << "\nerror_percent = " << text::format_fixed3(100.0 * ranking.error_normalized) << '\n';
  record(dir, "rank", m, plan,
         plan.train.label() + '\t' + ranking.model + '\t' + text::format_double(ranking.error_normalized));
  std::cout << "ranking error " << text::format_fixed3(100.0 * ranking.error_normalized) << "%\n";
}

void cmd_noise(const Common& c, const std::string& rs, std::size_t runs, const std::string& basis) {
  auto m = load_manifest(c.manifest);
  auto base = make_plan(c, m, c.model);
  NoisePlan plan;
  for (const auto& r : split_list(rs)) plan.r_values.push_back(text::parse_double(r));
  plan.runs_per_r = runs;
  plan.train = base.train;
  plan.model = base.model;
  plan.seed = base.seed;
  plan.basis = parse_feature_basis(basis);
  auto dir = out_dir(c);
  auto summary = run_noise_experiment(m.data, plan);
  auto nf = open_out(dir / "noise.tsv");
  write_noise_summary(nf, summary);
  record(dir, "noise", m, base, plan.train.label() + '\t' + text::format_double(summary.grand_mean),
         rs + '|' + std::to_string(runs) + '|' + basis);
  std::cout << "grand mean success rate " << text::format_fixed3(summary.grand_mean) << '\n';
}

void cmd_nullmodel(const Common& c, std::size_t replicates) {
  auto m = load_manifest(c.manifest);
  auto plan = make_plan(c, m, c.model);
  auto dir = out_dir(c);
  auto res = run_null_model(m.data, plan, replicates);
  auto out = open_out(dir / "nullmodel.tsv");
  out << report_table_header() << '\n';
  for (const auto& r : res.replicates) out << report_table_row(r) << '\n';
  auto txt = open_out(dir / "nullmodel_summary.txt");
  auto line = [&](const char* k, const MetricSummary& s) {
    txt << k << " = " << text::format_double(s.mean) << " +- " << text::format_double(s.sd) << '\n';
  };
  line("accuracy", res.accuracy);
  line("precision_weighted", res.precision);
  line("recall_weighted", res.recall);
  line("f_weighted", res.f);
  line("auc", res.auc);
  record(dir, "nullmodel", m, plan, text::format_double(res.f.mean) + '\t' + text::format_double(res.auc.mean),
         std::to_string(replicates));
  std::cout << "null model F " << text::format_fixed3(res.f.mean) << " AUC " << text::format_fixed3(res.auc.mean)
            << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Link assessment of social networks from exogenous interaction networks"};
  app.require_subcommand(1);
  Common c;

  auto* summarize_cmd = app.add_subcommand("summarize", "per-network statistics and overlap with the SN");
  add_common(summarize_cmd, c, false);

  std::string network;
  bool global = false;
  auto* fdm_cmd = app.add_subcommand("fdm", "export a network's feature data model");
  add_common(fdm_cmd, c, false);
  fdm_cmd->add_option("--network", network, "network id or 'aggregated'")->required();
  fdm_cmd->add_flag("--global", global, "append the density column");

  std::string grid;
  std::size_t grid_steps = 50;
  std::optional<double> threshold;
  auto* assess_cmd = app.add_subcommand("assess", "train, classify the SN's pairs and report");
  add_common(assess_cmd, c, true);
  assess_cmd->add_option("--grid", grid, "export a probability grid over two features, e.g. CN,JI");
  assess_cmd->add_option("--grid-steps", grid_steps, "grid resolution per axis")->check(CLI::Range(2, 1000));
  assess_cmd->add_option("--threshold", threshold, "decision threshold on the probability");

  std::string models = "kn,svm,dt,nb,lr";
  auto* compare_cmd = app.add_subcommand("compare", "one report row per classifier");
  add_common(compare_cmd, c, true);
  compare_cmd->add_option("--models", models, "comma-separated model kinds");

  auto* rank_cmd = app.add_subcommand("rank", "tie-strength ranking of the SN's pairs");
  add_common(rank_cmd, c, true);

  std::string rs = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
  std::size_t runs = 10;
  std::string basis = "disguised";
  auto* noise_cmd = app.add_subcommand("noise", "inject non-edges into the SN and measure detection");
  add_common(noise_cmd, c, true);
  noise_cmd->add_option("--r", rs, "comma-separated injection ratios in (0, 1]");
  noise_cmd->add_option("--runs", runs, "runs per ratio")->check(CLI::PositiveNumber);
  noise_cmd->add_option("--basis", basis, "network the injected pairs' features come from: disguised or original");

  std::size_t replicates = 10;
  auto* null_cmd = app.add_subcommand("nullmodel", "repeat the assessment on matched random graphs");
  add_common(null_cmd, c, true);
  null_cmd->add_option("--replicates", replicates, "number of random replicates")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (threshold) c.params.push_back("threshold=" + text::format_double(*threshold));

  try {
    if (*summarize_cmd) cmd_summarize(c);
    else if (*fdm_cmd) cmd_fdm(c, network, global);
    else if (*assess_cmd) cmd_assess(c, grid, grid_steps);
    else if (*compare_cmd) cmd_compare(c, models);
    else if (*rank_cmd) cmd_rank(c);
    else if (*noise_cmd) cmd_noise(c, rs, runs, basis);
    else if (*null_cmd) cmd_nullmodel(c, replicates);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
