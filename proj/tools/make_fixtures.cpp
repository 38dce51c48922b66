// Writes the planted synthetic datasets (edge lists plus manifest) that ship
// under data/.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "linkassess/linkassess.hpp"

namespace fs = std::filesystem;
using namespace linkassess;

namespace {

void write_dataset(const fs::path& dir, const Dataset& data, std::uint64_t seed) {
  fs::create_directories(dir);
  const char* dirflag = data.directed() ? "directed" : "undirected";
  std::ofstream manifest(dir / "manifest.txt", std::ios::trunc);
  manifest << "# planted synthetic dataset, generator seed " << seed << "\n";
  manifest << "name = " << data.name << "\n";
  auto emit = [&](const Network& net, const char* key) {
    std::ofstream out(dir / (net.id() + ".txt"), std::ios::trunc);
    write_edge_list(out, net);
    manifest << key << " = " << net.id() << ' ' << net.id() << ".txt " << dirflag << '\n';
  };
  emit(data.sn, "sn");
  for (const auto& net : data.exogenous) emit(net, "network");
  manifest << "model.kind = svm_rbf\nkfold = 10\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate planted synthetic fixtures"};
  std::string out = "data";
  std::uint64_t seed = 2016;
  app.add_option("--out", out, "directory receiving one sub-directory per dataset");
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);
  try {
    write_dataset(fs::path(out) / "planted-rg", planted_multiplex(research_group_shape(), seed), seed);
    write_dataset(fs::path(out) / "planted-lf", planted_multiplex(law_firm_shape(), seed), seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
