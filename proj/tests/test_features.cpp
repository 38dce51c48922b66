#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "linkassess/features.hpp"
#include "oracles.hpp"

using namespace linkassess;
using fixtures::make;

namespace {

constexpr double kTol = 1e-12;

double f(const Network& g, const char* v, const char* w, Measure m, Direction d = Direction::undirected) {
  return proximity(g, v, w, m, d);
}

}  // namespace

TEST(Measures, PathExamples) {
  auto g = fixtures::p3();
  EXPECT_EQ(common_neighbors(g, "a", "c"), 1.0);
  EXPECT_EQ(common_neighbors(g, "a", "b"), 0.0);
  EXPECT_DOUBLE_EQ(resource_allocation(g, "a", "c"), 0.5);
  EXPECT_NEAR(adamic_adar(g, "a", "c"), 1.0 / std::log(2.0), kTol);
  EXPECT_DOUBLE_EQ(jaccard(g, "a", "c"), 1.0);
  EXPECT_EQ(preferential_attachment(g, "a", "b"), 2.0);
  EXPECT_DOUBLE_EQ(sorensen_dice(g, "a", "c"), 1.0);
  EXPECT_DOUBLE_EQ(hub_depressed(g, "a", "c"), 1.0);
  EXPECT_EQ(car_index(g, "a", "c"), 0.0);
}

TEST(Measures, CompleteGraphExamples) {
  auto g = fixtures::k4();
  EXPECT_EQ(common_neighbors(g, "a", "b"), 2.0);
  EXPECT_NEAR(resource_allocation(g, "a", "b"), 2.0 / 3.0, kTol);
  EXPECT_NEAR(adamic_adar(g, "a", "b"), 2.0 / std::log(3.0), kTol);
  EXPECT_DOUBLE_EQ(jaccard(g, "a", "b"), 0.5);
  EXPECT_NEAR(sorensen_dice(g, "a", "b"), 4.0 / 6.0, kTol);
  EXPECT_NEAR(hub_promoted(g, "a", "b"), 2.0 / 3.0, kTol);
  EXPECT_NEAR(hub_depressed(g, "a", "b"), 2.0 / 3.0, kTol);
  EXPECT_NEAR(car_index(g, "a", "b"), 2.0 / 3.0, kTol);
}

TEST(Measures, StarExamples) {
  auto g = fixtures::star3();
  EXPECT_EQ(preferential_attachment(g, "c", "x"), 3.0);
  EXPECT_DOUBLE_EQ(hub_promoted(g, "x", "y"), 1.0);
  EXPECT_EQ(hub_depressed(g, "c", "x"), 0.0);
}

TEST(Measures, IsolatedNodesGiveZeros) {
  Network g = Network::from_index_edges("iso", false, {"a", "b", "c", "d"}, {{2, 3}});
  for (Measure m : kMeasures) EXPECT_EQ(f(g, "a", "b", m), 0.0) << short_name(m);
  for (Measure m : kMeasures) EXPECT_EQ(f(g, "a", "c", m), 0.0) << short_name(m);
  EXPECT_EQ(pair_features(g, "a", "b"), std::vector<double>(9, 0.0));
}

TEST(Measures, EmptyCommonNeighbourhoodGivesZeroSums) {
  auto g = fixtures::p3();
  for (Measure m : {Measure::resource_allocation, Measure::adamic_adar, Measure::car_index}) {
    EXPECT_EQ(f(g, "a", "b", m), 0.0);
  }
}

TEST(Measures, Errors) {
  auto g = fixtures::p3();
  EXPECT_THROW(common_neighbors(g, "a", "zz"), InvalidArgument);
  EXPECT_THROW(common_neighbors(g, "a", "a"), InvalidArgument);
  EXPECT_THROW(common_neighbors(g, "a", "c", Direction::in), InvalidArgument);
}

TEST(PairFeatures, PathVectorInSchemaOrder) {
  auto v = pair_features(fixtures::p3(), "a", "c");
  std::vector<double> want = {1, 0.5, 1.0 / std::log(2.0), 1, 1, 1, 1, 1, 0};
  ASSERT_EQ(v.size(), want.size());
  for (std::size_t k = 0; k < v.size(); ++k) EXPECT_NEAR(v[k], want[k], kTol) << k;
}

TEST(PairFeatures, DirectedInOutInterleaved) {
  auto g = fixtures::directed_triad();
  auto v = pair_features(g, "b", "c");
  ASSERT_EQ(v.size(), 18u);
  EXPECT_EQ(v[0], 1.0);  // CN_in: {a,c} and {a}
  EXPECT_EQ(v[1], 0.0);  // CN_out: {} and {b}
  EXPECT_EQ(f(g, "b", "c", Measure::common_neighbors, Direction::in), 1.0);
}

TEST(PairFeatures, DirectedZeroDegreeCommonNeighbourAddsNothing) {
  // x -> v, x -> w: x is an in-common neighbour whose own in-set is empty
  auto g = make({{"x", "v"}, {"x", "w"}}, true);
  EXPECT_EQ(f(g, "v", "w", Measure::common_neighbors, Direction::in), 1.0);
  EXPECT_EQ(f(g, "v", "w", Measure::resource_allocation, Direction::in), 0.0);
  EXPECT_EQ(f(g, "v", "w", Measure::adamic_adar, Direction::in), 0.0);
  EXPECT_EQ(f(g, "v", "w", Measure::car_index, Direction::in), 0.0);
}

TEST(PairFeatures, MatchesLiteralSetOracle) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const bool directed = s % 3 == 0;
    const std::size_t n = 4 + s % 20;
    auto g = random_graph(n, (s * 7) % (Network::max_edges_for(n, directed) + 1), s, directed);
    for (NodeIndex v = 0; v < n; ++v) {
      for (NodeIndex w = 0; w < n; ++w) {
        if (v == w) continue;
        auto got = pair_features(g, v, w);
        auto want = oracle::pair_features(g, g.name(v), g.name(w));
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t k = 0; k < got.size(); ++k) ASSERT_NEAR(got[k], want[k], kTol) << "seed " << s << " col " << k;
      }
    }
  }
}

TEST(Properties, SymmetryBoundsAndOrderRelations) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    auto g = random_graph(18, 20 + 3 * s, s, false);
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
      for (NodeIndex w = v + 1; w < g.node_count(); ++w) {
        auto a = proximity_scores(g, v, w, Direction::undirected);
        auto b = proximity_scores(g, w, v, Direction::undirected);
        for (std::size_t k = 0; k < kMeasureCount; ++k) EXPECT_EQ(a[k], b[k]);
        for (std::size_t k : {3u, 5u, 6u, 7u}) {
          EXPECT_GE(a[k], 0.0);
          EXPECT_LE(a[k], 1.0);
        }
        EXPECT_EQ(a[0], std::floor(a[0]));
        EXPECT_GE(a[1], 0.0);
        EXPECT_GE(a[2], 0.0);
        EXPECT_GE(a[8], 0.0);
        EXPECT_EQ(a[4], static_cast<double>(g.degree(v, Direction::undirected) * g.degree(w, Direction::undirected)));
        EXPECT_GE(a[5], a[3]);
        EXPECT_GE(a[6], a[7]);
        EXPECT_LE(a[1], a[0] / 2.0 + 1e-15);
      }
    }
  }
}

TEST(Fdm, PathInstancesAndLabels) {
  auto fdm = build_fdm(fixtures::p3(), false);
  ASSERT_EQ(fdm.size(), 3u);
  std::map<std::string, int> labels;
  for (const auto& i : fdm.instances) labels[i.u + i.v] = i.label;
  EXPECT_EQ(labels, (std::map<std::string, int>{{"ab", 1}, {"ac", 0}, {"bc", 1}}));
  EXPECT_EQ(fdm.schema.proximity_count(), 9u);
  EXPECT_FALSE(fdm.instances[0].global_density.has_value());
}

TEST(Fdm, DirectedTwoNodes) {
  auto fdm = build_fdm(make({{"a", "b"}}, true), false);
  ASSERT_EQ(fdm.size(), 2u);
  EXPECT_EQ(fdm.schema.proximity_count(), 18u);
  for (const auto& i : fdm.instances) EXPECT_EQ(i.label, i.u == "a" ? 1 : 0);
}

TEST(Fdm, SchemaWidths) {
  EXPECT_EQ(FeatureSchema::for_network(false, false).column_count(), 9u);
  EXPECT_EQ(FeatureSchema::for_network(false, true).column_count(), 10u);
  EXPECT_EQ(FeatureSchema::for_network(true, false).column_count(), 18u);
  EXPECT_EQ(FeatureSchema::for_network(true, true).column_count(), 19u);
  EXPECT_EQ(FeatureSchema::for_network(true, true).column_names().back(), "density");
}

TEST(Fdm, CountsAndLabelConsistencyOverSweep) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const bool directed = s % 2 == 0;
    const std::size_t n = 2 + s % 15;
    auto g = random_graph(n, s % (Network::max_edges_for(n, directed) + 1), s, directed);
    auto fdm = build_fdm(g, s % 4 == 1);
    EXPECT_EQ(fdm.size(), directed ? n * (n - 1) : n * (n - 1) / 2);
    EXPECT_EQ(fdm.positives(), g.edge_count());
    for (const auto& i : fdm.instances) {
      EXPECT_EQ(i.label == 1, g.has_edge(g.index_of(i.u), g.index_of(i.v)));
      for (double x : i.features) EXPECT_TRUE(std::isfinite(x) && x >= 0.0);
    }
  }
}

TEST(Fdm, NeedsTwoNodes) {
  EXPECT_THROW(build_fdm(Network::from_index_edges("s", false, {"a"}, {}), false), InvalidArgument);
}

TEST(Aggregated, PathPlusCompleteGraph) {
  std::vector<Network> nets = {fixtures::p3(), fixtures::k4()};
  auto agg = build_aggregated_fdm(nets);
  EXPECT_EQ(agg.size(), 9u);
  EXPECT_EQ(agg.source, "aggregated");
  EXPECT_TRUE(agg.schema.includes_global);
  for (const auto& i : agg.instances) {
    ASSERT_TRUE(i.global_density.has_value());
    EXPECT_NEAR(*i.global_density, i.source_network == "p3" ? 2.0 / 3.0 : 1.0, kTol);
  }
}

TEST(Aggregated, SingleNetworkEqualsGlobalFdm) {
  auto g = random_graph(9, 14, 2, false, "r");
  std::vector<Network> nets = {g};
  auto agg = build_aggregated_fdm(nets);
  auto one = build_fdm(g, true);
  EXPECT_EQ(agg.instances, one.instances);
  EXPECT_EQ(agg.schema, one.schema);
}

TEST(Aggregated, MixedDirectednessIsAnError) {
  std::vector<Network> nets = {fixtures::p3(), fixtures::directed_triad()};
  EXPECT_THROW(build_aggregated_fdm(nets), InvalidArgument);
  EXPECT_THROW(build_aggregated_fdm(std::span<const Network>{}), InvalidArgument);
}

TEST(Correlation, DuplicateAndNegatedColumns) {
  FeatureDataModel fdm;
  fdm.schema.feature_names = {"x", "x2", "neg", "const"};
  for (int i = 0; i < 10; ++i) {
    Instance inst;
    double x = i * i + 0.5 * i;
    inst.features = {x, x, -x, 3.0};
    fdm.instances.push_back(inst);
  }
  auto c = feature_correlation_matrix(fdm);
  EXPECT_NEAR(c.at(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(c.at(0, 2), -1.0, 1e-12);
  EXPECT_EQ(c.at(0, 3), 0.0);
  EXPECT_EQ(c.at(3, 3), 1.0);
  EXPECT_EQ(c.constant_columns, (std::vector<bool>{false, false, false, true}));
}

TEST(Correlation, JaccardDiceTighterThanPreferentialAttachmentCommonNeighbours) {
  auto fdm = build_fdm(random_graph(20, 60, 8, false), false);
  auto c = feature_correlation_matrix(fdm);
  EXPECT_GT(c.at(3, 5), c.at(4, 0));
}

TEST(Export, FdmRoundTripsExactly) {
  auto g = random_graph(12, 30, 4, true, "d");
  std::vector<Network> nets = {g, random_graph(8, 10, 5, true, "e")};
  for (const auto& fdm : {build_fdm(g, false), build_aggregated_fdm(nets)}) {
    std::stringstream s;
    write_fdm(s, fdm);
    EXPECT_EQ(read_fdm(s), fdm);
  }
}
