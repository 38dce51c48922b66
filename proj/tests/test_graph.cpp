#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "linkassess/graph.hpp"
#include "linkassess/random.hpp"
#include "oracles.hpp"

using namespace linkassess;
using fixtures::from_text;
using fixtures::make;

TEST(EdgeList, ReadsTwoEdgesOverThreeNodes) {
  auto g = from_text("a b\nb c");
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 2u);
}

TEST(EdgeList, DropsSelfLoopsAndCollapsesReversedDuplicates) {
  EdgeListDiagnostics diag;
  auto g = from_text("a b\nb a\na a", false, "g", &diag);
  EXPECT_EQ(g.node_count(), 2u);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(diag.self_loops_dropped, 1u);
  EXPECT_EQ(diag.duplicates_collapsed, 1u);
}

TEST(EdgeList, DirectedKeepsBothDirections) {
  auto g = from_text("a b\nb a", true);
  EXPECT_EQ(g.node_count(), 2u);
  EXPECT_EQ(g.edge_count(), 2u);
}

TEST(EdgeList, AcceptsCommasCommentsAndBlankLines) {
  auto g = from_text("# header\n\na,b\n  c\td  \nb, c\n");
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_TRUE(g.has_edge(g.index_of("c"), g.index_of("d")));
}

TEST(EdgeList, MalformedLineReportsLineNumber) {
  try {
    from_text("a b\nc\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(from_text("a b c\n"), ParseError);
}

TEST(EdgeList, EmptyInputIsAnError) {
  EXPECT_THROW(from_text(""), ParseError);
  EXPECT_THROW(from_text("# nothing\n"), ParseError);
  EXPECT_THROW(from_text("a a\n"), ParseError);
}

TEST(EdgeList, LineOrderDoesNotMatter) {
  EXPECT_EQ(from_text("a b\nb c\nc d"), from_text("c d\nb c\nb a"));
}

TEST(EdgeList, WriteThenReadRoundTrips) {
  auto g = random_graph(25, 60, 3, true, "r");
  std::stringstream s;
  write_edge_list(s, g);
  EXPECT_EQ(read_edge_list(s, true, "r"), g);
}

TEST(EdgeList, MissingFileIsAnError) { EXPECT_THROW(load_edge_list("/nonexistent/x.txt", false, "x"), Error); }

TEST(Neighbors, PathMiddle) {
  auto g = fixtures::p3();
  EXPECT_EQ(neighbors(g, "b", Direction::undirected), (std::vector<std::string>{"a", "c"}));
}

TEST(Neighbors, DirectedInNeighbourhoods) {
  auto g = fixtures::directed_triad();
  EXPECT_EQ(neighbors(g, "b", Direction::in), (std::vector<std::string>{"a", "c"}));
  EXPECT_TRUE(neighbors(g, "a", Direction::in).empty());
  EXPECT_EQ(neighbors(g, "a", Direction::out), (std::vector<std::string>{"b", "c"}));
}

TEST(Neighbors, ErrorsOnUnknownNodeOrWrongDirection) {
  auto g = fixtures::p3();
  EXPECT_THROW(neighbors(g, "zz", Direction::undirected), InvalidArgument);
  EXPECT_THROW(neighbors(g, "a", Direction::in), InvalidArgument);
  EXPECT_THROW(neighbors(fixtures::directed_triad(), "a", Direction::undirected), InvalidArgument);
}

TEST(Density, Examples) {
  EXPECT_DOUBLE_EQ(density(fixtures::k4()), 1.0);
  EXPECT_DOUBLE_EQ(density(fixtures::p3()), 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(density(make({{"a", "b"}}, true)), 0.5);
}

TEST(Density, NeedsTwoNodes) {
  Network single = Network::from_index_edges("s", false, {"a"}, {});
  EXPECT_THROW(density(single), InvalidArgument);
}

TEST(Clustering, Examples) {
  EXPECT_DOUBLE_EQ(avg_clustering(fixtures::k4()), 1.0);
  EXPECT_DOUBLE_EQ(avg_clustering(fixtures::p3()), 0.0);
  auto tp = make({{"a", "b"}, {"b", "c"}, {"a", "c"}, {"c", "d"}});
  EXPECT_NEAR(avg_clustering(tp), (1.0 + 1.0 + 1.0 / 3.0 + 0.0) / 4.0, 1e-15);
  EXPECT_DOUBLE_EQ(avg_clustering(Network{}), 0.0);
}

TEST(Clustering, MatchesNeighbourPairCountOracle) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const bool directed = s % 2 == 1;
    auto g = random_graph(5 + s % 20, 2 * (5 + s % 20), s, directed);
    EXPECT_NEAR(avg_clustering(g), oracle::avg_clustering(g), 1e-12) << "seed " << s;
  }
}

TEST(Overlap, Examples) {
  auto g = fixtures::k4();
  EXPECT_EQ(edge_overlap(g, g), g.edge_count());
  EXPECT_EQ(edge_overlap(make({{"a", "b"}}), make({{"c", "d"}})), 0u);
  EXPECT_EQ(edge_overlap(make({{"a", "b"}, {"b", "c"}}), make({{"b", "c"}, {"c", "d"}})), 1u);
  EXPECT_THROW(edge_overlap(g, fixtures::directed_triad()), InvalidArgument);
}

TEST(Overlap, UndirectedIgnoresOrientationDirectedDoesNot) {
  EXPECT_EQ(edge_overlap(make({{"a", "b"}}), make({{"b", "a"}})), 1u);
  EXPECT_EQ(edge_overlap(make({{"a", "b"}}, true), make({{"b", "a"}}, true)), 0u);
}

TEST(Overlap, SymmetricOnRandomPairs) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto a = random_graph(12, 20, s, s % 2);
    auto b = random_graph(12, 25, s + 100, s % 2);
    EXPECT_EQ(edge_overlap(a, b), edge_overlap(b, a));
    EXPECT_EQ(edge_overlap(a, a), a.edge_count());
  }
}

TEST(RandomGraph, ForcedSaturationAndEmpty) {
  for (std::uint64_t s : {1u, 2u, 99u}) EXPECT_EQ(random_graph(4, 6, s, false).edges(), random_graph(4, 6, 0, false).edges());
  EXPECT_EQ(random_graph(4, 6, 5, false).edge_count(), 6u);
  auto empty = random_graph(10, 0, 1, false);
  EXPECT_EQ(empty.node_count(), 10u);
  EXPECT_EQ(empty.edge_count(), 0u);
}

TEST(RandomGraph, DeterministicPerSeed) {
  EXPECT_EQ(random_graph(30, 80, 42, false), random_graph(30, 80, 42, false));
  EXPECT_NE(random_graph(30, 80, 42, false), random_graph(30, 80, 43, false));
}

TEST(RandomGraph, RejectsTooManyEdges) {
  EXPECT_THROW(random_graph(4, 7, 1, false), InvalidArgument);
  EXPECT_NO_THROW(random_graph(4, 12, 1, true));
  EXPECT_THROW(random_graph(4, 13, 1, true), InvalidArgument);
}

TEST(RandomGraph, DensityDependsOnlyOnSize) {
  for (std::uint64_t s = 0; s < 10; ++s) EXPECT_EQ(density(random_graph(20, 50, s, false)), 50.0 / 190.0);
}

TEST(RandomGraph, EdgeMarginalsRoughlyUniform) {
  // n=5 undirected has 10 slots; each appears with probability m/10.
  std::vector<int> hits(10, 0);
  const int reps = 4000;
  for (int s = 0; s < reps; ++s) {
    auto g = random_graph(5, 3, static_cast<std::uint64_t>(s), false);
    int slot = 0;
    for (NodeIndex u = 0; u < 5; ++u)
      for (NodeIndex v = u + 1; v < 5; ++v, ++slot) hits[static_cast<std::size_t>(slot)] += g.has_edge(u, v);
  }
  for (int h : hits) EXPECT_NEAR(h / static_cast<double>(reps), 0.3, 0.04);
}

TEST(Properties, NeighbourSymmetryAndDegreeSums) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const bool directed = s % 3 == 0;
    auto g = random_graph(15, 30 + s, s, directed);
    std::size_t sum_in = 0, sum_out = 0, sum = 0;
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
      if (directed) {
        sum_in += g.adjacency(v, Direction::in).size();
        sum_out += g.adjacency(v, Direction::out).size();
        for (NodeIndex w : g.adjacency(v, Direction::out)) {
          auto in = g.adjacency(w, Direction::in);
          EXPECT_TRUE(std::binary_search(in.begin(), in.end(), v));
        }
      } else {
        sum += g.adjacency(v, Direction::undirected).size();
        for (NodeIndex w : g.adjacency(v, Direction::undirected)) {
          auto back = g.adjacency(w, Direction::undirected);
          EXPECT_TRUE(std::binary_search(back.begin(), back.end(), v));
          EXPECT_NE(v, w);
        }
      }
    }
    if (directed) {
      EXPECT_EQ(sum_in, g.edge_count());
      EXPECT_EQ(sum_out, g.edge_count());
    } else {
      EXPECT_EQ(sum, 2 * g.edge_count());
    }
  }
}

TEST(Stats, BundlesTheFourNumbers) {
  auto s = network_stats(fixtures::k4());
  EXPECT_EQ(s.n, 4u);
  EXPECT_EQ(s.m, 6u);
  EXPECT_DOUBLE_EQ(s.avg_clustering, 1.0);
  EXPECT_DOUBLE_EQ(s.density, 1.0);
}

TEST(Rng, UniformIndexStaysInRange) {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) EXPECT_LT(rng.uniform_index(7), 7u);
  for (int i = 0; i < 1000; ++i) {
    double u = rng.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rng, SampleWithoutReplacementIsSortedAndDistinct) {
  Rng rng(11);
  for (std::size_t k : {0u, 1u, 5u, 50u, 100u}) {
    auto s = rng.sample_without_replacement(100, k);
    EXPECT_EQ(s.size(), k);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_EQ(std::set<std::uint64_t>(s.begin(), s.end()).size(), k);
    for (auto x : s) EXPECT_LT(x, 100u);
  }
  EXPECT_THROW(rng.sample_without_replacement(3, 4), InvalidArgument);
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
  EXPECT_NE(derive_seed(1, 1, 0), derive_seed(1, 0, 1));
  EXPECT_EQ(derive_seed(5, 2, 3), derive_seed(5, 2, 3));
}
