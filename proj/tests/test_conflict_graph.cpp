#include "dpim/conflict_graph.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "dpim/error.hpp"
#include "test_util.hpp"

namespace dpim {
namespace {

TEST(ConflictGraphTest, CapitalCountryStar) {
  Dataset d = testing::capital_country_dataset();
  std::vector<DenialConstraint> dcs = {testing::capital_country_fd()};
  ConflictGraph g = build_conflict_graph(d, dcs);
  EXPECT_EQ(g.node_count(), 4u);
  EXPECT_EQ(g.edges(), (EdgeList{{0, 3}, {1, 3}, {2, 3}}));
}

TEST(ConflictGraphTest, ConsistentTableHasNoEdges) {
  Dataset d = remove_tuple(testing::capital_country_dataset(), 3);
  std::vector<DenialConstraint> dcs = {testing::capital_country_fd()};
  ConflictGraph g = build_conflict_graph(d, dcs);
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_EQ(g.node_count(), 3u);
}

TEST(ConflictGraphTest, EmptyConstraintSetRejected) {
  Dataset d = testing::capital_country_dataset();
  EXPECT_THROW(build_conflict_graph(d, {}), InputError);
}

TEST(ConflictGraphTest, EdgesDeduplicatedAcrossConstraints) {
  Dataset d = testing::capital_country_dataset();
  std::vector<DenialConstraint> dcs = {testing::capital_country_fd(),
                                       parse_dc("!(t.Country != t'.Country)")};
  ConflictGraph g = build_conflict_graph(d, dcs);
  EXPECT_EQ(g.edges(), (EdgeList{{0, 3}, {1, 3}, {2, 3}}));
}

// The blocked build must be set-equal to the naive all-pairs oracle.
TEST(ConflictGraphTest, BlockedBuildMatchesNaiveOracle) {
  std::mt19937_64 gen(23);
  const char* constraint_pool[] = {
      "!(t.A = t'.A & t.B != t'.B)",
      "!(t.B = t'.B & t.C != t'.C)",
      "!(t.A = t'.A & t.B = t'.B & t.C != t'.C)",
      "!(t.A != t'.A & t.B != t'.B & t.C != t'.C)",  // no equality: all-pairs path
      "!(t.A = \"v0\" & t.B != t'.B)",
  };
  for (int round = 0; round < 30; ++round) {
    std::size_t n = 20 + gen() % 181;  // up to ~200 rows
    Dataset d = testing::random_categorical_dataset(gen, n, 3, 4);
    std::vector<DenialConstraint> dcs;
    for (int k = 0; k < 2; ++k) {
      dcs.push_back(parse_dc(constraint_pool[gen() % std::size(constraint_pool)]));
    }
    ConflictGraph blocked = build_conflict_graph(d, dcs);
    ConflictGraph naive = testing::naive_conflict_graph(d, dcs);
    EXPECT_EQ(blocked.edges(), naive.edges()) << "round " << round;
  }
}

TEST(ConflictGraphTest, ParallelBuildMatchesSequential) {
  std::mt19937_64 gen(29);
  Dataset d = testing::random_categorical_dataset(gen, 300, 3, 6);
  std::vector<DenialConstraint> dcs = {parse_dc("!(t.A != t'.A & t.B != t'.B)")};
  BuildOptions sequential;
  sequential.threads = 1;
  BuildOptions parallel;
  parallel.threads = 8;
  EXPECT_EQ(build_conflict_graph(d, dcs, sequential).edges(),
            build_conflict_graph(d, dcs, parallel).edges());
}

TEST(StableEdgeOrderTest, LexicographicOnToyGraphs) {
  Dataset d = testing::capital_country_dataset();
  std::vector<DenialConstraint> dcs = {testing::capital_country_fd()};
  ConflictGraph star = build_conflict_graph(d, dcs);
  EXPECT_EQ(stable_edge_order(star).edges, (EdgeList{{0, 3}, {1, 3}, {2, 3}}));

  ConflictGraph seven = testing::seven_node_graph();
  EXPECT_EQ(stable_edge_order(seven).edges,
            (EdgeList{{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}}));

  ConflictGraph empty({0, 1, 2}, {});
  EXPECT_TRUE(stable_edge_order(empty).edges.empty());
}

// Removing a node must keep the relative order of all surviving edges.
TEST(StableEdgeOrderTest, OrderStableUnderNodeRemoval) {
  std::mt19937_64 gen(31);
  for (int round = 0; round < 100; ++round) {
    std::size_t n = 5 + gen() % 40;
    ConflictGraph g = testing::random_graph(gen, n, 0.2);
    TupleId victim = gen() % n;
    ConflictGraph h = remove_node(g, victim);

    auto full = stable_edge_order(g).edges;
    auto reduced = stable_edge_order(h).edges;
    // reduced must be exactly the subsequence of full avoiding the victim.
    EdgeList expected;
    for (const auto& e : full) {
      if (e.first != victim && e.second != victim) expected.push_back(e);
    }
    EXPECT_EQ(reduced, expected) << "round " << round;
  }
}

TEST(StableEdgeOrderTest, RemovingNodeDropsExactlyItsDegree) {
  std::mt19937_64 gen(37);
  for (int round = 0; round < 50; ++round) {
    ConflictGraph g = testing::random_graph(gen, 30, 0.15);
    TupleId victim = gen() % 30;
    std::size_t degree = g.adjacency()[g.index_of(victim)].size();
    ConflictGraph h = remove_node(g, victim);
    EXPECT_EQ(h.edge_count(), g.edge_count() - degree);
  }
}

TEST(GraphStatsTest, CountsOnToyGraphs) {
  Dataset d = testing::capital_country_dataset();
  std::vector<DenialConstraint> dcs = {testing::capital_country_fd()};
  ConflictGraph star = build_conflict_graph(d, dcs);
  EXPECT_EQ(f_edge_count(star), 3u);
  EXPECT_EQ(f_positive_degree_count(star), 4u);
  EXPECT_EQ(max_degree(star), 3u);

  ConflictGraph empty({0, 1, 2}, {});
  EXPECT_EQ(f_edge_count(empty), 0u);
  EXPECT_EQ(f_positive_degree_count(empty), 0u);
  EXPECT_EQ(max_degree(empty), 0u);

  // Complete graph on 5 nodes.
  EdgeList k5;
  for (TupleId i = 0; i < 5; ++i) {
    for (TupleId j = i + 1; j < 5; ++j) k5.emplace_back(i, j);
  }
  ConflictGraph complete({0, 1, 2, 3, 4}, std::move(k5));
  EXPECT_EQ(f_edge_count(complete), 10u);
  EXPECT_EQ(max_degree(complete), 4u);

  // One isolated node plus one edge.
  ConflictGraph partial({0, 1, 2}, {{0, 2}});
  EXPECT_EQ(f_positive_degree_count(partial), 2u);
  EXPECT_EQ(max_degree(partial), 1u);

  // Path on 3 nodes.
  ConflictGraph path({0, 1, 2}, {{0, 1}, {1, 2}});
  EXPECT_EQ(max_degree(path), 2u);
}

TEST(GraphCacheTest, SaveLoadreproducesStableOrder) {
  std::mt19937_64 gen(41);
  ConflictGraph g = testing::random_graph(gen, 50, 0.1);
  auto path = std::filesystem::temp_directory_path() / "dpim_graph_cache_test.txt";
  save_graph_cache(g, path);
  ConflictGraph loaded = load_graph_cache(path);
  EXPECT_EQ(loaded.node_count(), g.node_count());
  EXPECT_EQ(stable_edge_order(loaded).edges, stable_edge_order(g).edges);
  std::filesystem::remove(path);
}

TEST(GraphCacheTest, RejectsMalformedCache) {
  auto dir = std::filesystem::temp_directory_path();
  auto bad_header = dir / "dpim_cache_bad1.txt";
  {
    std::ofstream out(bad_header);
    out << "vertices=3\n";
  }
  EXPECT_THROW(load_graph_cache(bad_header), InputError);
  std::filesystem::remove(bad_header);

  auto out_of_range = dir / "dpim_cache_bad2.txt";
  {
    std::ofstream out(out_of_range);
    out << "nodes=2\n0 5\n";
  }
  EXPECT_THROW(load_graph_cache(out_of_range), InputError);
  std::filesystem::remove(out_of_range);
}

TEST(ConflictGraphTest, RejectsSelfLoopAndNormalizesEdges) {
  EXPECT_THROW(ConflictGraph({0, 1}, {{0, 0}}), InputError);
  ConflictGraph g({0, 1, 2}, {{2, 0}, {1, 0}, {2, 0}});
  EXPECT_EQ(g.edges(), (EdgeList{{0, 1}, {0, 2}}));
}

}  // namespace
}  // namespace dpim
