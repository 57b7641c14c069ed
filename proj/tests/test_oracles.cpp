#include "dpim/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

#include "dpim/error.hpp"
#include "dpim/repair.hpp"
#include "test_util.hpp"

namespace dpim {
namespace {

TEST(TrueMeasureTest, CapitalCountryValues) {
  Dataset d = testing::capital_country_dataset();
  std::vector<DenialConstraint> dcs = {testing::capital_country_fd()};
  EXPECT_EQ(true_measure(d, dcs, TrueMeasureKind::Drastic), 1);
  EXPECT_EQ(true_measure(d, dcs, TrueMeasureKind::MinimalInconsistency), 3);
  EXPECT_EQ(true_measure(d, dcs, TrueMeasureKind::Problematic), 4);
  EXPECT_EQ(true_measure(d, dcs, TrueMeasureKind::RepairExact), 1);
  EXPECT_EQ(true_measure(d, dcs, TrueMeasureKind::RepairApprox), 2);
}

TEST(TrueMeasureTest, ConsistentDatasetIsAllZero) {
  Dataset d = remove_tuple(testing::capital_country_dataset(), 3);
  std::vector<DenialConstraint> dcs = {testing::capital_country_fd()};
  for (auto kind : {TrueMeasureKind::Drastic, TrueMeasureKind::MinimalInconsistency,
                    TrueMeasureKind::Problematic, TrueMeasureKind::RepairApprox,
                    TrueMeasureKind::RepairExact}) {
    EXPECT_EQ(true_measure(d, dcs, kind), 0);
  }
}

TEST(TrueMeasureTest, GraphStatisticsShareTheGraphCodePath) {
  std::mt19937_64 gen(91);
  ConflictGraph g = testing::random_graph(gen, 40, 0.1);
  EXPECT_EQ(true_measure_on_graph(g, TrueMeasureKind::MinimalInconsistency),
            static_cast<std::int64_t>(f_edge_count(g)));
  EXPECT_EQ(true_measure_on_graph(g, TrueMeasureKind::Problematic),
            static_cast<std::int64_t>(f_positive_degree_count(g)));
  EXPECT_EQ(true_measure_on_graph(g, TrueMeasureKind::RepairApprox),
            vertex_cover_size(g, stable_edge_order(g)).cover_size);
}

TEST(ExactCoverTest, MatchesExhaustiveEnumeration) {
  std::mt19937_64 gen(93);
  for (int round = 0; round < 100; ++round) {
    std::size_t n = 3 + gen() % 16;  // up to 18 nodes
    double density = 0.1 + 0.4 * (gen() % 100) / 100.0;
    ConflictGraph g = testing::random_graph(gen, n, density);
    EXPECT_EQ(exact_min_vertex_cover(g), testing::exhaustive_min_vertex_cover(g))
        << "round " << round;
  }
}

TEST(ExactCoverTest, ApproxSandwichedByExact) {
  std::mt19937_64 gen(97);
  for (int round = 0; round < 60; ++round) {
    ConflictGraph g = testing::random_graph(gen, 14, 0.3);
    std::int64_t exact = true_measure_on_graph(g, TrueMeasureKind::RepairExact);
    std::int64_t approx = true_measure_on_graph(g, TrueMeasureKind::RepairApprox);
    EXPECT_LE(exact, approx);
    EXPECT_LE(approx, 2 * exact);
  }
}

TEST(ExactCoverTest, GuardRejectsLargeGraphs) {
  std::mt19937_64 gen(101);
  ConflictGraph g = testing::random_graph(gen, 40, 0.5);
  ASSERT_GT(f_positive_degree_count(g), 30u);
  try {
    exact_min_vertex_cover(g);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("r-approx"), std::string::npos);
  }
  // Isolated nodes do not count against the guard.
  ConflictGraph sparse({0, 1, 2, 3, 4, 5}, {{0, 1}});
  EXPECT_EQ(exact_min_vertex_cover(sparse, 2), 1);
}

TEST(RelativeErrorTest, BasicQuotients) {
  ErrorValue e = relative_error(100, 110.0);
  EXPECT_FALSE(e.is_absolute);
  EXPECT_NEAR(e.value, 0.10, 1e-12);

  ErrorValue zero = relative_error(3, 3.0);
  EXPECT_EQ(zero.value, 0.0);

  // Large-noise/small-truth regimes are representable (errors far above 1).
  ErrorValue big = relative_error(2, 250.0);
  EXPECT_NEAR(big.value, 124.0, 1e-12);
}

TEST(RelativeErrorTest, ZeroTruthFallsBackToAbsolute) {
  ErrorValue e = relative_error(0, -7.5);
  EXPECT_TRUE(e.is_absolute);
  EXPECT_NEAR(e.value, 7.5, 1e-12);
}

}  // namespace
}  // namespace dpim
