#include <gtest/gtest.h>

#include <cmath>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "trajclust/modularity.hpp"

using namespace trajclust;

namespace {

Partition all_in_one(std::size_t n) {
  return Partition::from_labels(std::vector<std::int32_t>(n, 0));
}

Partition singletons(std::size_t n) {
  std::vector<std::int32_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::int32_t>(i);
  return Partition::from_labels(labels);
}

TEST(Modularity, SingleCommunityIsZero) {
  auto g = testsupport::barbell_graph();
  EXPECT_NEAR(modularity(g, all_in_one(g.node_count())), 0.0, 1e-15);
}

TEST(Modularity, SingletonPartitionIsMinusSumOfSquaredDegreeShares) {
  auto g = testsupport::barbell_graph();
  double expected = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    double a = g.degree[i] / g.two_m();
    expected -= a * a;
  }
  double got = modularity(g, singletons(g.node_count()));
  EXPECT_NEAR(got, expected, 1e-15);
  EXPECT_LT(got, 0.0);
}

TEST(Modularity, BarbellTwoTriangleSplitIsFiveFourteenthsAndOptimal) {
  auto g = testsupport::barbell_graph();
  auto p = Partition::from_labels({0, 0, 0, 1, 1, 1});
  double q = modularity(g, p);
  EXPECT_NEAR(q, 5.0 / 14.0, 1e-14);

  auto [best_q, best] = oracles::exhaustive_best_partition(g);
  EXPECT_NEAR(best_q, 5.0 / 14.0, 1e-14);
  EXPECT_EQ(best.k, 2);
  EXPECT_EQ(best.assignment, p.assignment);
}

TEST(Modularity, ZeroForEdgelessGraph) {
  auto g = SimilarityGraph::from_edges({"a", "b", "c"}, {});
  EXPECT_DOUBLE_EQ(modularity(g, singletons(3)), 0.0);
}

TEST(Modularity, RejectsMismatchedPartition) {
  auto g = testsupport::barbell_graph();
  EXPECT_THROW(modularity(g, all_in_one(4)), std::invalid_argument);
}

TEST(Modularity, MatchesDenseOracleOnRandomGraphs) {
  Rng rng(61);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + static_cast<int>(rng.next_below(49));  // up to 50 nodes
    auto g = testsupport::random_graph(n, 0.2 + 0.5 * rng.next_double(), rng);
    std::vector<std::int32_t> labels(static_cast<std::size_t>(n));
    int k = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    for (auto& l : labels) l = static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(k)));
    auto p = Partition::from_labels(labels);
    EXPECT_NEAR(modularity(g, p), oracles::dense_modularity(g, p), 1e-9);
    EXPECT_GE(modularity(g, p), -0.5 - 1e-12);
    EXPECT_LE(modularity(g, p), 1.0 + 1e-12);
  }
}

TEST(GreedyPartition, EdgelessGraphStaysSingletons) {
  auto g = SimilarityGraph::from_edges({"a", "b", "c", "d"}, {});
  auto res = greedy_partition_detailed(g);
  EXPECT_EQ(res.partition.k, 4);
  EXPECT_TRUE(res.merge_log.empty());
  EXPECT_DOUBLE_EQ(res.final_q, 0.0);
}

TEST(GreedyPartition, RecoversBarbellTriangles) {
  auto g = testsupport::barbell_graph();
  auto res = greedy_partition_detailed(g);
  EXPECT_EQ(res.partition.k, 2);
  EXPECT_NEAR(res.final_q, 5.0 / 14.0, 1e-12);
  EXPECT_NEAR(modularity(g, res.partition), 5.0 / 14.0, 1e-14);
  // the two triangles exactly
  EXPECT_EQ(res.partition.assignment[0], res.partition.assignment[1]);
  EXPECT_EQ(res.partition.assignment[0], res.partition.assignment[2]);
  EXPECT_EQ(res.partition.assignment[3], res.partition.assignment[4]);
  EXPECT_EQ(res.partition.assignment[3], res.partition.assignment[5]);
  EXPECT_NE(res.partition.assignment[0], res.partition.assignment[3]);
}

TEST(GreedyPartition, BoundedByExhaustiveMaximumOnSmallGraphs) {
  Rng rng(67);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + static_cast<int>(rng.next_below(7));  // up to 8 nodes
    auto g = testsupport::random_graph(n, 0.3 + 0.5 * rng.next_double(), rng);
    auto res = greedy_partition_detailed(g);
    auto [best_q, best] = oracles::exhaustive_best_partition(g);
    double got = modularity(g, res.partition);
    EXPECT_LE(got, best_q + 1e-9);
    double singleton_q = modularity(g, singletons(static_cast<std::size_t>(n)));
    EXPECT_GE(got + 1e-12, std::max(0.0, singleton_q));  // never worse than both baselines
  }
}

TEST(GreedyPartition, K4ReturnsNonNegativeAndBounded) {
  auto g = testsupport::complete_graph(4);
  auto res = greedy_partition_detailed(g);
  auto [best_q, best] = oracles::exhaustive_best_partition(g);
  double got = modularity(g, res.partition);
  EXPECT_LE(got, best_q + 1e-12);
  EXPECT_GE(got, 0.0);  // at least the all-in-one partition
}

TEST(GreedyPartition, EveryMergeImprovedAndLogReplays) {
  Rng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 5 + static_cast<int>(rng.next_below(30));
    auto g = testsupport::random_graph(n, 0.3, rng);
    auto res = greedy_partition_detailed(g);
    double q = 0.0;
    if (g.total_weight > 0.0) {
      for (std::size_t i = 0; i < g.node_count(); ++i) {
        double a = g.degree[i] / g.two_m();
        q -= a * a;
      }
    }
    for (const auto& step : res.merge_log) {
      EXPECT_GT(step.delta_q, 0.0);
      q += step.delta_q;
    }
    EXPECT_NEAR(q, res.final_q, 1e-12);
    EXPECT_NEAR(modularity(g, res.partition), res.final_q, 1e-9);
  }
}

TEST(GreedyPartition, TiesGoToSmallestCommunityIdPair) {
  // two disjoint identical-weight edges: both merges tie at dQ = 0.375
  auto g = SimilarityGraph::from_edges({"a", "b", "c", "d"}, {{0, 1, 1.0}, {2, 3, 1.0}});
  auto res = greedy_partition_detailed(g);
  ASSERT_EQ(res.merge_log.size(), 2u);
  EXPECT_EQ(res.merge_log[0].a, 0);
  EXPECT_EQ(res.merge_log[0].b, 1);
  EXPECT_EQ(res.merge_log[1].a, 2);
  EXPECT_EQ(res.merge_log[1].b, 3);
  EXPECT_DOUBLE_EQ(res.merge_log[0].delta_q, res.merge_log[1].delta_q);
}

TEST(GreedyPartition, DeterministicAcrossRuns) {
  Rng rng(73);
  auto g = testsupport::random_graph(40, 0.3, rng);
  auto a = greedy_partition_detailed(g);
  auto b = greedy_partition_detailed(g);
  EXPECT_EQ(a.partition.assignment, b.partition.assignment);
  ASSERT_EQ(a.merge_log.size(), b.merge_log.size());
  for (std::size_t i = 0; i < a.merge_log.size(); ++i) {
    EXPECT_EQ(a.merge_log[i].a, b.merge_log[i].a);
    EXPECT_EQ(a.merge_log[i].b, b.merge_log[i].b);
    EXPECT_EQ(a.merge_log[i].delta_q, b.merge_log[i].delta_q);
  }
}

TEST(RewireNullModel, PreservesDegreeSequenceAndWeightMultiset) {
  Rng data_rng(79);
  auto g = testsupport::random_graph(30, 0.25, data_rng);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    auto null_graph = rewire_null_model(g, rng);
    ASSERT_EQ(null_graph.node_count(), g.node_count());
    ASSERT_EQ(null_graph.edge_count(), g.edge_count());

    // unweighted degree sequence preserved per node
    std::vector<int> before(g.node_count(), 0), after(g.node_count(), 0);
    for (const auto& e : g.edges) {
      ++before[static_cast<std::size_t>(e.u)];
      ++before[static_cast<std::size_t>(e.v)];
    }
    std::unordered_set<std::uint64_t> seen;
    for (const auto& e : null_graph.edges) {
      ++after[static_cast<std::size_t>(e.u)];
      ++after[static_cast<std::size_t>(e.v)];
      EXPECT_LT(e.u, e.v);  // no self-loops, canonical order
      auto key = (static_cast<std::uint64_t>(e.u) << 32) | static_cast<std::uint32_t>(e.v);
      EXPECT_TRUE(seen.insert(key).second);  // no duplicate edges
    }
    EXPECT_EQ(before, after);

    // weight multiset preserved
    std::vector<double> wa, wb;
    for (const auto& e : g.edges) wa.push_back(e.w);
    for (const auto& e : null_graph.edges) wb.push_back(e.w);
    std::sort(wa.begin(), wa.end());
    std::sort(wb.begin(), wb.end());
    EXPECT_EQ(wa, wb);
  }
}

TEST(RewireNullModel, ActuallyShufflesLargerGraphs) {
  Rng data_rng(83);
  auto g = testsupport::random_graph(30, 0.25, data_rng);
  Rng rng(1);
  auto null_graph = rewire_null_model(g, rng);
  std::size_t moved = 0;
  std::unordered_set<std::uint64_t> orig;
  for (const auto& e : g.edges) {
    orig.insert((static_cast<std::uint64_t>(e.u) << 32) | static_cast<std::uint32_t>(e.v));
  }
  for (const auto& e : null_graph.edges) {
    auto key = (static_cast<std::uint64_t>(e.u) << 32) | static_cast<std::uint32_t>(e.v);
    if (!orig.count(key)) ++moved;
  }
  EXPECT_GT(moved, g.edge_count() / 4);
}

TEST(ValidatePartition, PlantedBlocksPassCompleteGraphFails) {
  // two dense blocks, no cross edges
  using G = SimilarityGraph;
  std::vector<std::string> ids;
  for (int i = 0; i < 16; ++i) ids.push_back("n" + std::to_string(i));
  std::vector<G::Edge> edges;
  for (int i = 0; i < 8; ++i) {
    for (int j = i + 1; j < 8; ++j) {
      edges.push_back({i, j, 1.0});
      edges.push_back({i + 8, j + 8, 1.0});
    }
  }
  auto blocks = G::from_edges(ids, edges);
  std::vector<std::int32_t> labels(16, 0);
  for (int i = 8; i < 16; ++i) labels[static_cast<std::size_t>(i)] = 1;
  auto p = Partition::from_labels(labels);
  EXPECT_TRUE(validate_partition(blocks, p, {20, 2.0, 7}));

  // K8 has no structure that beats its own rewirings (which are all K8)
  auto k8 = testsupport::complete_graph(8);
  std::vector<std::int32_t> half(8, 0);
  for (int i = 4; i < 8; ++i) half[static_cast<std::size_t>(i)] = 1;
  EXPECT_FALSE(validate_partition(k8, Partition::from_labels(half), {20, 2.0, 7}));
}

TEST(ValidatePartition, RejectsBadArguments) {
  auto g = testsupport::barbell_graph();
  auto p = Partition::from_labels({0, 0, 0, 1, 1, 1});
  EXPECT_THROW(validate_partition(g, p, {1, 2.0, 0}), std::invalid_argument);
  EXPECT_THROW(validate_partition(g, all_in_one(6), {20, 2.0, 0}), std::invalid_argument);
}

TEST(AssignmentCsv, RoundTripAndMismatchDetection) {
  std::vector<std::string> ids{"a", "b", "c"};
  auto p = Partition::from_labels({1, 1, 0});
  testsupport::TempDir dir("assign");
  write_assignment_csv(ids, p, dir.file("a.csv").string());
  auto back = read_assignment_csv(dir.file("a.csv").string(), ids);
  EXPECT_EQ(back.assignment, p.assignment);
  EXPECT_EQ(back.k, p.k);

  std::vector<std::string> other{"a", "b", "zz"};
  EXPECT_THROW(read_assignment_csv(dir.file("a.csv").string(), other), std::runtime_error);
}

}  // namespace
