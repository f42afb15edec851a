#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <vector>

#include "reference.hpp"
#include "splitea/datasets.hpp"
#include "splitea/solvers.hpp"

using namespace splitea;

namespace {

PointSet random_points(std::uint64_t seed, std::size_t n, double side = 4.0) {
  return PointSet(gen_locations_random(n, BoundingBox{0, side, 0, side}, seed), DistanceMetric::euclidean);
}

std::vector<TrafficDay> random_days(std::uint64_t seed, std::size_t n, std::size_t days, std::size_t hours = 24) {
  return gen_traffic_random(n, days, hours, seed);
}

}  // namespace

TEST(InitialPop, AlwaysFeasible) {
  const auto pts = random_points(1, 10);
  Rng rng(3);
  const auto pop = initial_pop(pts, 1.5, 100, rng);
  ASSERT_EQ(pop.size(), 100u);
  for (const auto& c : pop) EXPECT_TRUE(is_feasible(c, pts, 1.5));
}

TEST(InitialPop, TinyTauGivesSingletons) {
  const auto pts = random_points(2, 12);
  Rng rng(4);
  for (const auto& c : initial_pop(pts, 1e-9, 10, rng)) EXPECT_EQ(c.cluster_count(), 12);
}

TEST(InitialPop, SinglePoint) {
  PointSet pts({{0, 0}}, DistanceMetric::euclidean);
  Rng rng(5);
  for (const auto& c : initial_pop(pts, 1.0, 5, rng)) EXPECT_EQ(c.labels(), std::vector<int>{1});
}

TEST(InitialPop, ProducesMultiPointClusters) {
  const auto pts = random_points(6, 20, 2.0);
  Rng rng(6);
  int below_n = 0;
  for (const auto& c : initial_pop(pts, 1.0, 20, rng)) below_n += c.cluster_count() < 20;
  EXPECT_GT(below_n, 15);
}

TEST(Mutate, MergesTwoIsolatedNeighbours) {
  PointSet pts({{0, 0}, {0.5, 0}}, DistanceMetric::euclidean);
  Rng rng(7);
  const auto child = mutate(Clustering::singletons(2), pts, 1.0, 1.0, rng);
  EXPECT_EQ(child.cluster_count(), 1);
}

TEST(Mutate, LonePointReturnsParent) {
  PointSet pts({{0, 0}, {5, 0}, {5.5, 0}}, DistanceMetric::euclidean);
  Rng rng(8);
  const Clustering parent({1, 2, 2});
  for (int i = 0; i < 50; ++i) {
    const auto child = mutate(parent, pts, 1.0, 1.0, rng);  // always picks the isolated point 0
    EXPECT_EQ(child, parent);
  }
}

TEST(Mutate, AlwaysFeasible) {
  const auto pts = random_points(9, 20);
  const double tau = 1.2;
  Rng rng(10);
  auto parents = initial_pop(pts, tau, 10, rng);
  for (int i = 0; i < 1000; ++i) {
    auto& parent = parents[static_cast<std::size_t>(i) % parents.size()];
    auto child = mutate(parent, pts, tau, 0.5, rng);
    ASSERT_TRUE(is_feasible(child, pts, tau));
    parent = std::move(child);
  }
}

TEST(Mutate, DonorSubsetFormsNewCluster) {
  // Point 3 is near points 0 and 1 but not 2, so cluster {0,1,2} is adjacent
  // without being joinable.
  PointSet pts({{0, 0}, {0.4, 0}, {-0.5, 0}, {0.6, 0.3}}, DistanceMetric::euclidean);
  const Clustering parent({1, 1, 1, 2});
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto child = mutate(parent, pts, 1.0, 1.0, rng);
    ASSERT_TRUE(is_feasible(child, pts, 1.0));
    EXPECT_EQ(child.cluster_count(), 2);
    EXPECT_NE(child.label(3), child.label(2));
    EXPECT_TRUE(child.label(3) == child.label(0) || child.label(3) == child.label(1));
  }
}

TEST(SplitCluster, FourPointClusterSplits) {
  Rng rng(12);
  const Clustering c({1, 1, 1, 1});
  bool saw_13 = false, saw_22 = false;
  for (int i = 0; i < 200; ++i) {
    const auto s = split_cluster(c, rng);
    ASSERT_EQ(s.cluster_count(), 2);
    const auto g = s.groups();
    const auto small = std::min(g[0].size(), g[1].size());
    saw_13 |= small == 1;
    saw_22 |= small == 2;
    EXPECT_TRUE(small == 1 || small == 2);
  }
  EXPECT_TRUE(saw_13);
  EXPECT_TRUE(saw_22);
}

TEST(SplitCluster, SingletonsUnchanged) {
  Rng rng(13);
  EXPECT_EQ(split_cluster(Clustering::singletons(5), rng), Clustering::singletons(5));
}

TEST(SplitCluster, RefinesFeasibleParents) {
  const auto pts = random_points(14, 25);
  Rng rng(15);
  for (const auto& c : initial_pop(pts, 1.5, 200, rng)) {
    const auto s = split_cluster(c, rng);
    EXPECT_TRUE(is_feasible(s, pts, 1.5));
    const auto groups = c.groups();
    const bool has_multi =
        std::any_of(groups.begin(), groups.end(), [](const auto& g) { return g.size() > 1; });
    EXPECT_EQ(s.cluster_count(), c.cluster_count() + (has_multi ? 1 : 0));
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = 0; j < c.size(); ++j) {
        if (s.label(i) == s.label(j)) {
          EXPECT_EQ(c.label(i), c.label(j));
        }
      }
    }
  }
}

TEST(RunEa, SinglePoint) {
  PointSet pts({{0, 0}}, DistanceMetric::euclidean);
  const auto days = random_days(16, 1, 1);
  const ProblemConfig cfg{0.01, 1.0, 24};
  const auto res = run_ea(pts, days, EaConfig{}, cfg);
  ASSERT_EQ(res.size(), 1u);
  EXPECT_EQ(res[0].best.solution.labels(), std::vector<int>{1});
  EXPECT_DOUBLE_EQ(res[0].best.fitness.f, fitness(Clustering({1}), days[0], cfg).f);
}

TEST(RunEa, DeterministicPerSeed) {
  const auto pts = random_points(17, 15);
  const auto days = random_days(18, 15, 3);
  EaConfig ea;
  ea.maxgen = 40;
  ea.seed = 123;
  const ProblemConfig cfg{0.01, 1.2, 24};
  const auto a = run_ea(pts, days, ea, cfg);
  const auto b = run_ea(pts, days, ea, cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t d = 0; d < a.size(); ++d) {
    EXPECT_EQ(a[d].best.solution, b[d].best.solution);
    EXPECT_EQ(a[d].best.fitness, b[d].best.fitness);
    EXPECT_EQ(a[d].trace, b[d].trace);
  }
  ea.seed = 124;
  const auto c = run_ea(pts, days, ea, cfg);
  EXPECT_NE(a[0].trace, c[0].trace);
}

TEST(RunEa, TraceNonIncreasingAndCounted) {
  const auto pts = random_points(19, 30);
  const auto days = random_days(20, 30, 3);
  for (auto variant : {WarmStart::split, WarmStart::rand, WarmStart::copy}) {
    EaConfig ea;
    ea.variant = variant;
    ea.seed = 5;
    const auto res = run_ea(pts, days, ea, ProblemConfig{0.01, 1.0, 24});
    for (const auto& day : res) {
      ASSERT_EQ(day.trace.size(), ea.maxgen + 1);
      EXPECT_EQ(day.evals_used, ea.popsize * (ea.maxgen + 1));
      for (std::size_t g = 1; g < day.trace.size(); ++g) EXPECT_LE(day.trace[g], day.trace[g - 1]);
      EXPECT_EQ(day.trace.back(), day.best.fitness.f);
    }
  }
}

TEST(RunEa, EveryGeneratedSolutionFeasible) {
  const auto pts = random_points(21, 25);
  const auto days = random_days(22, 25, 2);
  const double tau = 1.3;
  std::size_t seen = 0, bad = 0;
  EaConfig ea;
  ea.maxgen = 50;
  run_ea(pts, days, ea, ProblemConfig{0.01, tau, 24}, [&](const Clustering& c) {
    ++seen;
    bad += !is_feasible(c, pts, tau);
  });
  EXPECT_EQ(seen, 2 * ea.popsize * (ea.maxgen + 1));
  EXPECT_EQ(bad, 0u);
}

TEST(RunEa, CopyWarmStartStartsFromPreviousBest) {
  const auto pts = random_points(23, 20);
  const auto days = random_days(24, 20, 2);
  EaConfig ea;
  ea.variant = WarmStart::copy;
  ea.seed = 9;
  const ProblemConfig cfg{0.01, 1.2, 24};
  const auto res = run_ea(pts, days, ea, cfg);
  // Day 1's starting population contains day 0's best, re-scored on day 1.
  EXPECT_LE(res[1].trace.front(), fitness(res[0].best.solution, days[1], cfg).f);
}

TEST(EaConfig, Validation) {
  EaConfig ea;
  EXPECT_EQ(ea.generation_evaluations(), 1500u);
  ea.popsize = 0;
  EXPECT_THROW(ea.validate(), std::invalid_argument);
  ea = {};
  ea.prob = 1.5;
  EXPECT_THROW(ea.validate(), std::invalid_argument);
  EXPECT_EQ(parse_warm_start("split"), WarmStart::split);
  EXPECT_THROW(parse_warm_start("merge"), std::invalid_argument);
}

TEST(RunGreedy, SinglePoint) {
  PointSet pts({{0, 0}}, DistanceMetric::euclidean);
  const auto days = random_days(25, 1, 1);
  const ProblemConfig cfg{0.01, 1.0, 24};
  const auto res = run_greedy(pts, days, GreedyConfig{}, cfg);
  const double u = fitness(Clustering({1}), days[0], cfg).u_mean;
  EXPECT_DOUBLE_EQ(res[0].best.fitness.f, 0.01 + u);
  EXPECT_EQ(res[0].evals_used, 1500u);
}

TEST(RunGreedy, BudgetOneEvaluatesOnce) {
  const auto pts = random_points(26, 8);
  const auto days = random_days(27, 8, 1);
  GreedyConfig g;
  g.budget = 1;
  std::size_t observed = 0;
  const auto res = run_greedy(pts, days, g, ProblemConfig{0.01, 2.0, 24},
                              [&](const Clustering&) { ++observed; });
  EXPECT_EQ(res[0].evals_used, 1u);
  EXPECT_EQ(observed, 2u);  // the uncharged starting solution plus one candidate
}

TEST(RunGreedy, NeverBeatsExhaustiveOptimum) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto pts = random_points(seed, 6, 2.0);
    const auto days = random_days(seed + 100, 6, 1);
    const ProblemConfig cfg{0.01, 1.2, 24};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& labels : reference::set_partitions(6)) {
      if (reference::feasible(labels, pts, cfg.tau)) best = std::min(best, reference::score(labels, days[0], cfg.w).f);
    }
    GreedyConfig g;
    g.seed = seed;
    const auto res = run_greedy(pts, days, g, cfg);
    EXPECT_GE(res[0].best.fitness.f, best - 1e-12);
    EXPECT_TRUE(is_feasible(res[0].best.solution, pts, cfg.tau));
  }
}

TEST(RunGreedy, TraceCheckpoints) {
  const auto pts = random_points(28, 30);
  const auto days = random_days(29, 30, 2);
  GreedyConfig g;
  g.seed = 3;
  const auto res = run_greedy(pts, days, g, ProblemConfig{0.01, 1.0, 24});
  for (const auto& day : res) {
    EXPECT_EQ(day.evals_used, g.budget);
    EXPECT_EQ(day.trace.size(), g.budget / g.checkpoint_interval + 1);
    for (std::size_t i = 1; i < day.trace.size(); ++i) EXPECT_LE(day.trace[i], day.trace[i - 1]);
    EXPECT_EQ(day.trace.back(), day.best.fitness.f);
  }
}

TEST(RunGreedy, Deterministic) {
  const auto pts = random_points(30, 12);
  const auto days = random_days(31, 12, 2);
  GreedyConfig g;
  g.seed = 77;
  g.budget = 300;
  const ProblemConfig cfg{0.01, 1.5, 24};
  const auto a = run_greedy(pts, days, g, cfg);
  const auto b = run_greedy(pts, days, g, cfg);
  for (std::size_t d = 0; d < a.size(); ++d) {
    EXPECT_EQ(a[d].best.solution, b[d].best.solution);
    EXPECT_EQ(a[d].trace, b[d].trace);
  }
}
