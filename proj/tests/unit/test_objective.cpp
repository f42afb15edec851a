#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "reference.hpp"
#include "splitea/objective.hpp"
#include "splitea/rng.hpp"

using namespace splitea;

namespace {

TrafficDay dataset1() { return TrafficDay::from_rows({{0.8, 0.5, 0.3}, {0.2, 0.7, 0.1}, {0.2, 0.6, 0.7}}); }
TrafficDay dataset2() { return TrafficDay::from_rows({{0.8, 0.5, 0.3}, {0.7, 0.2, 0.1}, {0.2, 0.6, 0.7}}); }
TrafficDay dataset3() { return TrafficDay::from_rows({{0.8, 0.5, 0.3}, {0.7, 0.2, 0.1}, {0.7, 0.6, 0.2}}); }

TrafficDay random_day(Rng& rng, std::size_t n, std::size_t h, double scale = 1.0) {
  TrafficDay t(n, h);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < h; ++k) t.at(i, k) = scale * rng.uniform();
  }
  return t;
}

const std::vector<std::size_t> kP12{0, 1};
const std::vector<std::size_t> kP3{2};
const std::vector<std::size_t> kAll{0, 1, 2};

}  // namespace

TEST(ClusterHourlySum, Examples) {
  const auto t = dataset1();
  EXPECT_DOUBLE_EQ(cluster_hourly_sum(t, kP12, 0), 1.0);
  EXPECT_DOUBLE_EQ(cluster_hourly_sum(t, kP3, 2), 0.7);
  EXPECT_NEAR(cluster_hourly_sum(t, kAll, 1), 1.8, 1e-15);
}

TEST(ClusterUtility, Examples) {
  const auto t = dataset1();
  EXPECT_NEAR(cluster_utility(t, kP12), 0.8 / 3.0, 1e-12);
  EXPECT_NEAR(1.0 - cluster_utility(t, kP12), 0.733, 0.0005);
  EXPECT_NEAR(cluster_utility(t, kP3), 0.5, 1e-12);
  const auto exact = TrafficDay::from_rows({{0.25, 0.5}, {0.75, 0.5}});
  const std::vector<std::size_t> both{0, 1};
  EXPECT_EQ(cluster_utility(exact, both), 0.0);
}

TEST(Fitness, SinglePointAtCapacity) {
  TrafficDay t(1, 24, std::vector<double>(24, 1.0));
  const auto f = fitness(Clustering({1}), t, ProblemConfig{0.01, 1.0, 24});
  EXPECT_DOUBLE_EQ(f.f, 0.01);
  EXPECT_EQ(f.K, 1);
  EXPECT_EQ(f.u_mean, 0.0);
}

TEST(Fitness, AllSingletonsOnDataset1) {
  const auto f = fitness(Clustering({1, 2, 3}), dataset1(), ProblemConfig{0.0, 1.0, 3});
  EXPECT_NEAR(f.f, 1.0 - 0.456, 0.0005);
  EXPECT_EQ(f.K, 3);
}

TEST(Fitness, LabelOverloadValidates) {
  const std::vector<int> good{1, 2, 1};
  const std::vector<int> gap{1, 3, 1};
  const ProblemConfig cfg{0.01, 1.0, 3};
  EXPECT_EQ(fitness(good, dataset1(), cfg), fitness(Clustering(good), dataset1(), cfg));
  EXPECT_THROW(fitness(gap, dataset1(), cfg), std::invalid_argument);
}

TEST(Fitness, ShapeMismatchThrows) {
  EXPECT_THROW(fitness(Clustering({1, 1}), dataset1(), ProblemConfig{0.01, 1.0, 3}), std::invalid_argument);
  EXPECT_THROW(fitness(Clustering({1, 1, 1}), dataset1(), ProblemConfig{0.01, 1.0, 24}),
               std::invalid_argument);
}

TEST(Fitness, MatchesBruteForceEvaluatorOnRandomSixPointInstances) {
  Rng rng(2024);
  const auto partitions = reference::set_partitions(6);
  ASSERT_EQ(partitions.size(), 203u);  // Bell(6)
  for (int inst = 0; inst < 5; ++inst) {
    const auto t = random_day(rng, 6, 24, 0.6);
    const ProblemConfig cfg{0.01, 1.0, 24};
    for (const auto& labels : partitions) {
      const auto got = fitness(Clustering(labels), t, cfg);
      const auto want = reference::score(labels, t, cfg.w);
      EXPECT_NEAR(got.f, want.f, 1e-12);
      EXPECT_NEAR(got.u_mean, want.u_mean, 1e-12);
      EXPECT_EQ(got.K, want.k);
    }
  }
}

TEST(Metrics, DecompositionIdentities) {
  Rng rng(99);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng.index(20);
    const std::size_t h = rng.index(2) ? 3 : 24;
    const auto day = random_day(rng, n, h, 0.9);
    std::vector<int> raw(n);
    for (auto& l : raw) l = 1 + static_cast<int>(rng.index(n));
    const auto c = normalize_labels(raw);
    const ProblemConfig cfg{0.05, 1.0, h};
    const auto m = metrics(c, day, cfg);
    EXPECT_NEAR(m.f, cfg.w * m.K + m.U, 1e-12);
    EXPECT_NEAR(m.U, m.u_delay + m.u_under1, 1e-12);
    EXPECT_DOUBLE_EQ(m.f, fitness(c, day, cfg).f);
    const auto ref = reference::score(c.labels(), day, cfg.w);
    EXPECT_NEAR(m.u_delay, ref.u_delay, 1e-12);
    EXPECT_NEAR(m.u_under1, ref.u_under1, 1e-12);
  }
}

TEST(Metrics, UnderAndOverCapacityExtremes) {
  const auto low = TrafficDay::from_rows({{0.1, 0.2}, {0.3, 0.1}});
  const auto m1 = metrics(Clustering({1, 1}), low, ProblemConfig{0.01, 1.0, 2});
  EXPECT_EQ(m1.u_delay, 0.0);
  EXPECT_DOUBLE_EQ(m1.u_under1, m1.U);
  const auto high = TrafficDay::from_rows({{0.9, 0.8}, {0.7, 0.6}});
  const auto m2 = metrics(Clustering({1, 1}), high, ProblemConfig{0.01, 1.0, 2});
  EXPECT_EQ(m2.u_under1, 0.0);
  EXPECT_DOUBLE_EQ(m2.u_delay, m2.U);
}

TEST(Metrics, PublishedMilanRowIsSelfConsistent) {
  // Udelay + Uunder1 = U and w*K + U = f for a published result row.
  EXPECT_NEAR(0.0076 + 0.7568, 0.7644, 1e-12);
  EXPECT_NEAR(0.01 * 52.3019 + 0.7644, 1.2874, 1e-4);
}

TEST(PeakHours, Examples) {
  const auto t = dataset1();
  EXPECT_EQ(peak_hours(t.row(0)), (std::vector<std::size_t>{0}));
  EXPECT_EQ(peak_hours(t.row(1)), (std::vector<std::size_t>{1}));
  const std::vector<double> flat(5, 0.4);
  EXPECT_EQ(peak_hours(flat), (std::vector<std::size_t>{0}));
  EXPECT_EQ(peak_hours(flat, 3), (std::vector<std::size_t>{0, 1, 2}));
  const std::vector<double> v{0.1, 0.9, 0.3, 0.9, 0.5};
  EXPECT_EQ(peak_hours(v, 2), (std::vector<std::size_t>{1, 3}));
  EXPECT_THROW(peak_hours(v, 0), std::invalid_argument);
  EXPECT_THROW(peak_hours(v, 6), std::invalid_argument);
}

TEST(LegacyScore, EntropyExamples) {
  EXPECT_NEAR(legacy_score(kAll, dataset1()).entropy_bits, std::log2(3.0), 1e-12);
  const double h2 = -(2.0 / 3) * std::log2(2.0 / 3) - (1.0 / 3) * std::log2(1.0 / 3);
  EXPECT_NEAR(legacy_score(kAll, dataset2()).entropy_bits, h2, 1e-12);
  EXPECT_EQ(legacy_score(kAll, dataset3()).entropy_bits, 0.0);
  EXPECT_EQ(legacy_score(kP3, dataset1()).entropy_bits, 0.0);
}

TEST(LegacyScore, CapacityUtilityPeaksAtOne) {
  const auto at_one = TrafficDay::from_rows({{0.5, 0.5}, {0.5, 0.5}});
  const std::vector<std::size_t> both{0, 1};
  EXPECT_DOUBLE_EQ(legacy_score(both, at_one).u_legacy, 1.0);
  const auto low = TrafficDay::from_rows({{0.2, 0.2}, {0.2, 0.2}});
  const double x = 0.4;
  EXPECT_NEAR(legacy_score(both, low).u_legacy, std::pow(x, -std::log(x)), 1e-12);
  EXPECT_LT(legacy_score(both, low).u_legacy, 1.0);
  const auto zero = TrafficDay::from_rows({{0.0, 0.0}});
  const std::vector<std::size_t> one{0};
  EXPECT_THROW(legacy_score(one, zero), std::invalid_argument);
}

TEST(LegacyMeanM, Examples) {
  EXPECT_NEAR(legacy_mean_M(Clustering({1, 1, 1}), dataset1()), 1.004, 0.0005);
  EXPECT_NEAR(legacy_mean_M(Clustering({1, 1, 2}), dataset1()), 0.367, 0.0005);
  for (const auto& labels : reference::set_partitions(3)) {
    EXPECT_EQ(legacy_mean_M(Clustering(labels), dataset3()), 0.0);
  }
}
