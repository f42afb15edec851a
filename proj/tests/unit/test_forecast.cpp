#include <gtest/gtest.h>

#include <vector>

#include "splitea/datasets.hpp"
#include "splitea/forecast.hpp"
#include "splitea/objective.hpp"

using namespace splitea;

TEST(Persistence, ReturnsTodayForTomorrow) {
  const auto today = TrafficDay::from_rows({{0.1, 0.2}, {0.3, 0.4}}, 4);
  const auto est = persistence_predict(today);
  EXPECT_EQ(est.values(), today.values());
  EXPECT_EQ(est.day_index(), 5);
  const TrafficDay zero(3, 2);
  EXPECT_EQ(persistence_predict(zero).values(), zero.values());
}

TEST(Oracle, ReturnsActual) {
  const auto actual = TrafficDay::from_rows({{0.5, 0.6}});
  EXPECT_EQ(oracle_predict(actual), actual);
  const ProblemConfig cfg{0.01, 1.0, 2};
  EXPECT_EQ(fitness(Clustering({1}), oracle_predict(actual), cfg), fitness(Clustering({1}), actual, cfg));
}

TEST(Forecasters, SeriesInterface) {
  const std::vector<TrafficDay> series{TrafficDay::from_rows({{0.1}}, 0), TrafficDay::from_rows({{0.2}}, 1)};
  const auto persistence = make_forecaster("persistence");
  const auto oracle = make_forecaster("oracle");
  EXPECT_EQ(persistence->name(), "persistence");
  EXPECT_EQ(persistence->first_target(), 1u);
  EXPECT_EQ(oracle->first_target(), 0u);
  EXPECT_DOUBLE_EQ(persistence->predict(series, 1).at(0, 0), 0.1);
  EXPECT_DOUBLE_EQ(oracle->predict(series, 1).at(0, 0), 0.2);
  EXPECT_THROW(persistence->predict(series, 0), std::out_of_range);
  EXPECT_THROW(oracle->predict(series, 2), std::out_of_range);
  EXPECT_THROW(make_forecaster("lstm"), std::invalid_argument);
}

TEST(ForecastError, Trivial) {
  const auto a = TrafficDay::from_rows({{0.3, 0.7}, {0.2, 0.9}});
  const auto same = forecast_error(a, a);
  EXPECT_EQ(same.mae, 0.0);
  EXPECT_EQ(same.rmse, 0.0);
  const TrafficDay zeros(2, 2);
  const TrafficDay ones(2, 2, std::vector<double>(4, 1.0));
  const auto e = forecast_error(zeros, ones);
  EXPECT_DOUBLE_EQ(e.mae, 1.0);
  EXPECT_DOUBLE_EQ(e.rmse, 1.0);
}

TEST(ForecastError, HandComputedThreeByThree) {
  const auto est = TrafficDay::from_rows({{0.2, 0.5, 0.9}, {0.1, 0.0, 0.4}, {0.7, 0.3, 0.6}});
  const auto act = TrafficDay::from_rows({{0.3, 0.5, 0.6}, {0.0, 0.2, 0.4}, {0.9, 0.3, 0.1}});
  const auto e = forecast_error(est, act);
  EXPECT_NEAR(e.mae, 0.15555555555555556, 1e-12);
  EXPECT_NEAR(e.rmse, 0.22110831935702668, 1e-12);
  EXPECT_NEAR(e.abs_error[2], 0.3, 1e-12);
  EXPECT_LE(e.mae, e.rmse);
}

TEST(ForecastError, ShapeMismatch) {
  EXPECT_THROW(forecast_error(TrafficDay(2, 3), TrafficDay(3, 2)), std::invalid_argument);
}

TEST(ForecastError, MaeNeverExceedsRmse) {
  const auto days = gen_traffic_random(10, 6, 24, 4);
  for (std::size_t d = 1; d < days.size(); ++d) {
    const auto e = forecast_error(persistence_predict(days[d - 1]), days[d]);
    EXPECT_LE(e.mae, e.rmse);
    EXPECT_GE(e.mae, 0.0);
  }
}

TEST(ForecastError, PersistenceOnMilanMatchesDirectDifferencing) {
  // Reference: mean |day1 - day0| over traffic.csv of this dataset, by pandas.
  auto p = default_params("1c-milan");
  p.n_points = 20;
  p.days = 2;
  p.seed = 1;
  const auto ds = generate_dataset(p);
  const auto e = forecast_error(persistence_predict(ds.traffic[0]), ds.traffic[1]);
  EXPECT_NEAR(e.mae, 0.009910557314665964, 1e-12);
}
