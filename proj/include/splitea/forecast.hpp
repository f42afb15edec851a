#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "splitea/model.hpp"

namespace splitea {

/// Day-ahead traffic predictor.
///
/// predict(series, target) estimates series[target]. Real forecasters read
/// only series[target - 1] (one day of history); the oracle reads the target
/// day itself.
class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual std::string_view name() const = 0;
  virtual TrafficDay predict(std::span<const TrafficDay> series, std::size_t target) const = 0;
  /// Earliest day index this forecaster can produce an estimate for.
  virtual std::size_t first_target() const { return 1; }
};

inline TrafficDay persistence_predict(const TrafficDay& today) {
  TrafficDay out = today;
  out.set_day_index(today.day_index() + 1);
  return out;
}

inline TrafficDay oracle_predict(const TrafficDay& actual_tomorrow) { return actual_tomorrow; }

class PersistenceForecaster final : public Forecaster {
 public:
  std::string_view name() const override { return "persistence"; }
  TrafficDay predict(std::span<const TrafficDay> series, std::size_t target) const override {
    if (target == 0 || target >= series.size()) throw std::out_of_range("no history for target day");
    return persistence_predict(series[target - 1]);
  }
};

/// Perfect foresight: optimization sees the real traffic of the day served.
class OracleForecaster final : public Forecaster {
 public:
  std::string_view name() const override { return "oracle"; }
  TrafficDay predict(std::span<const TrafficDay> series, std::size_t target) const override {
    if (target >= series.size()) throw std::out_of_range("target day beyond series");
    return oracle_predict(series[target]);
  }
  std::size_t first_target() const override { return 0; }
};

inline std::unique_ptr<Forecaster> make_forecaster(std::string_view id) {
  if (id == "oracle") return std::make_unique<OracleForecaster>();
  if (id == "persistence") return std::make_unique<PersistenceForecaster>();
  throw std::invalid_argument("unknown forecaster: " + std::string(id));
}

struct ForecastError {
  std::vector<double> abs_error;  // row-major points x hours
  double mae = 0.0;
  double rmse = 0.0;
};

inline ForecastError forecast_error(const TrafficDay& estimate, const TrafficDay& actual) {
  if (estimate.points() != actual.points() || estimate.hours() != actual.hours()) {
    throw std::invalid_argument("forecast and actual traffic differ in shape");
  }
  ForecastError out;
  out.abs_error.reserve(actual.values().size());
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t k = 0; k < actual.values().size(); ++k) {
    const double e = std::abs(estimate.values()[k] - actual.values()[k]);
    out.abs_error.push_back(e);
    sum += e;
    sq += e * e;
  }
  const double count = static_cast<double>(actual.values().size());
  out.mae = sum / count;
  out.rmse = std::sqrt(sq / count);
  return out;
}

}  // namespace splitea
