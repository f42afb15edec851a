#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "splitea/model.hpp"

namespace splitea {

struct FitnessValue {
  double f = 0.0;
  int K = 0;
  double u_mean = 0.0;

  friend bool operator==(const FitnessValue&, const FitnessValue&) = default;
};

/// Deployed-solution metrics. U splits exactly into the over-capacity part
/// (u_delay) and the under-capacity part (u_under1).
struct MetricsReport {
  double K = 0.0;
  double U = 0.0;
  double u_delay = 0.0;
  double u_under1 = 0.0;
  double f = 0.0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Scores of the peak-hour/complementarity formulation for one cluster.
struct LegacyScore {
  double u_legacy = 0.0;      // capacity utility, peaks at 1 when mean load is 1
  double entropy_bits = 0.0;  // entropy of member peak hours
  double m = 0.0;             // u_legacy * entropy_bits
  std::vector<std::vector<std::size_t>> peak_hours;  // per member, in member order
};

inline double cluster_hourly_sum(const TrafficDay& traffic, std::span<const std::size_t> members,
                                 std::size_t hour) {
  double s = 0.0;
  for (auto m : members) s += traffic.at(m, hour);
  return s;
}

/// Mean over hours of |cluster load - 1|.
inline double cluster_utility(const TrafficDay& traffic, std::span<const std::size_t> members) {
  if (members.empty()) throw std::invalid_argument("cluster must be non-empty");
  double dev = 0.0;
  for (std::size_t h = 0; h < traffic.hours(); ++h) {
    dev += std::abs(cluster_hourly_sum(traffic, members, h) - 1.0);
  }
  return dev / static_cast<double>(traffic.hours());
}

namespace detail {

inline void check_shapes(const Clustering& c, const TrafficDay& traffic, const ProblemConfig& cfg) {
  if (c.size() != traffic.points()) {
    throw std::invalid_argument("clustering size does not match traffic point count");
  }
  if (cfg.hours != traffic.hours()) {
    throw std::invalid_argument("traffic hours do not match the configured hours per day");
  }
}

// K x H cluster loads, summed in ascending point order.
inline std::vector<double> cluster_loads(const Clustering& c, const TrafficDay& traffic) {
  const std::size_t hours = traffic.hours();
  std::vector<double> loads(static_cast<std::size_t>(c.cluster_count()) * hours, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    double* row = loads.data() + static_cast<std::size_t>(c.label(i) - 1) * hours;
    const auto src = traffic.row(i);
    for (std::size_t h = 0; h < hours; ++h) row[h] += src[h];
  }
  return loads;
}

}  // namespace detail

/// w * K + mean over clusters of cluster_utility. Feasibility is the caller's
/// responsibility; this never looks at distances.
inline FitnessValue fitness(const Clustering& c, const TrafficDay& traffic, const ProblemConfig& cfg) {
  detail::check_shapes(c, traffic, cfg);
  const auto loads = detail::cluster_loads(c, traffic);
  const std::size_t hours = traffic.hours();
  const auto k = static_cast<std::size_t>(c.cluster_count());
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double dev = 0.0;
    for (std::size_t h = 0; h < hours; ++h) dev += std::abs(loads[j * hours + h] - 1.0);
    total += dev / static_cast<double>(hours);
  }
  const double u_mean = total / static_cast<double>(k);
  return {cfg.w * static_cast<double>(k) + u_mean, c.cluster_count(), u_mean};
}

/// Validates raw labels before evaluating; non-contiguous labels throw.
inline FitnessValue fitness(std::span<const int> labels, const TrafficDay& traffic,
                            const ProblemConfig& cfg) {
  return fitness(Clustering(std::vector<int>(labels.begin(), labels.end())), traffic, cfg);
}

inline MetricsReport metrics(const Clustering& c, const TrafficDay& traffic, const ProblemConfig& cfg) {
  detail::check_shapes(c, traffic, cfg);
  const auto loads = detail::cluster_loads(c, traffic);
  const std::size_t hours = traffic.hours();
  const auto k = static_cast<std::size_t>(c.cluster_count());
  double u = 0.0;
  double over = 0.0;
  double under = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double dev = 0.0;
    double dev_over = 0.0;
    double dev_under = 0.0;
    for (std::size_t h = 0; h < hours; ++h) {
      const double load = loads[j * hours + h];
      if (load > 1.0) {
        dev_over += load - 1.0;
      } else {
        dev_under += 1.0 - load;
      }
      dev += std::abs(load - 1.0);
    }
    u += dev / static_cast<double>(hours);
    over += dev_over / static_cast<double>(hours);
    under += dev_under / static_cast<double>(hours);
  }
  const double kd = static_cast<double>(k);
  MetricsReport r;
  r.K = kd;
  r.U = u / kd;
  r.u_delay = over / kd;
  r.u_under1 = under / kd;
  r.f = cfg.w * kd + r.U;
  return r;
}

/// The m hours with the largest traffic, ties to the lower hour, returned in
/// ascending hour order.
inline std::vector<std::size_t> peak_hours(std::span<const double> traffic_point, std::size_t m = 1) {
  if (m < 1 || m > traffic_point.size()) throw std::invalid_argument("peak count m must lie in [1, H]");
  std::vector<std::size_t> order(traffic_point.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return traffic_point[a] > traffic_point[b];
  });
  order.resize(m);
  std::sort(order.begin(), order.end());
  return order;
}

inline LegacyScore legacy_score(std::span<const std::size_t> members, const TrafficDay& traffic,
                                std::size_t m = 1) {
  if (members.empty()) throw std::invalid_argument("cluster must be non-empty");
  LegacyScore out;
  std::map<std::size_t, std::size_t> counts;
  std::size_t total_peaks = 0;
  for (auto p : members) {
    auto peaks = peak_hours(traffic.row(p), m);
    for (auto h : peaks) ++counts[h];
    total_peaks += peaks.size();
    out.peak_hours.push_back(std::move(peaks));
  }
  double entropy = 0.0;
  for (const auto& [hour, count] : counts) {
    const double p = static_cast<double>(count) / static_cast<double>(total_peaks);
    entropy -= p * std::log2(p);
  }
  out.entropy_bits = entropy == 0.0 ? 0.0 : entropy;  // normalizes -0.0

  double mean_load = 0.0;
  for (std::size_t h = 0; h < traffic.hours(); ++h) mean_load += cluster_hourly_sum(traffic, members, h);
  mean_load /= static_cast<double>(traffic.hours());
  if (!(mean_load > 0.0)) throw std::invalid_argument("capacity utility undefined for zero mean load");
  out.u_legacy = std::pow(mean_load, -std::log(mean_load));
  out.m = out.u_legacy * out.entropy_bits;
  return out;
}

/// Mean over clusters of (1 - cluster_utility) * peak entropy.
inline double legacy_mean_M(const Clustering& c, const TrafficDay& traffic, std::size_t m = 1) {
  double total = 0.0;
  for (const auto& g : c.groups()) {
    total += (1.0 - cluster_utility(traffic, g)) * legacy_score(g, traffic, m).entropy_bits;
  }
  return total / static_cast<double>(c.cluster_count());
}

/// Mean over clusters of capacity utility * peak entropy (LegacyScore::m).
inline double legacy_mean_capacity_M(const Clustering& c, const TrafficDay& traffic,
                                     std::size_t m = 1) {
  double total = 0.0;
  for (const auto& g : c.groups()) total += legacy_score(g, traffic, m).m;
  return total / static_cast<double>(c.cluster_count());
}

}  // namespace splitea
