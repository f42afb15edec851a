#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace splitea {

enum class DistanceMetric { euclidean, haversine_meters };

inline std::string_view to_string(DistanceMetric m) {
  return m == DistanceMetric::euclidean ? "euclidean" : "haversine_meters";
}

inline DistanceMetric parse_distance_metric(std::string_view s) {
  if (s == "euclidean") return DistanceMetric::euclidean;
  if (s == "haversine_meters" || s == "haversine") return DistanceMetric::haversine_meters;
  throw std::invalid_argument("unknown distance metric: " + std::string(s));
}

/// A point position. For geographic data coord1 is longitude and coord2 is
/// latitude, both in degrees; synthetic data uses abstract plane units.
struct Position {
  double coord1 = 0.0;
  double coord2 = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

inline constexpr double kMeanEarthRadiusMeters = 6371008.8;

inline double euclidean_distance(Position a, Position b) {
  return std::hypot(a.coord1 - b.coord1, a.coord2 - b.coord2);
}

inline double haversine_distance(Position a, Position b) {
  constexpr double rad = std::numbers::pi / 180.0;
  const double lat1 = a.coord2 * rad;
  const double lat2 = b.coord2 * rad;
  const double dlat = lat2 - lat1;
  const double dlon = (b.coord1 - a.coord1) * rad;
  const double s = std::sin(dlat / 2);
  const double t = std::sin(dlon / 2);
  const double h = s * s + std::cos(lat1) * std::cos(lat2) * t * t;
  return 2.0 * kMeanEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(h)));
}

/// Point positions and their dense pairwise distance matrix. Immutable.
class PointSet {
 public:
  PointSet(std::vector<Position> positions, DistanceMetric metric)
      : positions_(std::move(positions)), metric_(metric) {
    if (positions_.empty()) throw std::invalid_argument("point set must contain at least one point");
    for (std::size_t i = 0; i < positions_.size(); ++i) {
      const auto& p = positions_[i];
      if (std::isnan(p.coord1) || std::isnan(p.coord2) || std::isinf(p.coord1) ||
          std::isinf(p.coord2)) {
        throw std::invalid_argument("non-finite coordinate at point " + std::to_string(i));
      }
      if (metric_ == DistanceMetric::haversine_meters &&
          (p.coord1 < -180.0 || p.coord1 > 180.0 || p.coord2 < -90.0 || p.coord2 > 90.0)) {
        throw std::invalid_argument("longitude/latitude out of range at point " + std::to_string(i));
      }
    }
    const std::size_t n = positions_.size();
    dist_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = metric_ == DistanceMetric::euclidean
                             ? euclidean_distance(positions_[i], positions_[j])
                             : haversine_distance(positions_[i], positions_[j]);
        dist_[i * n + j] = d;
        dist_[j * n + i] = d;
      }
    }
  }

  std::size_t size() const noexcept { return positions_.size(); }
  DistanceMetric metric() const noexcept { return metric_; }
  const std::vector<Position>& positions() const noexcept { return positions_; }

  double distance(std::size_t i, std::size_t j) const { return dist_[i * positions_.size() + j]; }

  /// Mean over points of the distance to the nearest other point. Zero for a
  /// single point.
  double mean_nearest_neighbor_distance() const {
    const std::size_t n = size();
    if (n < 2) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = INFINITY;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) best = std::min(best, distance(i, j));
      }
      total += best;
    }
    return total / static_cast<double>(n);
  }

 private:
  std::vector<Position> positions_;
  DistanceMetric metric_;
  std::vector<double> dist_;
};

inline PointSet build_distance_matrix(std::vector<Position> positions, DistanceMetric metric) {
  return PointSet(std::move(positions), metric);
}

/// N x H matrix of traffic volumes (fractions of one BBU's capacity) for one
/// day. Row-major by point.
class TrafficDay {
 public:
  TrafficDay() = default;

  TrafficDay(std::size_t points, std::size_t hours, int day_index = 0)
      : points_(points), hours_(hours), day_index_(day_index), values_(points * hours, 0.0) {
    if (hours == 0) throw std::invalid_argument("traffic day needs at least one hour");
  }

  TrafficDay(std::size_t points, std::size_t hours, std::vector<double> values, int day_index = 0)
      : points_(points), hours_(hours), day_index_(day_index), values_(std::move(values)) {
    if (hours == 0) throw std::invalid_argument("traffic day needs at least one hour");
    if (values_.size() != points * hours) {
      throw std::invalid_argument("traffic matrix size does not match points x hours");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!(values_[k] >= 0.0) || std::isinf(values_[k])) {
        throw std::invalid_argument("traffic value must be finite and non-negative (point " +
                                    std::to_string(k / hours) + ", hour " +
                                    std::to_string(k % hours) + ")");
      }
    }
  }

  /// Builds a day from one row per point.
  static TrafficDay from_rows(const std::vector<std::vector<double>>& rows, int day_index = 0) {
    if (rows.empty()) throw std::invalid_argument("traffic day needs at least one point");
    const std::size_t hours = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * hours);
    for (const auto& r : rows) {
      if (r.size() != hours) throw std::invalid_argument("ragged traffic rows");
      values.insert(values.end(), r.begin(), r.end());
    }
    return TrafficDay(rows.size(), hours, std::move(values), day_index);
  }

  std::size_t points() const noexcept { return points_; }
  std::size_t hours() const noexcept { return hours_; }
  int day_index() const noexcept { return day_index_; }
  void set_day_index(int d) noexcept { day_index_ = d; }

  double at(std::size_t point, std::size_t hour) const { return values_[point * hours_ + hour]; }
  double& at(std::size_t point, std::size_t hour) { return values_[point * hours_ + hour]; }

  std::span<const double> row(std::size_t point) const {
    return {values_.data() + point * hours_, hours_};
  }
  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const TrafficDay& a, const TrafficDay& b) {
    return a.points_ == b.points_ && a.hours_ == b.hours_ && a.values_ == b.values_;
  }

 private:
  std::size_t points_ = 0;
  std::size_t hours_ = 0;
  int day_index_ = 0;
  std::vector<double> values_;
};

/// A candidate solution: one cluster label per point, labels contiguous in
/// [1, K]. Point indices are 0-based, labels 1-based.
class Clustering {
 public:
  Clustering() = default;

  /// Takes labels that must already be contiguous in [1, K]; throws otherwise.
  explicit Clustering(std::vector<int> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw std::invalid_argument("clustering must label at least one point");
    int k = 0;
    for (int l : labels_) {
      if (l < 1) throw std::invalid_argument("cluster labels must be >= 1");
      k = std::max(k, l);
    }
    std::vector<bool> seen(static_cast<std::size_t>(k) + 1, false);
    for (int l : labels_) seen[static_cast<std::size_t>(l)] = true;
    for (int l = 1; l <= k; ++l) {
      if (!seen[static_cast<std::size_t>(l)]) {
        throw std::invalid_argument("cluster labels are not contiguous: label " +
                                    std::to_string(l) + " is missing");
      }
    }
    k_ = k;
  }

  static Clustering singletons(std::size_t n) {
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i) + 1;
    return Clustering(std::move(labels));
  }

  std::size_t size() const noexcept { return labels_.size(); }
  int cluster_count() const noexcept { return k_; }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  /// Member lists for all clusters; entry k-1 holds cluster k, ascending.
  std::vector<std::vector<std::size_t>> groups() const {
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(k_));
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      out[static_cast<std::size_t>(labels_[i] - 1)].push_back(i);
    }
    return out;
  }

  friend bool operator==(const Clustering&, const Clustering&) = default;

 private:
  std::vector<int> labels_;
  int k_ = 0;
};

/// Order-preserving relabel of arbitrary positive labels to 1..K.
inline Clustering normalize_labels(std::span<const int> labels) {
  std::map<int, int> remap;
  for (int l : labels) {
    if (l < 1) throw std::invalid_argument("cluster labels must be >= 1");
    remap.emplace(l, 0);
  }
  int next = 1;
  for (auto& [from, to] : remap) to = next++;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(remap[l]);
  return Clustering(std::move(out));
}

inline Clustering normalize_labels(const Clustering& c) { return normalize_labels(c.labels()); }

/// Point indices carrying label k.
inline std::vector<std::size_t> members(const Clustering& c, int k) {
  if (k < 1 || k > c.cluster_count()) {
    throw std::out_of_range("cluster " + std::to_string(k) + " out of range [1, " +
                            std::to_string(c.cluster_count()) + "]");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.label(i) == k) out.push_back(i);
  }
  return out;
}

/// True iff every pair of points sharing a cluster is within tau.
inline bool is_feasible(const Clustering& c, const PointSet& points, double tau) {
  if (c.size() != points.size()) return false;
  for (const auto& group : c.groups()) {
    for (std::size_t a = 0; a < group.size(); ++a) {
      for (std::size_t b = a + 1; b < group.size(); ++b) {
        if (points.distance(group[a], group[b]) > tau) return false;
      }
    }
  }
  return true;
}

struct ProblemConfig {
  double w = 0.01;
  double tau = 1.0;
  std::size_t hours = 24;

  void validate() const {
    if (!(w > 0.0 && w <= 1.0)) throw std::invalid_argument("w must lie in (0, 1]");
    if (!(tau > 0.0) || std::isinf(tau)) throw std::invalid_argument("tau must be positive");
    if (hours == 0) throw std::invalid_argument("hours must be positive");
  }
};

}  // namespace splitea
