#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitea {

/// Ascending fractional ranks starting at 1; tied values share the mean of
/// the ranks they span.
inline std::vector<double> rank_rows(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("cannot rank an empty row");
  for (double v : values) {
    if (std::isnan(v)) throw std::invalid_argument("cannot rank NaN");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1 .. j
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = shared;
    i = j;
  }
  return ranks;
}

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
/// Series expansion below x = a + 1, Lentz continued fraction above.
inline double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || std::isnan(x)) throw std::invalid_argument("invalid gamma arguments");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  constexpr int kMaxIter = 1000;
  constexpr double kEps = 1e-16;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxIter; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return 1.0 - sum * std::exp(log_prefix);
  }
  constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int n = 1; n < kMaxIter; ++n) {
    const double an = -n * (n - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_prefix) * h;
}

/// Upper tail P(X >= x) of a chi-square variable with `df` degrees of freedom.
inline double chi_square_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

/// Nemenyi critical value q_alpha for k algorithms (Studentized range over
/// sqrt 2, infinite degrees of freedom). Only alpha = 0.05 and 0.10 with
/// 2 <= k <= 10 are tabulated.
inline double nemenyi_q(double alpha, std::size_t k) {
  static constexpr std::array<double, 9> q05{1.960, 2.343, 2.569, 2.728, 2.850,
                                             2.949, 3.031, 3.102, 3.164};
  static constexpr std::array<double, 9> q10{1.645, 2.052, 2.291, 2.459, 2.589,
                                             2.693, 2.780, 2.855, 2.920};
  if (k < 2 || k > 10) throw std::invalid_argument("Nemenyi table covers 2..10 algorithms");
  if (std::abs(alpha - 0.05) < 1e-12) return q05[k - 2];
  if (std::abs(alpha - 0.10) < 1e-12) return q10[k - 2];
  throw std::invalid_argument("Nemenyi table covers alpha = 0.05 and 0.10 only");
}

struct ComparisonResult {
  std::vector<std::string> algorithms;
  std::vector<double> mean_ranks;
  double friedman_statistic = 0.0;
  double p_value = 1.0;
  double critical_difference = 0.0;
  double alpha = 0.05;
  std::vector<std::vector<bool>> pairwise_significant;  // symmetric, false diagonal

  /// Friedman rejects at alpha, the rank gap reaches the critical difference,
  /// and algorithm a has the lower raw mean.
  bool significantly_better(std::size_t a, std::size_t b, std::span<const double> raw_means) const {
    return p_value < alpha && pairwise_significant[a][b] && raw_means[a] < raw_means[b];
  }
};

/// Friedman test over `observations` (one row per run, one column per
/// algorithm; lower is better) with the Nemenyi post-hoc critical difference.
inline ComparisonResult friedman_nemenyi(const std::vector<std::vector<double>>& observations,
                                         std::vector<std::string> algorithms, double alpha = 0.05) {
  const std::size_t n = observations.size();
  if (n < 2) throw std::invalid_argument("Friedman test needs at least 2 observation rows");
  const std::size_t k = observations.front().size();
  if (k < 2) throw std::invalid_argument("Friedman test needs at least 2 algorithms");
  if (algorithms.size() != k) throw std::invalid_argument("algorithm names do not match column count");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");

  ComparisonResult out;
  out.algorithms = std::move(algorithms);
  out.alpha = alpha;
  out.mean_ranks.assign(k, 0.0);
  for (const auto& row : observations) {
    if (row.size() != k) throw std::invalid_argument("ragged observation matrix");
    const auto ranks = rank_rows(row);
    for (std::size_t j = 0; j < k; ++j) out.mean_ranks[j] += ranks[j];
  }
  for (auto& r : out.mean_ranks) r /= static_cast<double>(n);

  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  double sum_sq = 0.0;
  for (double r : out.mean_ranks) sum_sq += r * r;
  out.friedman_statistic =
      std::max(0.0, 12.0 * nd / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0));
  out.p_value = chi_square_sf(out.friedman_statistic, kd - 1.0);
  out.critical_difference = nemenyi_q(alpha, k) * std::sqrt(kd * (kd + 1.0) / (6.0 * nd));

  out.pairwise_significant.assign(k, std::vector<bool>(k, false));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      if (a != b) {
        out.pairwise_significant[a][b] =
            std::abs(out.mean_ranks[a] - out.mean_ranks[b]) >= out.critical_difference;
      }
    }
  }
  return out;
}

}  // namespace splitea
