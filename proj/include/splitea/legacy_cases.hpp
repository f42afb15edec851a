#pragma once

#include <cstddef>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "splitea/model.hpp"
#include "splitea/objective.hpp"

namespace splitea {

// Three-point, three-hour toy instances contrasting the capacity-deviation
// utility with the peak-entropy score. The first three overload a cluster of
// all points; the last three never exceed capacity.

struct LegacyCase {
  std::string name;
  TrafficDay traffic;
};

struct LegacyClusteringRow {
  std::string case_name;
  std::string clustering;                // e.g. "12, 3": points 1 and 2 share a cluster
  std::vector<double> one_minus_u;       // per cluster, in label order
  std::vector<double> entropy;           // per cluster, bits
  double mean_one_minus_u = 0.0;
  double mean_m = 0.0;                   // mean of (1 - U) * H
};

inline std::vector<LegacyCase> legacy_cases() {
  auto day = [](std::vector<std::vector<double>> rows) { return TrafficDay::from_rows(rows); };
  return {
      {"1", day({{0.8, 0.5, 0.3}, {0.2, 0.7, 0.1}, {0.2, 0.6, 0.7}})},
      {"2", day({{0.8, 0.5, 0.3}, {0.7, 0.2, 0.1}, {0.2, 0.6, 0.7}})},
      {"3", day({{0.8, 0.5, 0.3}, {0.7, 0.2, 0.1}, {0.7, 0.6, 0.2}})},
      {"4", day({{0.18, 0.15, 0.13}, {0.12, 0.17, 0.11}, {0.12, 0.16, 0.17}})},
      {"5", day({{0.18, 0.15, 0.13}, {0.17, 0.12, 0.11}, {0.12, 0.16, 0.17}})},
      {"6", day({{0.18, 0.15, 0.13}, {0.17, 0.12, 0.11}, {0.17, 0.16, 0.12}})},
  };
}

/// The five clusterings of three points, by name and labels.
inline std::vector<std::pair<std::string, Clustering>> legacy_clusterings() {
  return {
      {"12, 3", Clustering({1, 1, 2})},
      {"13, 2", Clustering({1, 2, 1})},
      {"1, 23", Clustering({1, 2, 2})},
      {"1, 2, 3", Clustering({1, 2, 3})},
      {"123", Clustering({1, 1, 1})},
  };
}

inline std::vector<LegacyClusteringRow> evaluate_legacy_cases() {
  std::vector<LegacyClusteringRow> rows;
  for (const auto& c : legacy_cases()) {
    for (const auto& [name, clustering] : legacy_clusterings()) {
      LegacyClusteringRow row{c.name, name, {}, {}, 0.0, 0.0};
      for (const auto& g : clustering.groups()) {
        row.one_minus_u.push_back(1.0 - cluster_utility(c.traffic, g));
        row.entropy.push_back(legacy_score(g, c.traffic).entropy_bits);
      }
      double sum = 0.0;
      for (double v : row.one_minus_u) sum += v;
      row.mean_one_minus_u = sum / static_cast<double>(row.one_minus_u.size());
      row.mean_m = legacy_mean_M(clustering, c.traffic);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline std::string format_legacy_report(const std::vector<LegacyClusteringRow>& rows) {
  std::ostringstream os;
  os << "dataset | clustering | 1-UC1 | HC1 | 1-UC2 | HC2 | 1-UC3 | HC3 | mean(1-U) | meanM\n";
  os << std::fixed << std::setprecision(3);
  for (const auto& r : rows) {
    os << r.case_name << " | " << r.clustering;
    for (std::size_t k = 0; k < 3; ++k) {
      if (k < r.one_minus_u.size()) {
        os << " | " << r.one_minus_u[k] << " | " << r.entropy[k];
      } else {
        os << " | NULL | NULL";
      }
    }
    os << " | " << r.mean_one_minus_u << " | " << r.mean_m << '\n';
  }
  return os.str();
}

}  // namespace splitea
