#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "splitea/model.hpp"
#include "splitea/rng.hpp"

namespace splitea {

struct BoundingBox {
  double min1 = 0.0;
  double max1 = 10.0;
  double min2 = 0.0;
  double max2 = 10.0;
};

/// Positions plus the group each position was generated in.
struct GroupedLocations {
  std::vector<Position> positions;
  std::vector<std::vector<std::size_t>> groups;
};

inline std::vector<Position> gen_locations_random(std::size_t n, const BoundingBox& box,
                                                  std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("need at least one point");
  if (!(box.max1 > box.min1) || !(box.max2 > box.min2)) {
    throw std::invalid_argument("bounding box is degenerate");
  }
  Rng rng(seed);
  std::vector<Position> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.uniform(box.min1, box.max1);
    const double b = rng.uniform(box.min2, box.max2);
    out.push_back({a, b});
  }
  return out;
}

namespace detail {

inline Position random_in_disc(Rng& rng, Position center, double radius) {
  const double r = radius * std::sqrt(rng.uniform());
  const double theta = 2.0 * std::numbers::pi * rng.uniform();
  return {center.coord1 + r * std::cos(theta), center.coord2 + r * std::sin(theta)};
}

inline constexpr int kMaxPlacementTries = 100000;

}  // namespace detail

/// Groups of 1..np points; every within-group distance is below tau and every
/// cross-group distance above it. Group centers are rejection-sampled more
/// than 2 tau apart and members scattered in a disc of radius 0.45 tau.
inline GroupedLocations gen_locations_cohesive(std::size_t n_groups, std::size_t np, double tau,
                                               std::uint64_t seed) {
  if (n_groups == 0 || np == 0) throw std::invalid_argument("need at least one group of one point");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  Rng rng(seed);
  const double side = 4.0 * tau * std::ceil(std::sqrt(static_cast<double>(n_groups)));
  std::vector<Position> centers;
  for (std::size_t g = 0; g < n_groups; ++g) {
    int tries = 0;
    for (;;) {
      if (++tries > detail::kMaxPlacementTries) {
        throw std::runtime_error("could not place group centers; packing failed");
      }
      const Position c{rng.uniform(0.0, side), rng.uniform(0.0, side)};
      const bool clear = std::all_of(centers.begin(), centers.end(), [&](Position o) {
        return euclidean_distance(c, o) > 2.0 * tau;
      });
      if (clear) {
        centers.push_back(c);
        break;
      }
    }
  }
  GroupedLocations out;
  for (const auto& c : centers) {
    const std::size_t size = rng.between(1, np);
    std::vector<std::size_t> group;
    for (std::size_t i = 0; i < size; ++i) {
      group.push_back(out.positions.size());
      out.positions.push_back(detail::random_in_disc(rng, c, 0.45 * tau));
    }
    out.groups.push_back(std::move(group));
  }

  std::vector<std::size_t> group_of(out.positions.size());
  for (std::size_t g = 0; g < out.groups.size(); ++g) {
    for (auto p : out.groups[g]) group_of[p] = g;
  }
  for (std::size_t i = 0; i < out.positions.size(); ++i) {
    for (std::size_t j = i + 1; j < out.positions.size(); ++j) {
      const double d = euclidean_distance(out.positions[i], out.positions[j]);
      const bool same = group_of[i] == group_of[j];
      if (same ? !(d < tau) : !(d > tau)) {
        throw std::runtime_error("cohesive layout violates the group distance constraints");
      }
    }
  }
  return out;
}

/// ng points packed in a disc of radius 0.05 tau, plus nt - ng scattered
/// points each more than tau from the core and from one another. The core
/// occupies indices [0, ng).
inline std::vector<Position> gen_locations_core_scatter(std::size_t ng, std::size_t nt, double tau,
                                                        std::uint64_t seed) {
  if (ng == 0 || ng > nt) throw std::invalid_argument("need 1 <= Ng <= Nt");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  Rng rng(seed);
  const std::size_t scattered = nt - ng;
  const double half = 2.0 * tau * std::ceil(std::sqrt(static_cast<double>(scattered + 1)));
  const Position center{half, half};
  std::vector<Position> out;
  out.reserve(nt);
  for (std::size_t i = 0; i < ng; ++i) out.push_back(detail::random_in_disc(rng, center, 0.05 * tau));
  for (std::size_t i = 0; i < scattered; ++i) {
    int tries = 0;
    for (;;) {
      if (++tries > detail::kMaxPlacementTries) {
        throw std::runtime_error("could not place scattered points; packing failed");
      }
      const Position p{rng.uniform(0.0, 2.0 * half), rng.uniform(0.0, 2.0 * half)};
      const bool clear = std::all_of(out.begin(), out.end(),
                                     [&](Position o) { return euclidean_distance(p, o) > tau; });
      if (clear) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

inline std::vector<TrafficDay> gen_traffic_random(std::size_t n, std::size_t days, std::size_t hours,
                                                  std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TrafficDay> out;
  for (std::size_t d = 0; d < days; ++d) {
    TrafficDay day(n, hours, static_cast<int>(d));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t h = 0; h < hours; ++h) day.at(i, h) = rng.open_uniform();
    }
    out.push_back(std::move(day));
  }
  return out;
}

struct KnownOptimumTraffic {
  std::vector<TrafficDay> traffic;
  Clustering optimum;  // every cluster sums to exactly 1.0 at every hour
};

/// Splits each location group into random sub-clusters of at most
/// max_subcluster points, then draws traffic so that each sub-cluster's
/// hourly load is exactly 1.0 when summed in ascending point order.
inline KnownOptimumTraffic gen_traffic_known_optimum(const GroupedLocations& layout, std::size_t days,
                                                     std::size_t hours, std::uint64_t seed,
                                                     std::size_t max_subcluster = 3) {
  if (max_subcluster == 0) throw std::invalid_argument("max_subcluster must be positive");
  Rng rng(seed);
  const std::size_t n = layout.positions.size();
  std::vector<int> labels(n, 0);
  std::vector<std::vector<std::size_t>> subclusters;
  for (auto group : layout.groups) {
    rng.shuffle(group);
    std::size_t at = 0;
    while (at < group.size()) {
      const std::size_t size = rng.between(1, std::min(max_subcluster, group.size() - at));
      std::vector<std::size_t> sub(group.begin() + static_cast<std::ptrdiff_t>(at),
                                   group.begin() + static_cast<std::ptrdiff_t>(at + size));
      std::sort(sub.begin(), sub.end());
      for (auto p : sub) labels[p] = static_cast<int>(subclusters.size()) + 1;
      subclusters.push_back(std::move(sub));
      at += size;
    }
  }

  KnownOptimumTraffic out{{}, normalize_labels(labels)};
  std::vector<double> weights;
  for (std::size_t d = 0; d < days; ++d) {
    TrafficDay day(n, hours, static_cast<int>(d));
    for (const auto& sub : subclusters) {
      for (std::size_t h = 0; h < hours; ++h) {
        weights.clear();
        double total = 0.0;
        for (std::size_t i = 0; i < sub.size(); ++i) {
          weights.push_back(0.1 + rng.uniform());
          total += weights.back();
        }
        double partial = 0.0;
        for (std::size_t i = 0; i + 1 < sub.size(); ++i) {
          day.at(sub[i], h) = weights[i] / total;
          partial += day.at(sub[i], h);
        }
        // Pin the last share so the ordered sum lands exactly on 1.0.
        double last = 1.0 - partial;
        while (partial + last > 1.0) last = std::nextafter(last, 0.0);
        while (partial + last < 1.0) last = std::nextafter(last, 2.0);
        day.at(sub.back(), h) = last;
      }
    }
    out.traffic.push_back(std::move(day));
  }
  return out;
}

enum class TrafficPattern { milan, songliao };

inline std::string_view to_string(TrafficPattern p) {
  return p == TrafficPattern::milan ? "milan" : "songliao";
}

inline TrafficPattern parse_traffic_pattern(std::string_view s) {
  if (s == "milan") return TrafficPattern::milan;
  if (s == "songliao") return TrafficPattern::songliao;
  throw std::invalid_argument("unknown traffic pattern: " + std::string(s));
}

/// Noise-free 24-hour daily profile with peak 1.0.
///
/// milan: falls over hours [0, turn], climbs to noon, holds for `plateau`
/// hours from noon, then falls. songliao: climbs over [0, turn], holds for
/// `plateau` hours, then falls.
inline std::vector<double> pattern_template(TrafficPattern pattern, std::size_t turn,
                                            std::size_t plateau) {
  constexpr std::size_t kHours = 24;
  std::vector<double> v(kHours);
  const auto t = static_cast<double>(turn);
  if (pattern == TrafficPattern::milan) {
    if (turn < 1 || turn >= 12 || plateau < 1 || 11 + plateau >= 23) {
      throw std::invalid_argument("milan template parameters out of range");
    }
    const double plateau_end = 11.0 + static_cast<double>(plateau);
    for (std::size_t h = 0; h < kHours; ++h) {
      const auto x = static_cast<double>(h);
      if (x <= t) {
        v[h] = 0.55 - 0.40 * (x / t);
      } else if (x <= 12.0) {
        v[h] = 0.15 + 0.85 * (x - t) / (12.0 - t);
      } else if (x <= plateau_end) {
        v[h] = 1.0;
      } else {
        v[h] = 1.0 - 0.60 * (x - plateau_end) / (23.0 - plateau_end);
      }
    }
  } else {
    if (turn < 1 || plateau < 1 || turn + plateau >= 23) {
      throw std::invalid_argument("songliao template parameters out of range");
    }
    const double plateau_end = t + static_cast<double>(plateau);
    for (std::size_t h = 0; h < kHours; ++h) {
      const auto x = static_cast<double>(h);
      if (x <= t) {
        v[h] = 0.20 + 0.80 * (x / t);
      } else if (x <= plateau_end) {
        v[h] = 1.0;
      } else {
        v[h] = 1.0 - 0.70 * (x - plateau_end) / (23.0 - plateau_end);
      }
    }
  }
  return v;
}

/// Per point and day: a template with random turn hour and plateau length
/// (milan: turn 5 or 6, plateau 5 or 6; songliao: turn 8 or 9, plateau 10 or
/// 11), scaled by a per-point amplitude in [0.1, 0.6] and by +/-3%
/// multiplicative noise, clipped to (0, 1]. Requires 24 hours per day.
inline std::vector<TrafficDay> gen_traffic_patterned(std::size_t n, std::size_t days, std::size_t hours,
                                                     TrafficPattern pattern, std::uint64_t seed) {
  if (hours != 24) throw std::invalid_argument("patterned traffic is defined for 24 hours per day");
  Rng rng(seed);
  std::vector<double> amplitude(n);
  for (auto& a : amplitude) a = rng.uniform(0.1, 0.6);
  const std::size_t turn_lo = pattern == TrafficPattern::milan ? 5 : 8;
  const std::size_t plateau_lo = pattern == TrafficPattern::milan ? 5 : 10;
  std::vector<TrafficDay> out;
  for (std::size_t d = 0; d < days; ++d) {
    TrafficDay day(n, hours, static_cast<int>(d));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t turn = turn_lo + rng.index(2);
      const std::size_t plateau = plateau_lo + rng.index(2);
      const auto shape = pattern_template(pattern, turn, plateau);
      for (std::size_t h = 0; h < hours; ++h) {
        const double noisy = amplitude[i] * shape[h] * rng.uniform(0.97, 1.03);
        day.at(i, h) = std::clamp(noisy, 1e-6, 1.0);
      }
    }
    out.push_back(std::move(day));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Named datasets

/// Everything needed to regenerate an artificial dataset bit-for-bit.
struct GeneratorParams {
  std::string type = "1a";  // 1a, 2a, 2b, 3a, 1c-milan, 1c-songliao
  std::uint64_t seed = 1;
  std::size_t days = 7;
  std::size_t hours = 24;
  std::size_t n_points = 120;  // types 1a / 1c
  BoundingBox box{};           // types 1a / 1c
  std::size_t n_groups = 40;   // types 2a / 2b
  std::size_t np = 5;          // types 2a / 2b
  std::size_t ng = 100;        // type 3a
  std::size_t nt = 158;        // type 3a
  double tau = 1.0;            // generation threshold for types 2 and 3
  std::size_t max_subcluster = 3;  // type 2b
};

inline GeneratorParams default_params(std::string_view type) {
  GeneratorParams p;
  p.type = std::string(type);
  if (type == "2b") {
    p.np = 10;
    p.n_groups = 32;
  }
  return p;
}

struct DatasetManifest {
  std::string name;
  std::size_t n_points = 0;
  std::size_t n_days = 0;
  std::size_t hours = 24;
  DistanceMetric metric = DistanceMetric::euclidean;
  std::optional<GeneratorParams> generator;  // set iff provenance is "generated"
  std::optional<std::vector<int>> known_optimum;
  std::optional<double> generator_tau;

  std::string provenance() const { return generator ? "generated" : "loaded"; }
};

struct Dataset {
  DatasetManifest manifest;
  PointSet points;
  std::vector<TrafficDay> traffic;
};

inline std::string dataset_name(const GeneratorParams& p) {
  if (p.type == "2a" || p.type == "2b") return p.type + "-Np=" + std::to_string(p.np);
  if (p.type == "3a") return "3a " + std::to_string(p.ng) + "/" + std::to_string(p.nt);
  return p.type;
}

inline Dataset generate_dataset(const GeneratorParams& p) {
  if (p.days == 0) throw std::invalid_argument("need at least one day");
  const std::uint64_t loc_seed = derive_seed(p.seed, 1);
  const std::uint64_t traffic_seed = derive_seed(p.seed, 2);
  DatasetManifest m;
  m.name = dataset_name(p);
  m.hours = p.hours;
  m.n_days = p.days;
  m.generator = p;

  std::vector<Position> positions;
  std::vector<TrafficDay> traffic;
  if (p.type == "1a" || p.type == "1c-milan" || p.type == "1c-songliao") {
    positions = gen_locations_random(p.n_points, p.box, loc_seed);
    if (p.type == "1a") {
      traffic = gen_traffic_random(positions.size(), p.days, p.hours, traffic_seed);
    } else {
      const auto pattern = p.type == "1c-milan" ? TrafficPattern::milan : TrafficPattern::songliao;
      traffic = gen_traffic_patterned(positions.size(), p.days, p.hours, pattern, traffic_seed);
    }
  } else if (p.type == "2a" || p.type == "2b") {
    auto layout = gen_locations_cohesive(p.n_groups, p.np, p.tau, loc_seed);
    m.generator_tau = p.tau;
    if (p.type == "2a") {
      traffic = gen_traffic_random(layout.positions.size(), p.days, p.hours, traffic_seed);
    } else {
      auto known = gen_traffic_known_optimum(layout, p.days, p.hours, traffic_seed, p.max_subcluster);
      traffic = std::move(known.traffic);
      m.known_optimum = known.optimum.labels();
    }
    positions = std::move(layout.positions);
  } else if (p.type == "3a") {
    positions = gen_locations_core_scatter(p.ng, p.nt, p.tau, loc_seed);
    m.generator_tau = p.tau;
    traffic = gen_traffic_random(positions.size(), p.days, p.hours, traffic_seed);
  } else {
    throw std::invalid_argument("unknown dataset type: " + p.type);
  }
  m.n_points = positions.size();
  return {std::move(m), PointSet(std::move(positions), DistanceMetric::euclidean), std::move(traffic)};
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const GeneratorParams& p) {
  return {{"type", p.type},
          {"seed", p.seed},
          {"days", p.days},
          {"hours", p.hours},
          {"n_points", p.n_points},
          {"box", {p.box.min1, p.box.max1, p.box.min2, p.box.max2}},
          {"n_groups", p.n_groups},
          {"np", p.np},
          {"ng", p.ng},
          {"nt", p.nt},
          {"tau", p.tau},
          {"max_subcluster", p.max_subcluster}};
}

inline GeneratorParams generator_params_from_json(const nlohmann::json& j) {
  GeneratorParams p;
  p.type = j.at("type").get<std::string>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.days = j.at("days").get<std::size_t>();
  p.hours = j.at("hours").get<std::size_t>();
  p.n_points = j.at("n_points").get<std::size_t>();
  const auto& box = j.at("box");
  p.box = {box.at(0).get<double>(), box.at(1).get<double>(), box.at(2).get<double>(),
           box.at(3).get<double>()};
  p.n_groups = j.at("n_groups").get<std::size_t>();
  p.np = j.at("np").get<std::size_t>();
  p.ng = j.at("ng").get<std::size_t>();
  p.nt = j.at("nt").get<std::size_t>();
  p.tau = j.at("tau").get<double>();
  p.max_subcluster = j.at("max_subcluster").get<std::size_t>();
  return p;
}

inline nlohmann::json to_json(const DatasetManifest& m) {
  nlohmann::json j = {{"name", m.name},
                      {"n_points", m.n_points},
                      {"n_days", m.n_days},
                      {"hours", m.hours},
                      {"distance_metric", std::string(to_string(m.metric))},
                      {"provenance", m.provenance()}};
  if (m.generator) j["generator_params"] = to_json(*m.generator);
  if (m.generator_tau) j["generator_tau"] = *m.generator_tau;
  if (m.known_optimum) j["known_optimum"] = *m.known_optimum;
  return j;
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
  DatasetManifest m;
  m.name = j.value("name", std::string{});
  m.n_points = j.value("n_points", std::size_t{0});
  m.n_days = j.value("n_days", std::size_t{0});
  m.hours = j.value("hours", std::size_t{24});
  m.metric = parse_distance_metric(j.value("distance_metric", std::string("euclidean")));
  if (j.contains("generator_params")) m.generator = generator_params_from_json(j["generator_params"]);
  if (j.contains("generator_tau")) m.generator_tau = j["generator_tau"].get<double>();
  if (j.contains("known_optimum")) m.known_optimum = j["known_optimum"].get<std::vector<int>>();
  return m;
}

namespace detail {

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                     : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_cell(std::string_view cell, const std::string& where) {
  cell = trim(cell);
  T value{};
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
    throw std::runtime_error(where + ": not a number: '" + std::string(cell) + "'");
  }
  return value;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

inline void expect_header(const std::vector<std::string>& lines, std::string_view header,
                          const std::filesystem::path& path) {
  if (lines.empty() || trim(lines.front()) != header) {
    throw std::runtime_error(path.string() + ": expected header '" + std::string(header) + "'");
  }
}

}  // namespace detail

inline void write_locations_csv(const std::filesystem::path& path, const PointSet& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "id,coord1,coord2\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points.positions()[i];
    out << i << ',' << detail::format_double(p.coord1) << ',' << detail::format_double(p.coord2) << '\n';
  }
}

inline void write_traffic_csv(const std::filesystem::path& path, const std::vector<TrafficDay>& traffic) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "day,hour,point_id,value\n";
  for (std::size_t d = 0; d < traffic.size(); ++d) {
    const auto& day = traffic[d];
    for (std::size_t h = 0; h < day.hours(); ++h) {
      for (std::size_t i = 0; i < day.points(); ++i) {
        out << d << ',' << h << ',' << i << ',' << detail::format_double(day.at(i, h)) << '\n';
      }
    }
  }
}

/// Writes manifest.json, locations.csv and traffic.csv into `dir`.
inline void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
    out << to_json(ds.manifest).dump(2) << '\n';
  }
  write_locations_csv(dir / "locations.csv", ds.points);
  write_traffic_csv(dir / "traffic.csv", ds.traffic);
}

/// Loads `id,coord1,coord2` locations and long-form `day,hour,point_id,value`
/// traffic. Every (day, hour, point) cell must appear exactly once and every
/// value must lie in [0, 1].
inline Dataset load_csv_dataset(const std::filesystem::path& locations_path,
                                const std::filesystem::path& traffic_path,
                                DistanceMetric metric = DistanceMetric::euclidean) {
  const auto loc_lines = detail::read_lines(locations_path);
  detail::expect_header(loc_lines, "id,coord1,coord2", locations_path);
  std::vector<Position> positions;
  std::map<long long, std::size_t> index_of;
  for (std::size_t r = 1; r < loc_lines.size(); ++r) {
    const std::string where = locations_path.string() + " line " + std::to_string(r + 1);
    const auto cells = detail::split_csv_line(loc_lines[r]);
    if (cells.size() != 3) throw std::runtime_error(where + ": expected 3 columns");
    const auto id = detail::parse_cell<long long>(cells[0], where + " column id");
    if (!index_of.emplace(id, positions.size()).second) {
      throw std::runtime_error(where + ": duplicate point id " + std::to_string(id));
    }
    positions.push_back({detail::parse_cell<double>(cells[1], where + " column coord1"),
                         detail::parse_cell<double>(cells[2], where + " column coord2")});
  }
  if (positions.empty()) throw std::runtime_error(locations_path.string() + ": no points");
  const std::size_t n = positions.size();

  struct Cell {
    std::size_t day, hour, point;
    double value;
  };
  const auto traffic_lines = detail::read_lines(traffic_path);
  detail::expect_header(traffic_lines, "day,hour,point_id,value", traffic_path);
  std::vector<Cell> cells;
  std::size_t days = 0;
  std::size_t hours = 0;
  for (std::size_t r = 1; r < traffic_lines.size(); ++r) {
    const std::string where = traffic_path.string() + " line " + std::to_string(r + 1);
    const auto parts = detail::split_csv_line(traffic_lines[r]);
    if (parts.size() != 4) throw std::runtime_error(where + ": expected 4 columns");
    const auto day = detail::parse_cell<std::size_t>(parts[0], where + " column day");
    const auto hour = detail::parse_cell<std::size_t>(parts[1], where + " column hour");
    const auto id = detail::parse_cell<long long>(parts[2], where + " column point_id");
    const auto value = detail::parse_cell<double>(parts[3], where + " column value");
    const auto it = index_of.find(id);
    if (it == index_of.end()) throw std::runtime_error(where + ": unknown point_id " + std::to_string(id));
    if (!(value >= 0.0 && value <= 1.0)) {
      throw std::runtime_error(where + " column value: traffic " + std::string(detail::trim(parts[3])) +
                               " outside [0, 1]");
    }
    cells.push_back({day, hour, it->second, value});
    days = std::max(days, day + 1);
    hours = std::max(hours, hour + 1);
  }
  if (cells.empty()) throw std::runtime_error(traffic_path.string() + ": no traffic rows");
  if (cells.size() != days * hours * n) {
    throw std::runtime_error(traffic_path.string() + ": expected " + std::to_string(days * hours * n) +
                             " rows for " + std::to_string(days) + " days x " + std::to_string(hours) +
                             " hours x " + std::to_string(n) + " points, found " +
                             std::to_string(cells.size()));
  }
  std::vector<std::vector<double>> values(days, std::vector<double>(n * hours, -1.0));
  for (const auto& c : cells) {
    double& slot = values[c.day][c.point * hours + c.hour];
    if (slot >= 0.0) {
      throw std::runtime_error(traffic_path.string() + ": duplicate cell day " + std::to_string(c.day) +
                               " hour " + std::to_string(c.hour) + " point " + std::to_string(c.point));
    }
    slot = c.value;
  }

  Dataset ds{{}, PointSet(std::move(positions), metric), {}};
  for (std::size_t d = 0; d < days; ++d) {
    ds.traffic.emplace_back(n, hours, std::move(values[d]), static_cast<int>(d));
  }
  ds.manifest.name = locations_path.parent_path().filename().string();
  ds.manifest.n_points = n;
  ds.manifest.n_days = days;
  ds.manifest.hours = hours;
  ds.manifest.metric = metric;
  return ds;
}

/// Loads a dataset directory. With a manifest, its metric and metadata are
/// used; without one the data is read as Euclidean.
inline Dataset load_dataset_dir(const std::filesystem::path& dir) {
  std::optional<DatasetManifest> manifest;
  if (std::filesystem::exists(dir / "manifest.json")) {
    std::ifstream in(dir / "manifest.json");
    manifest = manifest_from_json(nlohmann::json::parse(in));
  }
  auto ds = load_csv_dataset(dir / "locations.csv", dir / "traffic.csv",
                             manifest ? manifest->metric : DistanceMetric::euclidean);
  if (manifest) {
    if (manifest->n_points != ds.manifest.n_points || manifest->n_days != ds.manifest.n_days ||
        manifest->hours != ds.manifest.hours) {
      throw std::runtime_error(dir.string() + ": manifest shape disagrees with the CSV files");
    }
    ds.manifest = *manifest;
  }
  return ds;
}

}  // namespace splitea
