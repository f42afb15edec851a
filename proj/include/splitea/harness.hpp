#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "splitea/datasets.hpp"
#include "splitea/forecast.hpp"
#include "splitea/model.hpp"
#include "splitea/objective.hpp"
#include "splitea/solvers.hpp"
#include "splitea/stats.hpp"

namespace splitea {

enum class AlgorithmKind { split_ea, rand_ea, copy_ea, greedy };

struct AlgorithmSpec {
  std::string name;
  AlgorithmKind kind = AlgorithmKind::split_ea;
  EaConfig ea{};
  GreedyConfig greedy{};

  bool is_ea() const { return kind != AlgorithmKind::greedy; }

  /// Evaluations per day that count toward budget parity: popsize * maxgen
  /// for the EAs (the starting population is not counted), the budget for
  /// greedy.
  std::size_t budget() const { return is_ea() ? ea.generation_evaluations() : greedy.budget; }

  /// Evaluations per day a run actually performs.
  std::size_t evaluations_per_day() const {
    return is_ea() ? ea.popsize * (ea.maxgen + 1) : greedy.budget;
  }
};

inline AlgorithmSpec make_algorithm(std::string_view id) {
  AlgorithmSpec a;
  if (id == "splitea" || id == "SplitEA") {
    a = {"SplitEA", AlgorithmKind::split_ea};
    a.ea.variant = WarmStart::split;
  } else if (id == "randea" || id == "RandEA") {
    a = {"RandEA", AlgorithmKind::rand_ea};
    a.ea.variant = WarmStart::rand;
  } else if (id == "copyea" || id == "CopyEA") {
    a = {"CopyEA", AlgorithmKind::copy_ea};
    a.ea.variant = WarmStart::copy;
  } else if (id == "greedy" || id == "GreedyAlg") {
    a = {"GreedyAlg", AlgorithmKind::greedy};
  } else {
    throw std::invalid_argument("unknown algorithm: " + std::string(id));
  }
  return a;
}

enum class TauMode { absolute, mean_nn_3x };

inline TauMode parse_tau_mode(std::string_view s) {
  if (s == "absolute") return TauMode::absolute;
  if (s == "3x-mean-nn") return TauMode::mean_nn_3x;
  throw std::invalid_argument("unknown tau mode: " + std::string(s));
}

/// Absolute tau, or three times the mean nearest-neighbour distance. A
/// single point has no neighbour and falls back to the absolute value.
inline double resolve_tau(const PointSet& points, TauMode mode, double absolute_tau) {
  if (mode == TauMode::absolute || points.size() < 2) return absolute_tau;
  return 3.0 * points.mean_nearest_neighbor_distance();
}

struct ExperimentSpec {
  std::vector<AlgorithmSpec> algorithms;
  std::size_t runs = 30;
  std::string forecaster = "oracle";
  ProblemConfig problem{};
  std::uint64_t base_seed = 1;
  std::size_t workers = 1;
  bool allow_unequal_budgets = false;
  bool score_on_predicted = false;  // sensitivity mode: score on the forecast instead of actuals
  double alpha = 0.05;
};

/// Seed of run `run` of algorithm `name`.
inline std::uint64_t run_seed(std::uint64_t base_seed, std::string_view name, std::size_t run) {
  return base_seed ^ mix64(hash_name(name) + mix64(static_cast<std::uint64_t>(run)));
}

/// One deployed day of one run.
struct RunRecord {
  std::string algorithm;
  std::size_t run = 0;
  std::size_t day = 0;  // index of the day the solution serves
  std::uint64_t seed = 0;
  double w = 0.0;
  MetricsReport metrics;   // scored against the served day's traffic
  FitnessValue optimized;  // fitness on the traffic the solver optimized
  std::size_t evals_used = 0;
  std::size_t budget_evals = 0;  // evals_used minus uncounted starting-population evaluations
  std::vector<double> trace;
  std::vector<int> labels;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

inline constexpr double kIdentityTolerance = 1e-9;

/// Throws if the record's f or U decomposition does not hold.
inline void check_record_identities(const RunRecord& r) {
  const auto& m = r.metrics;
  if (std::abs(m.f - (r.w * m.K + m.U)) > kIdentityTolerance) {
    throw std::logic_error("f != w*K + U in record " + r.algorithm + " run " + std::to_string(r.run) +
                           " day " + std::to_string(r.day));
  }
  if (std::abs(m.U - (m.u_delay + m.u_under1)) > kIdentityTolerance) {
    throw std::logic_error("U != Udelay + Uunder1 in record " + r.algorithm + " run " +
                           std::to_string(r.run) + " day " + std::to_string(r.day));
  }
}

struct TableRow {
  std::string algorithm;
  MetricsReport mean;  // mean over runs of the per-run mean over days
  std::size_t runs = 0;
};

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"K", "U", "Udelay", "Uunder1", "f"};
  return names;
}

inline double metric_value(const MetricsReport& m, std::string_view name) {
  if (name == "K") return m.K;
  if (name == "U") return m.U;
  if (name == "Udelay") return m.u_delay;
  if (name == "Uunder1") return m.u_under1;
  if (name == "f") return m.f;
  throw std::invalid_argument("unknown metric: " + std::string(name));
}

struct ResultTable {
  std::vector<TableRow> rows;
  // Per metric; only present with at least 2 algorithms and 2 runs.
  std::map<std::string, ComparisonResult> comparisons;
  // Per metric and algorithm: significantly better than every other algorithm.
  std::map<std::string, std::vector<bool>> significant;

  const TableRow& row(std::string_view algorithm) const {
    for (const auto& r : rows) {
      if (r.algorithm == algorithm) return r;
    }
    throw std::out_of_range("no row for algorithm " + std::string(algorithm));
  }

  bool is_significantly_better(std::string_view metric, std::string_view algorithm) const {
    const auto it = significant.find(std::string(metric));
    if (it == significant.end()) return false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].algorithm == algorithm) return it->second[i];
    }
    return false;
  }
};

/// Aggregates records into a table. Algorithms keep their order of first
/// appearance; each run is averaged over its days before averaging runs.
inline ResultTable aggregate(const std::vector<RunRecord>& records, double alpha = 0.05) {
  std::vector<std::string> order;
  std::map<std::string, std::map<std::size_t, std::vector<const RunRecord*>>> by_alg;
  for (const auto& r : records) {
    check_record_identities(r);
    if (!by_alg.contains(r.algorithm)) order.push_back(r.algorithm);
    by_alg[r.algorithm][r.run].push_back(&r);
  }

  ResultTable table;
  std::vector<std::vector<MetricsReport>> per_run;  // [algorithm][run]
  for (const auto& name : order) {
    std::vector<MetricsReport> runs;
    for (const auto& [run, days] : by_alg[name]) {
      MetricsReport m;
      for (const auto* r : days) {
        m.K += r->metrics.K;
        m.U += r->metrics.U;
        m.u_delay += r->metrics.u_delay;
        m.u_under1 += r->metrics.u_under1;
        m.f += r->metrics.f;
      }
      const double nd = static_cast<double>(days.size());
      m.K /= nd;
      m.U /= nd;
      m.u_delay /= nd;
      m.u_under1 /= nd;
      m.f /= nd;
      runs.push_back(m);
    }
    TableRow row{name, {}, runs.size()};
    for (const auto& m : runs) {
      row.mean.K += m.K;
      row.mean.U += m.U;
      row.mean.u_delay += m.u_delay;
      row.mean.u_under1 += m.u_under1;
      row.mean.f += m.f;
    }
    const double rd = static_cast<double>(runs.size());
    row.mean.K /= rd;
    row.mean.U /= rd;
    row.mean.u_delay /= rd;
    row.mean.u_under1 /= rd;
    row.mean.f /= rd;
    table.rows.push_back(row);
    per_run.push_back(std::move(runs));
  }

  const std::size_t k = order.size();
  std::size_t n = SIZE_MAX;
  for (const auto& runs : per_run) n = std::min(n, runs.size());
  if (k < 2 || n < 2 || k > 10) return table;
  for (const auto& runs : per_run) {
    if (runs.size() != n) return table;  // unpaired design; no test
  }

  for (const auto& metric : metric_names()) {
    std::vector<std::vector<double>> obs(n, std::vector<double>(k));
    std::vector<double> means(k);
    for (std::size_t a = 0; a < k; ++a) {
      means[a] = metric_value(table.rows[a].mean, metric);
      for (std::size_t r = 0; r < n; ++r) obs[r][a] = metric_value(per_run[a][r], metric);
    }
    auto cmp = friedman_nemenyi(obs, order, alpha);
    std::vector<bool> marks(k, false);
    for (std::size_t a = 0; a < k; ++a) {
      bool all = true;
      for (std::size_t b = 0; b < k; ++b) {
        if (a != b && !cmp.significantly_better(a, b, means)) all = false;
      }
      marks[a] = all;
    }
    table.significant[metric] = std::move(marks);
    table.comparisons.emplace(metric, std::move(cmp));
  }
  return table;
}

struct ExperimentResult {
  ResultTable table;
  std::vector<RunRecord> records;  // ordered by (algorithm, run, day)
};

/// Every algorithm must spend the same number of budget evaluations per day,
/// unless the experiment allows otherwise.
inline void check_budget_parity(const ExperimentSpec& spec) {
  if (spec.allow_unequal_budgets || spec.algorithms.empty()) return;
  const std::size_t expected = spec.algorithms.front().budget();
  for (const auto& a : spec.algorithms) {
    if (a.budget() != expected) {
      throw std::invalid_argument("budget mismatch: " + a.name + " uses " + std::to_string(a.budget()) +
                                  " evaluations per day, " + spec.algorithms.front().name + " uses " +
                                  std::to_string(expected));
    }
  }
}

/// Runs every algorithm `runs` times over the dataset.
///
/// The forecaster supplies the traffic each day is optimized on; day t is
/// served by the solution optimized for it and scored against day t's real
/// traffic. The oracle serves every day; one-day-history forecasters start
/// at day 1.
inline ExperimentResult run_experiment(const Dataset& dataset, const ExperimentSpec& spec) {
  if (spec.algorithms.empty()) throw std::invalid_argument("no algorithms to run");
  if (spec.runs == 0) throw std::invalid_argument("runs must be positive");
  spec.problem.validate();
  if (spec.problem.hours != dataset.manifest.hours) {
    throw std::invalid_argument("configured hours do not match the dataset");
  }
  for (const auto& a : spec.algorithms) {
    a.is_ea() ? a.ea.validate() : a.greedy.validate();
  }
  check_budget_parity(spec);

  const auto forecaster = make_forecaster(spec.forecaster);
  const std::size_t first = forecaster->first_target();
  if (first >= dataset.traffic.size()) {
    throw std::invalid_argument("dataset has too few days for forecaster " + spec.forecaster);
  }
  std::vector<TrafficDay> estimates;
  for (std::size_t t = first; t < dataset.traffic.size(); ++t) {
    estimates.push_back(forecaster->predict(dataset.traffic, t));
  }

  const std::size_t jobs = spec.algorithms.size() * spec.runs;
  std::vector<std::vector<RunRecord>> slots(jobs);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      const auto& alg = spec.algorithms[job / spec.runs];
      const std::size_t run = job % spec.runs;
      const std::uint64_t seed = run_seed(spec.base_seed, alg.name, run);
      std::vector<DayResult> days;
      std::size_t uncounted = 0;
      if (alg.is_ea()) {
        EaConfig cfg = alg.ea;
        cfg.seed = seed;
        days = run_ea(dataset.points, estimates, cfg, spec.problem);
        uncounted = cfg.popsize;
      } else {
        GreedyConfig cfg = alg.greedy;
        cfg.seed = seed;
        days = run_greedy(dataset.points, estimates, cfg, spec.problem);
      }
      auto& out = slots[job];
      for (std::size_t i = 0; i < days.size(); ++i) {
        const std::size_t served = first + i;
        const TrafficDay& truth = spec.score_on_predicted ? estimates[i] : dataset.traffic[served];
        RunRecord r;
        r.algorithm = alg.name;
        r.run = run;
        r.day = served;
        r.seed = seed;
        r.w = spec.problem.w;
        r.metrics = metrics(days[i].best.solution, truth, spec.problem);
        r.optimized = days[i].best.fitness;
        r.evals_used = days[i].evals_used;
        r.budget_evals = days[i].evals_used - uncounted;
        r.trace = std::move(days[i].trace);
        r.labels = days[i].best.solution.labels();
        out.push_back(std::move(r));
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(spec.workers, jobs));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
  }

  ExperimentResult result;
  for (auto& s : slots) {
    for (auto& r : s) result.records.push_back(std::move(r));
  }
  for (const auto& r : result.records) {
    const auto& alg = *std::find_if(spec.algorithms.begin(), spec.algorithms.end(),
                                    [&](const AlgorithmSpec& a) { return a.name == r.algorithm; });
    if (r.evals_used != alg.evaluations_per_day() || r.budget_evals != alg.budget()) {
      throw std::logic_error(r.algorithm + " spent " + std::to_string(r.evals_used) +
                             " evaluations on day " + std::to_string(r.day) + ", expected " +
                             std::to_string(alg.evaluations_per_day()));
    }
  }
  result.table = aggregate(result.records, spec.alpha);
  return result;
}

// ---------------------------------------------------------------------------
// Persistence

inline nlohmann::json to_json(const RunRecord& r) {
  return {{"algorithm", r.algorithm},
          {"run", r.run},
          {"day", r.day},
          {"seed", r.seed},
          {"w", r.w},
          {"K", r.metrics.K},
          {"U", r.metrics.U},
          {"Udelay", r.metrics.u_delay},
          {"Uunder1", r.metrics.u_under1},
          {"f", r.metrics.f},
          {"optimized_f", r.optimized.f},
          {"optimized_K", r.optimized.K},
          {"optimized_U", r.optimized.u_mean},
          {"evals_used", r.evals_used},
          {"budget_evals", r.budget_evals},
          {"trace", r.trace},
          {"labels", r.labels}};
}

inline RunRecord run_record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.algorithm = j.at("algorithm").get<std::string>();
  r.run = j.at("run").get<std::size_t>();
  r.day = j.at("day").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.w = j.at("w").get<double>();
  r.metrics = {j.at("K").get<double>(), j.at("U").get<double>(), j.at("Udelay").get<double>(),
               j.at("Uunder1").get<double>(), j.at("f").get<double>()};
  r.optimized = {j.at("optimized_f").get<double>(), j.at("optimized_K").get<int>(),
                 j.at("optimized_U").get<double>()};
  r.evals_used = j.at("evals_used").get<std::size_t>();
  r.budget_evals = j.at("budget_evals").get<std::size_t>();
  r.trace = j.at("trace").get<std::vector<double>>();
  r.labels = j.at("labels").get<std::vector<int>>();
  return r;
}

/// Newline-delimited JSON, one object per (algorithm, run, day).
inline void write_records_ndjson(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : records) out << to_json(r).dump() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::vector<RunRecord> read_records_ndjson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<RunRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(run_record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path.string() + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

/// Long-form fitness curves: algorithm,run,day,generation,best_f. For greedy
/// the generation column is the checkpoint index.
inline void export_curves(const std::vector<RunRecord>& records, std::ostream& out) {
  out << "algorithm,run,day,generation,best_f\n";
  for (const auto& r : records) {
    for (std::size_t g = 0; g < r.trace.size(); ++g) {
      out << r.algorithm << ',' << r.run << ',' << r.day << ',' << g << ','
          << detail::format_double(r.trace[g]) << '\n';
    }
  }
}

inline void export_curves(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  export_curves(records, out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline std::string format_table(const ResultTable& table) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "metric";
  for (const auto& row : table.rows) os << std::right << std::setw(14) << row.algorithm;
  os << '\n';
  for (const auto& metric : metric_names()) {
    os << std::left << std::setw(10) << metric;
    for (std::size_t a = 0; a < table.rows.size(); ++a) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(metric == "K" ? 4 : 6)
           << metric_value(table.rows[a].mean, metric);
      if (table.is_significantly_better(metric, table.rows[a].algorithm)) cell << '*';
      os << std::right << std::setw(14) << cell.str();
    }
    os << '\n';
  }
  for (const auto& [metric, cmp] : table.comparisons) {
    os << "friedman " << metric << ": chi2=" << std::setprecision(6) << std::fixed
       << cmp.friedman_statistic << " p=" << std::scientific << std::setprecision(3) << cmp.p_value
       << " CD=" << std::fixed << std::setprecision(4) << cmp.critical_difference << " ranks=";
    for (std::size_t a = 0; a < cmp.mean_ranks.size(); ++a) {
      os << (a ? "/" : "") << std::setprecision(3) << cmp.mean_ranks[a];
    }
    os << '\n';
  }
  return os.str();
}

inline nlohmann::json to_json(const ResultTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t a = 0; a < table.rows.size(); ++a) {
    const auto& r = table.rows[a];
    nlohmann::json marks = nlohmann::json::object();
    for (const auto& metric : metric_names()) {
      marks[metric] = table.is_significantly_better(metric, r.algorithm);
    }
    rows.push_back({{"algorithm", r.algorithm},
                    {"runs", r.runs},
                    {"K", r.mean.K},
                    {"U", r.mean.U},
                    {"Udelay", r.mean.u_delay},
                    {"Uunder1", r.mean.u_under1},
                    {"f", r.mean.f},
                    {"significantly_better", marks}});
  }
  nlohmann::json tests = nlohmann::json::object();
  for (const auto& [metric, cmp] : table.comparisons) {
    tests[metric] = {{"algorithms", cmp.algorithms},
                     {"mean_ranks", cmp.mean_ranks},
                     {"friedman_statistic", cmp.friedman_statistic},
                     {"p_value", cmp.p_value},
                     {"critical_difference", cmp.critical_difference},
                     {"alpha", cmp.alpha},
                     {"pairwise_significant", cmp.pairwise_significant}};
  }
  return {{"rows", rows}, {"tests", tests}};
}

// ---------------------------------------------------------------------------
// Parameter sweeps

/// One experiment per value, all with the same seeds. Parameters: "w",
/// "tau" (absolute), "prob", and "G/popsize" (values like "150/10").
inline std::vector<ResultTable> sweep(const Dataset& dataset, const ExperimentSpec& base,
                                      std::string_view parameter, const std::vector<std::string>& values) {
  if (parameter != "w" && parameter != "tau" && parameter != "prob" && parameter != "G/popsize") {
    throw std::invalid_argument("cannot sweep parameter '" + std::string(parameter) +
                                "'; expected w, tau, prob or G/popsize");
  }
  std::vector<ResultTable> out;
  for (const auto& value : values) {
    ExperimentSpec spec = base;
    if (parameter == "G/popsize") {
      const auto slash = value.find('/');
      if (slash == std::string::npos) throw std::invalid_argument("G/popsize value must look like 150/10");
      const auto gens = std::stoul(value.substr(0, slash));
      const auto pop = std::stoul(value.substr(slash + 1));
      for (auto& a : spec.algorithms) {
        if (a.is_ea()) {
          a.ea.maxgen = gens;
          a.ea.popsize = pop;
        }
      }
    } else {
      const double v = std::stod(value);
      if (parameter == "w") spec.problem.w = v;
      if (parameter == "tau") spec.problem.tau = v;
      if (parameter == "prob") {
        for (auto& a : spec.algorithms) a.ea.prob = v;
      }
    }
    out.push_back(run_experiment(dataset, spec).table);
  }
  return out;
}

}  // namespace splitea
