#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "splitea/model.hpp"
#include "splitea/objective.hpp"
#include "splitea/rng.hpp"

namespace splitea {

/// How the EA seeds day d+1 from the final population of day d.
enum class WarmStart {
  split,  // split one random cluster per individual (SplitEA)
  rand,   // fresh random population (RandEA)
  copy,   // carry the population over unchanged (CopyEA)
};

inline std::string_view to_string(WarmStart v) {
  switch (v) {
    case WarmStart::split: return "split";
    case WarmStart::rand: return "rand";
    case WarmStart::copy: return "copy";
  }
  return "?";
}

inline WarmStart parse_warm_start(std::string_view s) {
  if (s == "split") return WarmStart::split;
  if (s == "rand") return WarmStart::rand;
  if (s == "copy") return WarmStart::copy;
  throw std::invalid_argument("unknown EA variant: " + std::string(s));
}

struct EaConfig {
  std::size_t popsize = 10;
  std::size_t maxgen = 150;
  double prob = 0.5;  // chance of mutating an isolated point first
  WarmStart variant = WarmStart::split;
  std::uint64_t seed = 0;

  /// Evaluations spent by the generational loop, excluding the evaluation of
  /// each day's starting population.
  std::size_t generation_evaluations() const { return popsize * maxgen; }

  void validate() const {
    if (popsize == 0) throw std::invalid_argument("popsize must be positive");
    if (maxgen == 0) throw std::invalid_argument("maxgen must be positive");
    if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("prob must lie in [0, 1]");
  }
};

struct GreedyConfig {
  std::size_t budget = 1500;
  std::size_t checkpoint_interval = 10;
  std::uint64_t seed = 0;

  void validate() const {
    if (budget == 0) throw std::invalid_argument("greedy budget must be positive");
    if (checkpoint_interval == 0) throw std::invalid_argument("checkpoint interval must be positive");
  }
};

struct Individual {
  Clustering solution;
  FitnessValue fitness;
};

using Population = std::vector<Individual>;

struct DayResult {
  Individual best;
  std::vector<double> trace;  // best f per generation (EA) or per checkpoint (greedy)
  std::size_t evals_used = 0;
};

/// Called with every solution a solver constructs. Used for instrumentation.
using SolutionObserver = std::function<void(const Clustering&)>;

namespace detail {

inline bool within_all(const PointSet& pts, double tau, std::size_t x,
                       std::span<const std::size_t> others) {
  return std::all_of(others.begin(), others.end(),
                     [&](std::size_t o) { return pts.distance(x, o) <= tau; });
}

}  // namespace detail

/// Builds one random feasible clustering: repeatedly seed a cluster at a
/// random unclustered point and group a random number of its unclustered
/// neighbours with it. Neighbours are admitted in random order and skipped if
/// they would break the pairwise distance limit.
inline Clustering random_clustering(const PointSet& pts, double tau, Rng& rng) {
  const std::size_t n = pts.size();
  std::vector<int> labels(n, 0);
  std::vector<std::size_t> open(n);
  for (std::size_t i = 0; i < n; ++i) open[i] = i;
  int next_label = 1;
  std::vector<std::size_t> close;
  std::vector<std::size_t> cluster;
  while (!open.empty()) {
    const std::size_t seed_point = open[rng.index(open.size())];
    close.clear();
    for (auto p : open) {
      if (p != seed_point && pts.distance(seed_point, p) <= tau) close.push_back(p);
    }
    const std::size_t take = rng.between(0, close.size());
    rng.shuffle(close);
    cluster.assign(1, seed_point);
    for (std::size_t i = 0; i < take; ++i) {
      if (detail::within_all(pts, tau, close[i], cluster)) cluster.push_back(close[i]);
    }
    for (auto p : cluster) labels[p] = next_label;
    ++next_label;
    std::erase_if(open, [&](std::size_t p) { return labels[p] != 0; });
  }
  return Clustering(std::move(labels));
}

inline std::vector<Clustering> initial_pop(const PointSet& pts, double tau, std::size_t popsize,
                                           Rng& rng) {
  std::vector<Clustering> out;
  out.reserve(popsize);
  for (std::size_t j = 0; j < popsize; ++j) out.push_back(random_clustering(pts, tau, rng));
  return out;
}

/// Produces one feasible offspring from a feasible parent.
///
/// A point x is chosen (an isolated one with probability prob, if any exist).
/// If some other cluster lies entirely within tau of x, x joins one of them
/// at random. Otherwise a random adjacent cluster donates a random non-empty
/// subset of its members near x, and those form a new cluster with x. When no
/// other cluster has a member within tau of x, x is isolated.
inline Clustering mutate(const Clustering& parent, const PointSet& pts, double tau, double prob,
                         Rng& rng) {
  const std::size_t n = parent.size();
  const int k = parent.cluster_count();
  const auto groups = parent.groups();

  std::vector<std::size_t> isolated;
  for (const auto& g : groups) {
    if (g.size() == 1) isolated.push_back(g.front());
  }
  const double draw = rng.uniform();
  const std::size_t x = (draw < prob && !isolated.empty()) ? rng.pick(isolated) : rng.index(n);
  const int own = parent.label(x);

  std::vector<int> joinable;
  std::vector<int> adjacent;
  for (int label = 1; label <= k; ++label) {
    if (label == own) continue;
    const auto& g = groups[static_cast<std::size_t>(label - 1)];
    std::size_t near = 0;
    for (auto m : g) near += pts.distance(x, m) <= tau ? 1 : 0;
    if (near == g.size()) joinable.push_back(label);
    if (near > 0) adjacent.push_back(label);
  }

  std::vector<int> labels = parent.labels();
  if (!joinable.empty()) {
    labels[x] = rng.pick(joinable);
    return normalize_labels(labels);
  }
  if (adjacent.empty()) {
    if (groups[static_cast<std::size_t>(own - 1)].size() == 1) return parent;
    labels[x] = k + 1;
    return normalize_labels(labels);
  }

  const auto& donor = groups[static_cast<std::size_t>(rng.pick(adjacent) - 1)];
  std::vector<std::size_t> close;
  for (auto m : donor) {
    if (pts.distance(x, m) <= tau) close.push_back(m);
  }
  rng.shuffle(close);
  std::vector<std::size_t> pulled;
  for (auto m : close) {
    if (detail::within_all(pts, tau, m, pulled)) pulled.push_back(m);
  }
  // The donor keeps at least one member, so no label disappears through it.
  if (pulled.size() >= donor.size()) pulled.resize(donor.size() - 1);
  pulled.resize(rng.between(1, pulled.size()));

  labels[x] = k + 1;
  for (auto m : pulled) labels[m] = k + 1;
  return normalize_labels(labels);
}

/// Splits one random multi-point cluster in two: a random subset of size in
/// [1, floor(|C|/2)] moves to label K+1. All-singleton input is returned as is.
inline Clustering split_cluster(const Clustering& c, Rng& rng) {
  const auto groups = c.groups();
  std::vector<int> splittable;
  for (std::size_t j = 0; j < groups.size(); ++j) {
    if (groups[j].size() > 1) splittable.push_back(static_cast<int>(j) + 1);
  }
  if (splittable.empty()) return c;
  auto members = groups[static_cast<std::size_t>(rng.pick(splittable) - 1)];
  const std::size_t moved = rng.between(1, members.size() / 2);
  rng.shuffle(members);
  std::vector<int> labels = c.labels();
  for (std::size_t i = 0; i < moved; ++i) labels[members[i]] = c.cluster_count() + 1;
  return Clustering(std::move(labels));
}

inline std::vector<Clustering> split_population(std::span<const Individual> population, Rng& rng) {
  std::vector<Clustering> out;
  out.reserve(population.size());
  for (const auto& ind : population) out.push_back(split_cluster(ind.solution, rng));
  return out;
}

namespace detail {

// Stable sort by ascending f: on ties the earlier individual wins.
inline void truncate_select(Population& pool, std::size_t keep) {
  std::stable_sort(pool.begin(), pool.end(), [](const Individual& a, const Individual& b) {
    return a.fitness.f < b.fitness.f;
  });
  pool.resize(keep);
}

}  // namespace detail

/// Runs the day-by-day evolutionary optimizer over the given traffic (already
/// forecast by the caller). Day d draws from RNG stream derive_seed(seed, d).
///
/// Per day it evaluates the starting population (popsize evaluations), then
/// runs maxgen generations of mutation plus (mu + lambda) truncation, for
/// popsize * (maxgen + 1) evaluations in total.
inline std::vector<DayResult> run_ea(const PointSet& pts, std::span<const TrafficDay> days,
                                     const EaConfig& cfg, const ProblemConfig& problem,
                                     const SolutionObserver& observe = {}) {
  cfg.validate();
  problem.validate();
  std::vector<DayResult> results;
  results.reserve(days.size());
  Population population;

  for (std::size_t d = 0; d < days.size(); ++d) {
    const TrafficDay& traffic = days[d];
    Rng rng(derive_seed(cfg.seed, d));

    std::vector<Clustering> start;
    if (d == 0 || cfg.variant == WarmStart::rand) {
      start = initial_pop(pts, problem.tau, cfg.popsize, rng);
    } else if (cfg.variant == WarmStart::split) {
      start = split_population(population, rng);
    } else {
      for (auto& ind : population) start.push_back(std::move(ind.solution));
    }

    DayResult day;
    population.clear();
    for (auto& c : start) {
      if (observe) observe(c);
      auto f = fitness(c, traffic, problem);
      population.push_back({std::move(c), f});
      ++day.evals_used;
    }
    detail::truncate_select(population, cfg.popsize);
    day.trace.push_back(population.front().fitness.f);

    Population pool;
    for (std::size_t gen = 0; gen < cfg.maxgen; ++gen) {
      pool = population;
      for (const auto& parent : population) {
        auto child = mutate(parent.solution, pts, problem.tau, cfg.prob, rng);
        if (observe) observe(child);
        auto f = fitness(child, traffic, problem);
        pool.push_back({std::move(child), f});
        ++day.evals_used;
      }
      detail::truncate_select(pool, cfg.popsize);
      population.swap(pool);
      day.trace.push_back(population.front().fitness.f);
    }
    day.best = population.front();
    results.push_back(std::move(day));
  }
  return results;
}

/// Greedy baseline. Each day restarts from all singletons and spends exactly
/// `budget` fitness evaluations. Each step picks a random point x and
/// evaluates leaving it in place plus every feasible move into another
/// cluster, then commits the strictly best candidate.
///
/// The starting solution's fitness is computed for reporting only and is not
/// charged. The trace holds the committed f at every multiple of
/// checkpoint_interval evaluations (recorded once the step containing it has
/// committed), starting at zero evaluations.
inline std::vector<DayResult> run_greedy(const PointSet& pts, std::span<const TrafficDay> days,
                                         const GreedyConfig& cfg, const ProblemConfig& problem,
                                         const SolutionObserver& observe = {}) {
  cfg.validate();
  problem.validate();
  const std::size_t n = pts.size();
  std::vector<DayResult> results;
  results.reserve(days.size());

  for (std::size_t d = 0; d < days.size(); ++d) {
    const TrafficDay& traffic = days[d];
    Rng rng(derive_seed(cfg.seed, d));
    DayResult day;
    Individual current{Clustering::singletons(n), {}};
    if (observe) observe(current.solution);
    current.fitness = fitness(current.solution, traffic, problem);
    day.trace.push_back(current.fitness.f);

    while (day.evals_used < cfg.budget) {
      const std::size_t x = rng.index(n);
      const int own = current.solution.label(x);
      const auto groups = current.solution.groups();

      std::vector<int> targets{own};
      for (int label = 1; label <= current.solution.cluster_count(); ++label) {
        if (label != own &&
            detail::within_all(pts, problem.tau, x, groups[static_cast<std::size_t>(label - 1)])) {
          targets.push_back(label);
        }
      }

      Individual best = current;
      std::size_t checkpoints = 0;
      for (int target : targets) {
        if (day.evals_used >= cfg.budget) break;
        Clustering candidate = current.solution;
        if (target != own) {
          std::vector<int> labels = current.solution.labels();
          labels[x] = target;
          candidate = normalize_labels(labels);
        }
        if (observe) observe(candidate);
        auto f = fitness(candidate, traffic, problem);
        ++day.evals_used;
        if (f.f < best.fitness.f) best = {std::move(candidate), f};
        if (day.evals_used % cfg.checkpoint_interval == 0) ++checkpoints;
      }
      current = std::move(best);
      day.trace.insert(day.trace.end(), checkpoints, current.fitness.f);
    }
    day.best = std::move(current);
    results.push_back(std::move(day));
  }
  return results;
}

}  // namespace splitea
