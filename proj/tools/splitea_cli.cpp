#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "splitea/splitea.hpp"

namespace fs = std::filesystem;
using namespace splitea;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::size_t runs = 30;
  double w = 0.01;
  std::optional<double> tau;
  std::string tau_mode = "3x-mean-nn";
  std::string forecaster = "oracle";
  std::string out = "out";
};

struct RunOptions {
  std::string dataset;
  std::vector<std::string> algorithms{"splitea", "greedy"};
  std::size_t workers = 1;
  std::size_t popsize = 10;
  std::size_t maxgen = 150;
  double prob = 0.5;
  std::size_t budget = 1500;
  bool allow_unequal = false;
  bool score_on_predicted = false;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

ExperimentSpec build_spec(const GlobalOptions& g, const RunOptions& r, const Dataset& ds) {
  ExperimentSpec spec;
  for (const auto& id : r.algorithms) {
    auto a = make_algorithm(id);
    a.ea.popsize = r.popsize;
    a.ea.maxgen = r.maxgen;
    a.ea.prob = r.prob;
    a.greedy.budget = r.budget;
    a.greedy.checkpoint_interval = r.popsize;
    spec.algorithms.push_back(a);
  }
  spec.runs = g.runs;
  spec.forecaster = g.forecaster;
  spec.base_seed = g.seed;
  spec.workers = r.workers;
  spec.allow_unequal_budgets = r.allow_unequal;
  spec.score_on_predicted = r.score_on_predicted;
  spec.problem.w = g.w;
  spec.problem.hours = ds.manifest.hours;
  const auto mode = parse_tau_mode(g.tau_mode);
  if (mode == TauMode::absolute && !g.tau) throw std::invalid_argument("--tau-mode absolute needs --tau");
  spec.problem.tau = resolve_tau(ds.points, mode, g.tau.value_or(1.0));
  return spec;
}

void add_run_options(CLI::App* cmd, RunOptions& r) {
  cmd->add_option("--dataset", r.dataset, "Dataset directory (manifest.json, locations.csv, traffic.csv)")
      ->required();
  cmd->add_option("--algorithms", r.algorithms, "splitea, randea, copyea, greedy")->delimiter(',');
  cmd->add_option("--workers", r.workers, "Worker threads");
  cmd->add_option("--popsize", r.popsize, "EA population size");
  cmd->add_option("--maxgen", r.maxgen, "EA generations per day");
  cmd->add_option("--prob", r.prob, "Probability of mutating an isolated point first");
  cmd->add_option("--budget", r.budget, "Greedy evaluations per day");
  cmd->add_flag("--allow-unequal-budgets", r.allow_unequal, "Permit algorithms with different budgets");
  cmd->add_flag("--score-on-predicted", r.score_on_predicted,
                "Score deployed solutions on the forecast instead of the real traffic");
}

int cmd_run(const GlobalOptions& g, const RunOptions& r) {
  const auto ds = load_dataset_dir(r.dataset);
  const auto spec = build_spec(g, r, ds);
  const auto result = run_experiment(ds, spec);
  const fs::path out = g.out;
  fs::create_directories(out);
  write_records_ndjson(result.records, out / "records.ndjson");
  export_curves(result.records, out / "curves.csv");
  const auto text = format_table(result.table);
  write_text(out / "table.txt", text);
  write_text(out / "table.json", to_json(result.table).dump(2) + "\n");
  std::cout << ds.manifest.name << " (tau=" << spec.problem.tau << ", w=" << spec.problem.w
            << ", runs=" << spec.runs << ")\n"
            << text;
  return 0;
}

int cmd_sweep(const GlobalOptions& g, const RunOptions& r, const std::string& param,
              const std::vector<std::string>& values) {
  const auto ds = load_dataset_dir(r.dataset);
  const auto spec = build_spec(g, r, ds);
  const auto tables = sweep(ds, spec, param, values);
  const fs::path out = g.out;
  fs::create_directories(out);
  nlohmann::json all = nlohmann::json::array();
  std::string text;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    all.push_back({{"parameter", param}, {"value", values[i]}, {"table", to_json(tables[i])}});
    text += param + " = " + values[i] + "\n" + format_table(tables[i]) + "\n";
  }
  write_text(out / "sweep.json", all.dump(2) + "\n");
  write_text(out / "sweep.txt", text);
  std::cout << text;
  return 0;
}

int cmd_compare(const std::string& records_path, double alpha) {
  const auto records = read_records_ndjson(records_path);
  std::cout << format_table(aggregate(records, alpha));
  return 0;
}

int cmd_export_curves(const std::string& records_path, const std::string& out) {
  const auto records = read_records_ndjson(records_path);
  export_curves(records, fs::path(out));
  return 0;
}

int cmd_gen_dataset(const GlobalOptions& g, GeneratorParams p, const std::string& type) {
  const auto defaults = default_params(type);
  p.type = type;
  p.seed = g.seed;
  if (p.np == 0) p.np = defaults.np;
  if (p.n_groups == 0) p.n_groups = defaults.n_groups;
  const auto ds = generate_dataset(p);
  save_dataset(ds, g.out);
  std::cout << "wrote " << ds.manifest.name << " (" << ds.manifest.n_points << " points, "
            << ds.manifest.n_days << " days) to " << g.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Day-by-day BBU allocation: SplitEA, its ablations and a greedy baseline"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Base seed");
  app.add_option("--runs", g.runs, "Independent runs per algorithm");
  app.add_option("--w", g.w, "Weight of the cluster count in the fitness");
  app.add_option("--tau", g.tau, "Distance threshold (with --tau-mode absolute)");
  app.add_option("--tau-mode", g.tau_mode, "absolute or 3x-mean-nn")
      ->check(CLI::IsMember({"absolute", "3x-mean-nn"}));
  app.add_option("--forecaster", g.forecaster, "oracle or persistence")
      ->check(CLI::IsMember({"oracle", "persistence"}));
  app.add_option("--out", g.out, "Output directory or file");

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run an experiment and write records, table and curves");
  add_run_options(run, run_opts);

  RunOptions sweep_opts;
  std::string sweep_param;
  std::vector<std::string> sweep_values;
  auto* sw = app.add_subcommand("sweep", "Repeat an experiment over parameter values");
  add_run_options(sw, sweep_opts);
  sw->add_option("--param", sweep_param, "w, tau, prob or G/popsize")->required();
  sw->add_option("--values", sweep_values, "Comma-separated values, e.g. 75/20,150/10,300/5")
      ->required()
      ->delimiter(',');

  std::string records_path;
  double alpha = 0.05;
  auto* compare = app.add_subcommand("compare", "Aggregate stored run records with significance tests");
  compare->add_option("--records", records_path, "records.ndjson")->required();
  compare->add_option("--alpha", alpha, "Significance level (0.05 or 0.10)");

  std::string curves_records;
  auto* curves = app.add_subcommand("export-curves", "Write per-generation fitness curves as CSV");
  curves->add_option("--records", curves_records, "records.ndjson")->required();

  std::string type;
  GeneratorParams gen;
  gen.np = 0;
  gen.n_groups = 0;
  auto* gd = app.add_subcommand("gen-dataset", "Generate an artificial dataset");
  gd->add_option("--type", type, "1a, 2a, 2b, 3a, 1c-milan, 1c-songliao")
      ->required()
      ->check(CLI::IsMember({"1a", "2a", "2b", "3a", "1c-milan", "1c-songliao"}));
  gd->add_option("--days", gen.days, "Days");
  gd->add_option("--points", gen.n_points, "Points (types 1a, 1c)");
  gd->add_option("--groups", gen.n_groups, "Location groups (types 2a, 2b)");
  gd->add_option("--np", gen.np, "Maximum points per group (types 2a, 2b)");
  gd->add_option("--ng", gen.ng, "Gathered points (type 3a)");
  gd->add_option("--nt", gen.nt, "Total points (type 3a)");
  gd->add_option("--gen-tau", gen.tau, "Generation distance threshold (types 2, 3)");

  app.add_subcommand("table1", "Print the peak-entropy versus capacity-deviation comparison");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(g, run_opts);
    if (*sw) return cmd_sweep(g, sweep_opts, sweep_param, sweep_values);
    if (*compare) return cmd_compare(records_path, alpha);
    if (*curves) {
      return cmd_export_curves(curves_records, g.out == "out" ? std::string("curves.csv") : g.out);
    }
    if (*gd) return cmd_gen_dataset(g, gen, type);
    std::cout << format_legacy_report(evaluate_legacy_cases());
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
