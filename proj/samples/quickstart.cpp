// Generate a small dataset, run SplitEA against the greedy baseline and print
// the comparison table.
#include <iostream>

#include "splitea/splitea.hpp"

int main() {
  using namespace splitea;

  auto params = default_params("1c-milan");
  params.n_points = 40;
  params.days = 3;
  params.seed = 7;
  const Dataset ds = generate_dataset(params);

  ExperimentSpec spec;
  spec.algorithms = {make_algorithm("splitea"), make_algorithm("greedy")};
  spec.runs = 5;
  spec.problem.tau = resolve_tau(ds.points, TauMode::mean_nn_3x, 1.0);

  const auto result = run_experiment(ds, spec);
  std::cout << ds.manifest.name << ", tau = " << spec.problem.tau << '\n' << format_table(result.table);
}
