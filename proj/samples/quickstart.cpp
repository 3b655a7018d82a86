// Builds each backbone on one random deployment and prints a short summary.
#include <iostream>

#include "wsnvbt/wsnvbt.hpp"

int main() {
  using namespace wsnvbt;
  const RadioParams radio;
  const auto policy = EnergyPolicy::make(radio);
  const auto s = make_uniform_scenario(Field{}, 200, 35.0, 7, policy);

  const auto tree = build_mmevbt(s, radio, policy);
  std::cout << "mmevbt tree nodes: " << tree.tree_node_count() << '\n';

  const auto cover = build_min_cover(s, policy);
  std::cout << "greedy cover tree nodes: " << cover.tree_nodes.size() << '\n';

  SimConfig cfg;
  cfg.energy = policy;
  cfg.traffic.rounds_max = 2000;
  const auto r = run_simulation(s, cfg, 7);
  std::cout << "rounds: " << r.rounds_run << ", energy used: " << r.metrics.total_energy_consumed << " J\n";
}
