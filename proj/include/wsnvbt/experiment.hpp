#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wsnvbt/balanced.hpp"
#include "wsnvbt/config.hpp"
#include "wsnvbt/min_cover.hpp"
#include "wsnvbt/mmevbt.hpp"
#include "wsnvbt/scenario_io.hpp"
#include "wsnvbt/simulation.hpp"
#include "wsnvbt/text.hpp"

namespace wsnvbt {

/// Seed of deployment attempt `attempt` at sensing range `range`:
/// base_seed + splitmix64((round(range * 1000) << 32) ^ attempt), wrapping mod 2^64.
inline std::uint64_t attempt_seed(std::uint64_t base_seed, double range, std::uint64_t attempt) {
  const auto milli = static_cast<std::uint64_t>(std::llround(range * 1000.0));
  return base_seed + splitmix64((milli << 32) ^ attempt);
}

inline Scenario deploy_scenario(const ExperimentConfig& c, double range, std::uint64_t seed) {
  const auto policy = c.energy_policy();
  Scenario s;
  s.field = c.field;
  s.sensing_range = range;
  s.rng_seed = seed;
  s.nodes = c.deploy == DeployMode::Clustered ? deploy_clustered(c.field, c.n_nodes, c.clusters, c.cluster_sigma, seed, policy)
                                              : deploy_uniform(c.field, c.n_nodes, seed, policy);
  return s;
}

/// Tree-node count of the configured construction, or nullopt when it fails.
/// MMEVBT counts nodes with children; the other algorithms use the greedy cover.
inline std::optional<std::size_t> construct_tree_nodes(const ExperimentConfig& c, const Scenario& s) {
  const auto policy = c.energy_policy();
  try {
    if (c.algorithm == Algorithm::Mmevbt) return build_mmevbt(s, c.radio, policy).tree_node_count();
    return build_min_cover(s, policy).tree_nodes.size();
  } catch (const ConstructionFailed&) {
    return std::nullopt;
  }
}

struct AttemptRecord {
  std::uint64_t seed = 0;
  double range = 0.0;
  std::size_t attempt = 0;
  std::optional<std::size_t> tree_nodes;  // empty on failure
};

struct SweepRow {
  double range = 0.0;
  std::size_t attempts = 0;
  std::size_t successes = 0;
  std::size_t failures = 0;
  double mean_tree_nodes = 0.0;  // NaN when nothing succeeded
  bool exhausted = false;

  double failure_rate() const { return attempts ? static_cast<double>(failures) / static_cast<double>(attempts) : 0.0; }
  double success_rate() const { return attempts ? static_cast<double>(successes) / static_cast<double>(attempts) : 0.0; }
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<AttemptRecord> attempts;
};

/// For each range, redeploys with fresh seeds until target_successes
/// constructions succeed or max_attempts is spent (then `exhausted`).
inline SweepResult run_sweep(const ExperimentConfig& c) {
  c.validate();
  SweepResult out;
  for (double range : c.ranges) {
    SweepRow row;
    row.range = range;
    double sum = 0.0;
    while (row.successes < c.target_successes && row.attempts < c.max_attempts) {
      const std::size_t k = row.attempts++;
      const auto seed = attempt_seed(c.base_seed, range, k);
      const auto count = construct_tree_nodes(c, deploy_scenario(c, range, seed));
      out.attempts.push_back({seed, range, k, count});
      if (count) {
        ++row.successes;
        sum += static_cast<double>(*count);
      } else {
        ++row.failures;
      }
    }
    row.exhausted = row.successes < c.target_successes;
    row.mean_tree_nodes = row.successes ? sum / static_cast<double>(row.successes) : std::nan("");
    out.rows.push_back(row);
  }
  return out;
}

inline SweepResult sweep_figure3(ExperimentConfig c) { return run_sweep(c); }

inline SweepResult sweep_figure4(ExperimentConfig c) {
  if (c.algorithm == Algorithm::Mmevbt) c.algorithm = Algorithm::MinCoverBestParent;
  return run_sweep(c);
}

/// Fraction of `attempts` fixed-seed deployments at `range` whose construction succeeds.
inline double construction_success_rate(const ExperimentConfig& c, double range, std::size_t attempts) {
  std::size_t ok = 0;
  for (std::size_t k = 0; k < attempts; ++k) {
    ok += construct_tree_nodes(c, deploy_scenario(c, range, attempt_seed(c.base_seed, range, k))).has_value();
  }
  return static_cast<double>(ok) / static_cast<double>(attempts);
}

// ---------------------------------------------------------------------------
// CSV output

inline void write_csv_header(std::ostream& os, const ExperimentConfig& c, std::string_view what,
                             std::optional<std::uint64_t> seed = std::nullopt) {
  os << "# " << what << '\n';
  if (seed) os << "# seed = " << *seed << '\n';
  write_config(os, c, "# ");
}

namespace detail {
inline std::string opt_count(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "NA"; }
inline std::string real(double v) { return std::isnan(v) ? "NA" : text::format_double(v); }
}  // namespace detail

inline void write_sweep_csv(std::ostream& os, const ExperimentConfig& c, const SweepResult& r, std::string_view what) {
  write_csv_header(os, c, what);
  os << "range,attempts,successes,failures,failure_rate,mean_tree_nodes,exhausted\n";
  for (const auto& row : r.rows) {
    os << detail::real(row.range) << ',' << row.attempts << ',' << row.successes << ',' << row.failures << ','
       << detail::real(row.failure_rate()) << ',' << detail::real(row.mean_tree_nodes) << ','
       << (row.exhausted ? "exhausted" : "") << '\n';
  }
}

inline void write_attempts_csv(std::ostream& os, const ExperimentConfig& c, const SweepResult& r,
                               std::string_view what) {
  write_csv_header(os, c, what);
  os << "scenario_seed,range,n_tree_nodes,failed\n";
  for (const auto& a : r.attempts) {
    os << a.seed << ',' << detail::real(a.range) << ',' << detail::opt_count(a.tree_nodes) << ','
       << (a.tree_nodes ? 0 : 1) << '\n';
  }
}

inline void write_metrics_csv(std::ostream& os, const ExperimentConfig& c, std::uint64_t seed, const Scenario& s,
                              const LifetimeMetrics& m) {
  write_csv_header(os, c, "lifetime metrics", seed);
  os << "seed,algorithm,range,n_nodes,first_death,disconnect,reconstructions,total_energy_J\n";
  os << seed << ',' << to_string(c.algorithm) << ',' << detail::real(s.sensing_range) << ',' << s.nodes.size() << ','
     << detail::opt_count(m.first_node_death_round) << ',' << detail::opt_count(m.rounds_until_disconnect) << ','
     << m.reconstructions << ',' << detail::real(m.total_energy_consumed) << '\n';
}

inline void write_alive_csv(std::ostream& os, const ExperimentConfig& c, std::uint64_t seed, const LifetimeMetrics& m) {
  write_csv_header(os, c, "alive fraction curve", seed);
  os << "seed,round,alive_fraction\n";
  for (const auto& [round, frac] : m.alive_fraction_curve) os << seed << ',' << round << ',' << detail::real(frac) << '\n';
}

inline void write_events_csv(std::ostream& os, const ExperimentConfig& c, std::uint64_t seed,
                             const std::vector<TraceEvent>& events) {
  write_csv_header(os, c, "backbone change events", seed);
  os << "round,event,node,detail\n";
  for (const auto& e : events) {
    os << e.round << ',' << to_string(e.kind) << ',' << (e.node ? std::to_string(e.node->index) : "") << ','
       << e.detail << '\n';
  }
}

/// Load figures for the balanced backbone built on the initial scenario.
struct LoadReport {
  LoadStats realized;             // one selection round
  std::size_t mc_optimal = 0;
  double mc_probabilistic_mean = 0.0;
};

inline LoadReport balanced_load_report(const Scenario& scenario, const ExperimentConfig& c, std::uint64_t seed) {
  auto cfg = c.sim_config();
  cfg.algorithm = Algorithm::BalancedProbabilistic;
  Scenario s = scenario;
  reset_statuses(s.nodes, cfg.energy);
  detail::Router router(cfg);
  router.rebuild(s);
  const auto problem = router.forwarding().problem();
  LoadReport r;
  Rng rng(splitmix64(seed ^ 0xbb67ae8584caa73bULL));
  r.realized = load_stats(problem, realize_selection(problem, rng));
  r.mc_optimal = min_max_load_exact(problem).mc;
  double sum = 0.0;
  for (std::size_t k = 0; k < c.load_samples; ++k) sum += static_cast<double>(load_stats(problem, realize_selection(problem, rng)).mc);
  r.mc_probabilistic_mean = c.load_samples ? sum / static_cast<double>(c.load_samples) : 0.0;
  return r;
}

inline void write_loads_csv(std::ostream& os, const ExperimentConfig& c, std::uint64_t seed, const LoadReport& r) {
  write_csv_header(os, c, "per-tree-node loads", seed);
  os << "tree_node_id,realized_count,expected_count\n";
  for (std::size_t k = 0; k < r.realized.tree_nodes.size(); ++k) {
    os << r.realized.tree_nodes[k].index << ',' << r.realized.count[k] << ','
       << detail::real(r.realized.expected_count[k]) << '\n';
  }
}

inline void write_mc_csv(std::ostream& os, const ExperimentConfig& c, std::uint64_t seed, const LoadReport& r) {
  write_csv_header(os, c, "min-max load", seed);
  os << "mc_optimal,mc_probabilistic_mean\n" << r.mc_optimal << ',' << detail::real(r.mc_probabilistic_mean) << '\n';
}

/// Runs a scenario and writes metrics.csv, alive_curve.csv, events.csv (and,
/// for the min-cover based algorithms, loads.csv and mc.csv) into `out_dir`.
/// ConstructionFailed from the initial build propagates.
inline SimResult run_scenario(const Scenario& scenario, const ExperimentConfig& c, std::uint64_t seed,
                              const std::filesystem::path& out_dir) {
  c.validate();
  std::filesystem::create_directories(out_dir);
  auto result = run_simulation(scenario, c.sim_config(), seed);
  auto open = [&](const char* name) {
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (out_dir / name).string());
    return f;
  };
  {
    auto f = open("metrics.csv");
    write_metrics_csv(f, c, seed, scenario, result.metrics);
  }
  {
    auto f = open("alive_curve.csv");
    write_alive_csv(f, c, seed, result.metrics);
  }
  {
    auto f = open("events.csv");
    write_events_csv(f, c, seed, result.events);
  }
  if (c.algorithm != Algorithm::Mmevbt) {
    const auto report = balanced_load_report(scenario, c, seed);
    auto f = open("loads.csv");
    write_loads_csv(f, c, seed, report);
    auto g = open("mc.csv");
    write_mc_csv(g, c, seed, report);
  }
  return result;
}

}  // namespace wsnvbt
