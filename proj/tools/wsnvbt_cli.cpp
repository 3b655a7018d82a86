#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wsnvbt/wsnvbt.hpp"

namespace {

namespace fs = std::filesystem;
using namespace wsnvbt;

// Each config key becomes a `--<key>` flag; values are applied after any --config file.
struct Overrides {
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat key = value config file");
    cmd->add_option("--set", sets, "override as key=value (repeatable)");
    for (const auto& k : config_keys()) cmd->add_option("--" + k.name, flags[k.name], k.help);
  }

  ExperimentConfig resolve(ExperimentConfig c) const {
    if (!config_path.empty()) load_config(config_path, c);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ParseError(0, "--set expects key=value, got '" + s + "'");
      set_config_value(c, text::trim(std::string_view(s).substr(0, eq)), text::trim(std::string_view(s).substr(eq + 1)));
    }
    for (const auto& [key, value] : flags) {
      if (!value.empty()) set_config_value(c, key, value);
    }
    c.validate();
    return c;
  }
};

void write_file(const fs::path& p, const std::string& body) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << body;
}

int sweep(const ExperimentConfig& c, const fs::path& out, const char* stem, const char* title, bool fig4) {
  const auto r = fig4 ? sweep_figure4(c) : sweep_figure3(c);
  std::ostringstream table, attempts;
  write_sweep_csv(table, c, r, title);
  write_attempts_csv(attempts, c, r, title);
  write_file(out / (std::string(stem) + ".csv"), table.str());
  write_file(out / (std::string(stem) + "_attempts.csv"), attempts.str());
  std::cout << table.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual backbone tree simulator for wireless sensor networks"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;

  auto* fig3 = app.add_subcommand("sweep-fig3", "tree nodes and construction failures vs. range (MMEVBT, n=200)");
  Overrides fig3_o;
  fig3_o.attach(fig3);
  fig3->add_option("--out", out_dir, "output directory");
  fig3->add_option("--seed", seed, "alias for base_seed");

  auto* fig4 = app.add_subcommand("sweep-fig4", "tree nodes and construction failures vs. range (greedy cover, n=400)");
  Overrides fig4_o;
  fig4_o.attach(fig4);
  fig4->add_option("--out", out_dir, "output directory");
  fig4->add_option("--seed", seed, "alias for base_seed");

  auto* run = app.add_subcommand("run", "simulate a scenario file and write metrics CSVs");
  Overrides run_o;
  run_o.attach(run);
  std::string scenario_path;
  run->add_option("--scenario", scenario_path, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "simulation seed (default: the scenario's seed)");

  auto* gen = app.add_subcommand("gen-scenario", "draw a deployment and write it as a scenario file");
  Overrides gen_o;
  gen_o.attach(gen);
  std::string gen_path = "scenario.txt";
  gen->add_option("--out", gen_path, "scenario file to write");
  gen->add_option("--seed", seed, "deployment seed (default: base_seed)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fig3->parsed()) {
      auto c = fig3_o.resolve(ExperimentConfig::figure3_defaults());
      if (seed) c.base_seed = *seed;
      return sweep(c, out_dir, "fig3", "figure 3 sweep", false);
    }
    if (fig4->parsed()) {
      auto c = fig4_o.resolve(ExperimentConfig::figure4_defaults());
      if (seed) c.base_seed = *seed;
      return sweep(c, out_dir, "fig4", "figure 4 sweep", true);
    }
    if (gen->parsed()) {
      auto c = gen_o.resolve(ExperimentConfig{});
      const auto s = deploy_scenario(c, c.range, seed.value_or(c.base_seed));
      write_file(gen_path, scenario_to_string(s));
      return 0;
    }
    if (run->parsed()) {
      auto c = run_o.resolve(ExperimentConfig{});
      const auto s = load_scenario(scenario_path, c.energy_policy());
      c.range = s.sensing_range;
      c.n_nodes = s.nodes.size();
      c.field = s.field;
      const auto used_seed = seed.value_or(s.rng_seed);
      const auto r = run_scenario(s, c, used_seed, out_dir);
      std::cout << "rounds=" << r.rounds_run << " packets=" << r.packets
                << " first_death=" << (r.metrics.first_node_death_round ? std::to_string(*r.metrics.first_node_death_round) : "NA")
                << " disconnect=" << (r.metrics.rounds_until_disconnect ? std::to_string(*r.metrics.rounds_until_disconnect) : "NA")
                << '\n';
      return 0;
    }
  } catch (const ConstructionFailed& e) {
    std::cerr << "error: " << e.what() << " (first unreachable node: " << e.unreachable().front().index << ")\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
