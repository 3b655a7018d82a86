#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wsnvbt/balanced.hpp"
#include "wsnvbt/core.hpp"
#include "wsnvbt/errors.hpp"
#include "wsnvbt/simulation.hpp"
#include "wsnvbt/text.hpp"

namespace wsnvbt {

enum class DeployMode { Uniform, Clustered };

/// Every tunable of a run or sweep. Serialized as flat `key = value` text.
struct ExperimentConfig {
  std::size_t n_nodes = 200;
  Field field;
  double range = 30.0;
  std::vector<double> ranges{20.0, 25.0, 30.0, 35.0};
  std::size_t target_successes = 15;
  std::size_t max_attempts = 200;
  Algorithm algorithm = Algorithm::Mmevbt;
  std::uint64_t base_seed = 1;

  double e_init = 2.0;
  double th_fraction = 0.1;
  RadioParams radio;
  FitnessParams fitness;
  TrafficModel traffic;
  SinkPolicy sink;
  TreeSource tree_source = TreeSource::MinCover;
  std::size_t load_samples = 1000;

  DeployMode deploy = DeployMode::Uniform;
  std::size_t clusters = 4;
  double cluster_sigma = 30.0;

  static ExperimentConfig figure3_defaults() { return {}; }

  static ExperimentConfig figure4_defaults() {
    ExperimentConfig c;
    c.n_nodes = 400;
    c.ranges = {15.0, 20.0, 25.0, 30.0, 35.0};
    c.algorithm = Algorithm::MinCoverBestParent;
    return c;
  }

  EnergyPolicy energy_policy() const { return EnergyPolicy::make(radio, e_init, th_fraction); }

  SimConfig sim_config() const {
    SimConfig s;
    s.algorithm = algorithm;
    s.traffic = traffic;
    s.radio = radio;
    s.energy = energy_policy();
    s.fitness = fitness;
    s.sink = sink;
    s.tree_source = tree_source;
    return s;
  }

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const {
    if (n_nodes == 0) throw std::invalid_argument("n_nodes must be at least 1");
    if (ranges.empty()) throw std::invalid_argument("ranges must not be empty");
    for (std::size_t k = 0; k < ranges.size(); ++k) {
      if (!(ranges[k] > 0.0)) throw std::invalid_argument("ranges must be positive");
      if (k > 0 && !(ranges[k] > ranges[k - 1])) throw std::invalid_argument("ranges must be strictly increasing");
    }
    if (!(range > 0.0)) throw std::invalid_argument("range must be positive");
    if (!(field.width > 0.0) || !(field.height > 0.0)) throw std::invalid_argument("field dimensions must be positive");
    if (!field.contains(field.sink)) throw std::invalid_argument("sink outside field");
    if (target_successes == 0 || max_attempts == 0) throw std::invalid_argument("attempt counts must be positive");
    if (traffic.origin_probability < 0.0 || traffic.origin_probability > 1.0) {
      throw std::invalid_argument("traffic.probability must lie in [0, 1]");
    }
    if (sink.grid == 0) throw std::invalid_argument("policy.grid must be at least 1");
    if (sink.max_step && !(*sink.max_step > 0.0)) throw std::invalid_argument("policy.max_step must be positive");
    if (clusters == 0 || !(cluster_sigma > 0.0)) throw std::invalid_argument("bad cluster parameters");
    radio.validate();
    fitness.validate();
    (void)energy_policy();
  }
};

/// One entry of the flat key space.
struct ConfigKey {
  std::string name;
  std::string help;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<bool(ExperimentConfig&, std::string_view)> set;
};

namespace detail {

inline ConfigKey real_key(std::string name, std::string help, double ExperimentConfig::*field_ptr) {
  return {std::move(name), std::move(help),
          [field_ptr](const ExperimentConfig& c) { return text::format_double(c.*field_ptr); },
          [field_ptr](ExperimentConfig& c, std::string_view v) {
            auto d = text::parse_double(v);
            if (!d) return false;
            c.*field_ptr = *d;
            return true;
          }};
}

template <class Get, class Set>
ConfigKey real_key(std::string name, std::string help, Get get, Set set) {
  return {std::move(name), std::move(help),
          [get](const ExperimentConfig& c) { return text::format_double(get(c)); },
          [set](ExperimentConfig& c, std::string_view v) {
            auto d = text::parse_double(v);
            if (!d) return false;
            set(c, *d);
            return true;
          }};
}

template <class Get, class Set>
ConfigKey count_key(std::string name, std::string help, Get get, Set set) {
  return {std::move(name), std::move(help), [get](const ExperimentConfig& c) { return std::to_string(get(c)); },
          [set](ExperimentConfig& c, std::string_view v) {
            auto d = text::parse_u64(v);
            if (!d) return false;
            set(c, *d);
            return true;
          }};
}

}  // namespace detail

inline const std::vector<ConfigKey>& config_keys() {
  using C = ExperimentConfig;
  using detail::count_key;
  using detail::real_key;
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    k.push_back(count_key("n_nodes", "number of sensor nodes", [](const C& c) { return c.n_nodes; },
                          [](C& c, std::uint64_t v) { c.n_nodes = v; }));
    k.push_back(real_key("field.width", "field width (m)", [](const C& c) { return c.field.width; },
                         [](C& c, double v) { c.field.width = v; }));
    k.push_back(real_key("field.height", "field height (m)", [](const C& c) { return c.field.height; },
                         [](C& c, double v) { c.field.height = v; }));
    k.push_back(real_key("field.sink_x", "initial sink x (m)", [](const C& c) { return c.field.sink.x; },
                         [](C& c, double v) { c.field.sink.x = v; }));
    k.push_back(real_key("field.sink_y", "initial sink y (m)", [](const C& c) { return c.field.sink.y; },
                         [](C& c, double v) { c.field.sink.y = v; }));
    k.push_back(real_key("range", "sensing range for run/gen-scenario (m)", &C::range));
    k.push_back({"ranges", "comma-separated sweep ranges (m), strictly increasing",
                 [](const C& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.ranges.size(); ++i) {
                     if (i) s += ',';
                     s += text::format_double(c.ranges[i]);
                   }
                   return s;
                 },
                 [](C& c, std::string_view v) {
                   std::vector<double> out;
                   for (auto part : text::split(v, ',')) {
                     auto d = text::parse_double(part);
                     if (!d) return false;
                     out.push_back(*d);
                   }
                   c.ranges = std::move(out);
                   return true;
                 }});
    k.push_back(count_key("target_successes", "successful constructions wanted per range",
                          [](const C& c) { return c.target_successes; },
                          [](C& c, std::uint64_t v) { c.target_successes = v; }));
    k.push_back(count_key("max_attempts", "deployments tried per range before giving up",
                          [](const C& c) { return c.max_attempts; }, [](C& c, std::uint64_t v) { c.max_attempts = v; }));
    k.push_back({"algorithm", "mmevbt | min_cover_best_parent | balanced_probabilistic",
                 [](const C& c) { return std::string(to_string(c.algorithm)); },
                 [](C& c, std::string_view v) {
                   auto a = parse_algorithm(v);
                   if (!a) return false;
                   c.algorithm = *a;
                   return true;
                 }});
    k.push_back(count_key("base_seed", "base of the per-attempt seed derivation",
                          [](const C& c) { return c.base_seed; }, [](C& c, std::uint64_t v) { c.base_seed = v; }));
    k.push_back(real_key("energy.e_init", "initial energy per node (J)", &C::e_init));
    k.push_back(real_key("energy.th_fraction", "relay threshold Th as a fraction of e_init", &C::th_fraction));
    k.push_back(real_key("radio.e_elec", "electronics energy (J/bit)", [](const C& c) { return c.radio.e_elec; },
                         [](C& c, double v) { c.radio.e_elec = v; }));
    k.push_back(real_key("radio.e_amp", "amplifier energy (J/bit/m^2)", [](const C& c) { return c.radio.e_amp; },
                         [](C& c, double v) { c.radio.e_amp = v; }));
    k.push_back(real_key("radio.packet_bits", "packet size (bits)", [](const C& c) { return c.radio.packet_bits; },
                         [](C& c, double v) { c.radio.packet_bits = v; }));
    k.push_back(real_key("fitness.c1", "distance weight", [](const C& c) { return c.fitness.c1; },
                         [](C& c, double v) { c.fitness.c1 = v; }));
    k.push_back(real_key("fitness.c2", "energy weight", [](const C& c) { return c.fitness.c2; },
                         [](C& c, double v) { c.fitness.c2 = v; }));
    k.push_back(real_key("fitness.c3", "straightness weight", [](const C& c) { return c.fitness.c3; },
                         [](C& c, double v) { c.fitness.c3 = v; }));
    k.push_back({"fitness.mode", "normalized | raw",
                 [](const C& c) { return std::string(c.fitness.mode == FitnessMode::Raw ? "raw" : "normalized"); },
                 [](C& c, std::string_view v) {
                   if (v == "raw") c.fitness.mode = FitnessMode::Raw;
                   else if (v == "normalized") c.fitness.mode = FitnessMode::Normalized;
                   else return false;
                   return true;
                 }});
    k.push_back(real_key("fitness.beta_min", "straightness clamp (rad)", [](const C& c) { return c.fitness.beta_min; },
                         [](C& c, double v) { c.fitness.beta_min = v; }));
    k.push_back(real_key("traffic.probability", "per-node per-round origination probability",
                         [](const C& c) { return c.traffic.origin_probability; },
                         [](C& c, double v) { c.traffic.origin_probability = v; }));
    k.push_back(count_key("traffic.rounds_max", "round limit", [](const C& c) { return c.traffic.rounds_max; },
                          [](C& c, std::uint64_t v) { c.traffic.rounds_max = v; }));
    k.push_back(count_key("policy.t_move", "rounds between sink moves (0 disables)",
                          [](const C& c) { return c.sink.t_move; }, [](C& c, std::uint64_t v) { c.sink.t_move = v; }));
    k.push_back(count_key("policy.grid", "relocation grid size G (GxG cells)", [](const C& c) { return c.sink.grid; },
                          [](C& c, std::uint64_t v) { c.sink.grid = v; }));
    k.push_back({"policy.max_step", "largest sink move per relocation (m) or none",
                 [](const C& c) { return c.sink.max_step ? text::format_double(*c.sink.max_step) : std::string("none"); },
                 [](C& c, std::string_view v) {
                   if (v == "none") {
                     c.sink.max_step.reset();
                     return true;
                   }
                   auto d = text::parse_double(v);
                   if (!d) return false;
                   c.sink.max_step = *d;
                   return true;
                 }});
    k.push_back({"balanced.tree_source", "min_cover | mmevbt",
                 [](const C& c) { return std::string(c.tree_source == TreeSource::Mmevbt ? "mmevbt" : "min_cover"); },
                 [](C& c, std::string_view v) {
                   if (v == "mmevbt") c.tree_source = TreeSource::Mmevbt;
                   else if (v == "min_cover") c.tree_source = TreeSource::MinCover;
                   else return false;
                   return true;
                 }});
    k.push_back(count_key("loads.samples", "selection rounds averaged for mc_probabilistic_mean",
                          [](const C& c) { return c.load_samples; }, [](C& c, std::uint64_t v) { c.load_samples = v; }));
    k.push_back({"deploy.mode", "uniform | clustered",
                 [](const C& c) { return std::string(c.deploy == DeployMode::Clustered ? "clustered" : "uniform"); },
                 [](C& c, std::string_view v) {
                   if (v == "clustered") c.deploy = DeployMode::Clustered;
                   else if (v == "uniform") c.deploy = DeployMode::Uniform;
                   else return false;
                   return true;
                 }});
    k.push_back(count_key("deploy.clusters", "cluster count for clustered deployment",
                          [](const C& c) { return c.clusters; }, [](C& c, std::uint64_t v) { c.clusters = v; }));
    k.push_back(real_key("deploy.sigma", "cluster standard deviation (m)", &C::cluster_sigma));
    return k;
  }();
  return keys;
}

inline const ConfigKey* find_config_key(std::string_view name) {
  for (const auto& k : config_keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

/// Sets one key; throws ParseError (with `line`, 0 if none) for unknown keys or bad values.
inline void set_config_value(ExperimentConfig& c, std::string_view key, std::string_view value, std::size_t line = 0) {
  const ConfigKey* k = find_config_key(key);
  if (!k) throw ParseError(line, "unknown config key '" + std::string(key) + "'");
  if (!k->set(c, value)) {
    throw ParseError(line, "bad value '" + std::string(value) + "' for '" + std::string(key) + "'");
  }
}

/// `key = value` lines; '#' starts a comment line. Unknown keys are fatal.
inline void read_config(std::istream& is, ExperimentConfig& c) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected 'key = value'");
    set_config_value(c, text::trim(body.substr(0, eq)), text::trim(body.substr(eq + 1)), lineno);
  }
}

inline void load_config(const std::string& path, ExperimentConfig& c) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open config file '" + path + "'");
  read_config(in, c);
}

/// Full resolved config, one `<prefix>key = value` line per key.
inline void write_config(std::ostream& os, const ExperimentConfig& c, std::string_view prefix = "") {
  for (const auto& k : config_keys()) os << prefix << k.name << " = " << k.get(c) << '\n';
}

}  // namespace wsnvbt
