#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wsnvbt/balanced.hpp"
#include "wsnvbt/core.hpp"
#include "wsnvbt/energy.hpp"
#include "wsnvbt/errors.hpp"
#include "wsnvbt/min_cover.hpp"
#include "wsnvbt/mmevbt.hpp"
#include "wsnvbt/rng.hpp"

namespace wsnvbt {

enum class Algorithm { Mmevbt, MinCoverBestParent, BalancedProbabilistic };

constexpr std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Mmevbt: return "mmevbt";
    case Algorithm::MinCoverBestParent: return "min_cover_best_parent";
    case Algorithm::BalancedProbabilistic: return "balanced_probabilistic";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
  for (auto a : {Algorithm::Mmevbt, Algorithm::MinCoverBestParent, Algorithm::BalancedProbabilistic}) {
    if (s == to_string(a)) return a;
  }
  return std::nullopt;
}

/// Which construction supplies the tree-node set balanced over.
enum class TreeSource { MinCover, Mmevbt };

struct TrafficModel {
  double origin_probability = 0.1;
  std::size_t rounds_max = 20000;
};

struct SinkPolicy {
  std::size_t t_move = 50;  // 0 disables relocation
  std::size_t grid = 4;
  std::optional<double> max_step;
};

struct SimConfig {
  Algorithm algorithm = Algorithm::Mmevbt;
  TrafficModel traffic;
  RadioParams radio;
  EnergyPolicy energy;
  FitnessParams fitness;
  SinkPolicy sink;
  TreeSource tree_source = TreeSource::MinCover;
};

struct LifetimeMetrics {
  std::optional<std::size_t> first_node_death_round;
  std::optional<std::size_t> rounds_until_disconnect;
  std::vector<std::pair<std::size_t, double>> alive_fraction_curve;
  std::size_t reconstructions = 0;
  double total_energy_consumed = 0.0;

  friend bool operator==(const LifetimeMetrics&, const LifetimeMetrics&) = default;
};

struct TraceEvent {
  std::size_t round = 0;
  ChangeKind kind = ChangeKind::Rebuilt;
  std::optional<NodeId> node;
  std::string detail;
};

struct SimResult {
  LifetimeMetrics metrics;
  std::vector<TraceEvent> events;
  Scenario final_scenario;
  std::size_t rounds_run = 0;
  std::size_t packets = 0;
  // Sum of per-packet route consumption, accumulated packet by packet.
  double route_energy = 0.0;
  // Should stay zero: relays that were not allowed to relay, and status
  // changes that are not edges of the state diagram.
  std::size_t illegal_transits = 0;
  std::size_t illegal_transitions = 0;
};

namespace detail {

/// Routing state for whichever backbone is active.
class Router {
 public:
  explicit Router(const SimConfig& cfg) : cfg_(cfg) {}

  /// Builds on the current energies and refreshes statuses. Throws ConstructionFailed.
  void rebuild(Scenario& s) {
    graph_ = ReachabilityGraph::build(s, cfg_.energy);
    if (cfg_.algorithm == Algorithm::Mmevbt) {
      tree_ = build_mmevbt(s, graph_, cfg_.radio, cfg_.energy);
      apply_tree_statuses(s, tree_, cfg_.energy);
      return;
    }
    std::vector<NodeId> tree_nodes;
    if (cfg_.tree_source == TreeSource::Mmevbt) {
      const auto t = build_mmevbt(s, graph_, cfg_.radio, cfg_.energy);
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t.children_count[i] > 0) tree_nodes.push_back(NodeId{i});
      }
    } else {
      tree_nodes = build_min_cover(s, graph_, cfg_.energy, {.require_eligible_seed = true}).tree_nodes;
    }
    tree_nodes = attach_gateway(s, graph_, std::move(tree_nodes), cfg_.energy);
    forwarding_ = build_forwarding(s, graph_, tree_nodes, cfg_.energy, cfg_.fitness);
    apply_statuses(s.nodes, forwarding_.children_count, cfg_.energy);
  }

  /// Vertex sequence from `origin` to the sink (sink included).
  std::vector<std::size_t> route(std::size_t origin, Rng& rng) const {
    std::vector<std::size_t> hops{origin};
    const std::size_t sink = graph_.sink();
    std::size_t v = origin;
    while (v != sink) {
      switch (cfg_.algorithm) {
        case Algorithm::Mmevbt: v = tree_.parent[v].vertex(sink); break;
        case Algorithm::MinCoverBestParent: v = forwarding_.best_hop(v); break;
        case Algorithm::BalancedProbabilistic:
          v = forwarding_.next_hops[v][select_parent(forwarding_.probabilities(v), rng)];
          break;
      }
      hops.push_back(v);
    }
    return hops;
  }

  const ReachabilityGraph& graph() const { return graph_; }
  const BackboneTree& tree() const { return tree_; }
  const ForwardingStructure& forwarding() const { return forwarding_; }

 private:
  SimConfig cfg_;
  ReachabilityGraph graph_;
  BackboneTree tree_;
  ForwardingStructure forwarding_;
};

inline std::uint64_t forwarding_seed(std::uint64_t seed) { return splitmix64(seed ^ 0x6a09e667f3bcc909ULL); }

}  // namespace detail

/// Round-based traffic simulation.
///
/// Each round: Bernoulli origins, routes fixed on start-of-round state,
/// tx/rx debited atomically, statuses refreshed, a rebuild whenever
/// eligibility or liveness changed, and every t_move rounds a sink move
/// followed by a rebuild. Stops at rounds_max, when every node is dead, or at
/// the first round whose rebuild fails (the disconnect round).
inline SimResult run_simulation(Scenario scenario, const SimConfig& cfg, std::uint64_t seed) {
  scenario.validate();
  cfg.radio.validate();
  cfg.fitness.validate();
  SimResult res;
  auto& m = res.metrics;
  const std::size_t n = scenario.nodes.size();
  const auto& policy = cfg.energy;

  reset_statuses(scenario.nodes, policy);
  detail::Router router(cfg);
  router.rebuild(scenario);

  Rng traffic(seed);
  Rng forwarding(detail::forwarding_seed(seed));
  std::vector<double> debit(n, 0.0);
  std::vector<std::size_t> origins;

  auto live_count = [&] {
    std::size_t k = 0;
    for (const auto& node : scenario.nodes) k += policy.alive(node.energy);
    return k;
  };
  auto snapshot_status = [&] {
    std::vector<NodeStatus> st(n);
    for (std::size_t i = 0; i < n; ++i) st[i] = scenario.nodes[i].status;
    return st;
  };
  auto count_illegal = [&](const std::vector<NodeStatus>& before) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_legal_transition(before[i], scenario.nodes[i].status)) ++res.illegal_transitions;
    }
  };

  for (std::size_t round = 1; round <= cfg.traffic.rounds_max; ++round) {
    if (live_count() == 0) break;
    res.rounds_run = round;

    origins.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (policy.alive(scenario.nodes[i].energy) && traffic.bernoulli(cfg.traffic.origin_probability)) {
        origins.push_back(i);
      }
    }

    std::fill(debit.begin(), debit.end(), 0.0);
    const auto& g = router.graph();
    for (std::size_t o : origins) {
      const auto hops = router.route(o, forwarding);
      double route_cost = 0.0;
      for (std::size_t k = 0; k + 1 < hops.size(); ++k) {
        const std::size_t from = hops[k], to = hops[k + 1];
        const double d = g.edge_length(from, to);
        debit[from] += tx_cost(cfg.radio, d);
        if (to != g.sink()) {
          debit[to] += rx_cost(cfg.radio);
          const auto st = scenario.nodes[to].status;
          if (st == NodeStatus::PermanentNonTree || st == NodeStatus::Failed) ++res.illegal_transits;
        }
        route_cost += hop_weight(cfg.radio, d, to == g.sink());
      }
      res.route_energy += route_cost;
      ++res.packets;
    }

    bool structural_change = false;
    bool died = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (debit[i] == 0.0) continue;
      auto& node = scenario.nodes[i];
      const bool was_alive = policy.alive(node.energy), was_eligible = policy.eligible(node.energy);
      node.energy = std::max(0.0, node.energy - debit[i]);
      m.total_energy_consumed += debit[i];
      if (was_alive && !policy.alive(node.energy)) died = true;
      if (was_alive != policy.alive(node.energy) || was_eligible != policy.eligible(node.energy)) {
        structural_change = true;
      }
    }
    if (died && !m.first_node_death_round) m.first_node_death_round = round;

    const auto before = snapshot_status();
    bool disconnected = false;
    if (structural_change) {
      const BackboneTree old_tree = router.tree();
      try {
        router.rebuild(scenario);
        ++m.reconstructions;
        if (cfg.algorithm == Algorithm::Mmevbt) {
          for (auto& e : diff_trees(old_tree, router.tree()).events) {
            res.events.push_back({round, e.kind, e.node, std::move(e.detail)});
          }
        } else {
          res.events.push_back({round, ChangeKind::Rebuilt, std::nullopt, "backbone rebuilt"});
        }
      } catch (const ConstructionFailed& cf) {
        disconnected = true;
        for (NodeId id : cf.unreachable()) res.events.push_back({round, ChangeKind::Unreachable, id, "disconnect"});
        // Statuses still track energy; children are gone with the backbone.
        for (auto& node : scenario.nodes) {
          if (!policy.eligible(node.energy)) node.status = classify_status(node.energy, 0, policy);
        }
      }
    }

    if (!disconnected && cfg.sink.t_move > 0 && round % cfg.sink.t_move == 0 && live_count() > 0) {
      const Vec2 target = relocate_sink(scenario, cfg.sink.grid, cfg.sink.max_step, policy);
      if (!(target == scenario.field.sink)) {
        const Vec2 previous = scenario.field.sink;
        const std::vector<Node> saved = scenario.nodes;
        scenario.field.sink = target;
        try {
          router.rebuild(scenario);
          ++m.reconstructions;
          res.events.push_back({round, ChangeKind::SinkMoved, std::nullopt,
                                text::format_double(target.x) + " " + text::format_double(target.y)});
        } catch (const ConstructionFailed&) {
          // The best reachable position is the current one.
          scenario.field.sink = previous;
          scenario.nodes = saved;
          router.rebuild(scenario);
        }
      }
    }

    count_illegal(before);
    m.alive_fraction_curve.emplace_back(round, static_cast<double>(live_count()) / static_cast<double>(n));
    if (disconnected) {
      m.rounds_until_disconnect = round;
      break;
    }
  }
  res.final_scenario = std::move(scenario);
  return res;
}

struct LoadSpread {
  // Busiest tree node by child selections: packets it received straight from
  // their origin (count(i) of the min-max program), summed over rounds.
  std::size_t mc_probabilistic = 0;
  std::size_t mc_deterministic = 0;
  // Busiest tree node by every packet received, relayed traffic included.
  std::size_t transit_probabilistic = 0;
  std::size_t transit_deterministic = 0;
  std::vector<NodeId> tree_nodes;
  std::vector<std::size_t> probabilistic_counts;
  std::vector<std::size_t> deterministic_counts;
};

/// Replays identical traffic under probabilistic and best-parent forwarding on
/// a static balanced backbone (no energy drain) and reports each policy's
/// busiest tree node.
inline LoadSpread compare_load_spread(const Scenario& scenario, const SimConfig& cfg, std::size_t rounds,
                                      std::uint64_t seed) {
  SimConfig probabilistic = cfg;
  probabilistic.algorithm = Algorithm::BalancedProbabilistic;
  SimConfig deterministic = cfg;
  deterministic.algorithm = Algorithm::MinCoverBestParent;

  Scenario s = scenario;
  reset_statuses(s.nodes, cfg.energy);
  detail::Router prob_router(probabilistic), det_router(deterministic);
  prob_router.rebuild(s);
  det_router.rebuild(s);

  const std::size_t n = s.nodes.size();
  const std::size_t sink = prob_router.graph().sink();
  std::vector<std::size_t> prob_first(n, 0), det_first(n, 0), prob_transit(n, 0), det_transit(n, 0);
  auto tally = [&](const std::vector<std::size_t>& hops, std::vector<std::size_t>& first,
                   std::vector<std::size_t>& transit) {
    if (hops[1] != sink) ++first[hops[1]];
    for (std::size_t k = 1; k + 1 < hops.size(); ++k) ++transit[hops[k]];
  };
  Rng traffic(seed);
  Rng forwarding(detail::forwarding_seed(seed));
  for (std::size_t r = 0; r < rounds; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!cfg.energy.alive(s.nodes[i].energy) || !traffic.bernoulli(cfg.traffic.origin_probability)) continue;
      tally(prob_router.route(i, forwarding), prob_first, prob_transit);
      tally(det_router.route(i, forwarding), det_first, det_transit);
    }
  }

  LoadSpread out;
  out.tree_nodes = prob_router.forwarding().tree_nodes();
  for (NodeId t : out.tree_nodes) {
    const std::size_t k = t.index;
    out.probabilistic_counts.push_back(prob_first[k]);
    out.deterministic_counts.push_back(det_first[k]);
    out.mc_probabilistic = std::max(out.mc_probabilistic, prob_first[k]);
    out.mc_deterministic = std::max(out.mc_deterministic, det_first[k]);
    out.transit_probabilistic = std::max(out.transit_probabilistic, prob_transit[k]);
    out.transit_deterministic = std::max(out.transit_deterministic, det_transit[k]);
  }
  return out;
}

}  // namespace wsnvbt
