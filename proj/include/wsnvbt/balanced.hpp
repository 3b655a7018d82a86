#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "wsnvbt/core.hpp"
#include "wsnvbt/errors.hpp"
#include "wsnvbt/min_cover.hpp"
#include "wsnvbt/rng.hpp"

namespace wsnvbt {

// ---------------------------------------------------------------------------
// Fitness factor

enum class FitnessMode { Normalized, Raw };

struct FitnessParams {
  double c1 = 1.0 / 3.0;  // distance weight
  double c2 = 1.0 / 3.0;  // energy weight
  double c3 = 1.0 / 3.0;  // straightness weight
  FitnessMode mode = FitnessMode::Normalized;
  double beta_min = std::numbers::pi / 36.0;

  void validate() const {
    if (c1 < 0.0 || c2 < 0.0 || c3 < 0.0) throw std::invalid_argument("fitness weights must be non-negative");
    if (std::abs(c1 + c2 + c3 - 1.0) > 1e-9) throw std::invalid_argument("fitness weights must sum to 1");
    if (!(beta_min > 0.0 && beta_min <= std::numbers::pi)) throw std::invalid_argument("beta_min must lie in (0, pi]");
  }
};

struct FitnessBreakdown {
  double f_d = 0.0;
  double f_e = 0.0;
  double f_beta = 0.0;
  double beta = 0.0;
  double total = 0.0;
};

/// Geometry and energy seen by node i when it rates candidate parent n.
struct FitnessContext {
  Vec2 node;
  Vec2 candidate;
  std::optional<Vec2> candidate_next_hop;  // empty when the candidate is the sink
  double candidate_energy = 0.0;
  double range = 1.0;
  double e_init = 2.0;
};

/// Deviation at the candidate between the incoming (i -> n) and outgoing
/// (n -> next hop) directions, in [0, pi]. Zero-length legs count as straight.
inline double deviation_angle(Vec2 node, Vec2 candidate, std::optional<Vec2> next) {
  if (!next) return 0.0;
  const double ax = candidate.x - node.x, ay = candidate.y - node.y;
  const double bx = next->x - candidate.x, by = next->y - candidate.y;
  if ((ax == 0.0 && ay == 0.0) || (bx == 0.0 && by == 0.0)) return 0.0;
  return std::abs(std::atan2(ax * by - ay * bx, ax * bx + ay * by));
}

inline FitnessBreakdown fitness(const FitnessContext& ctx, const FitnessParams& params) {
  FitnessBreakdown f;
  const double dist = distance(ctx.node, ctx.candidate);
  f.beta = std::clamp(deviation_angle(ctx.node, ctx.candidate, ctx.candidate_next_hop), params.beta_min,
                      std::numbers::pi);
  if (params.mode == FitnessMode::Normalized) {
    f.f_d = std::clamp(1.0 - dist / ctx.range, 0.0, 1.0);
    f.f_e = std::clamp(ctx.candidate_energy / ctx.e_init, 0.0, 1.0);
    f.f_beta = params.beta_min / f.beta;
  } else {
    if (dist == 0.0) throw std::invalid_argument("raw fitness: zero distance has no inverse");
    f.f_d = 1.0 / dist;
    f.f_e = ctx.candidate_energy;
    f.f_beta = std::numbers::pi / f.beta;
  }
  f.total = params.c1 * f.f_d + params.c2 * f.f_e + params.c3 * f.f_beta;
  return f;
}

// ---------------------------------------------------------------------------
// Probabilistic parent selection

/// P(pick k) = f_k / sum(f). Throws DegenerateInput for an empty list, negative
/// or non-finite entries, or an all-zero list.
inline std::vector<double> selection_probabilities(std::span<const double> fitness_values) {
  if (fitness_values.empty()) throw DegenerateInput("no candidates");
  double sum = 0.0;
  for (double f : fitness_values) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw DegenerateInput("fitness values must be finite and non-negative");
    sum += f;
  }
  if (!(sum > 0.0)) throw DegenerateInput("all fitness values are zero");
  std::vector<double> p(fitness_values.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = fitness_values[k] / sum;
  return p;
}

/// Index whose cumulative interval holds `r`: [0, P0], (P0, P0+P1], ...
inline std::size_t select_index(std::span<const double> probabilities, double r) {
  double cum = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (probabilities[k] <= 0.0) continue;
    cum += probabilities[k];
    last = k;
    if (r <= cum) return k;
  }
  return last;
}

inline std::size_t select_parent(std::span<const double> probabilities, Rng& rng) {
  return select_index(probabilities, rng.uniform01());
}

// ---------------------------------------------------------------------------
// Forwarding problem and loads

struct ForwardingCandidate {
  NodeId tree_node;
  double fitness = 0.0;
};

/// Each sender must pick exactly one of its candidate tree nodes.
struct ForwardingProblem {
  std::vector<NodeId> senders;
  std::vector<std::vector<ForwardingCandidate>> candidates;

  std::size_t sender_count() const { return senders.size(); }

  /// Distinct tree nodes in ascending id order.
  std::vector<NodeId> tree_nodes() const {
    std::vector<NodeId> out;
    for (const auto& cs : candidates) {
      for (const auto& c : cs) out.push_back(c.tree_node);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<double> probabilities(std::size_t sender) const {
    std::vector<double> f;
    for (const auto& c : candidates[sender]) f.push_back(c.fitness);
    return selection_probabilities(f);
  }
};

struct LoadStats {
  std::vector<NodeId> tree_nodes;
  std::vector<std::size_t> count;
  std::vector<double> expected_count;
  std::size_t mc = 0;
};

namespace detail {
inline std::size_t slot_of(const std::vector<NodeId>& sorted, NodeId id) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), id) - sorted.begin());
}
}  // namespace detail

/// E[count(T)] = sum over senders listing T of P(sender picks T).
inline std::vector<double> expected_loads(const ForwardingProblem& problem, const std::vector<NodeId>& tree_nodes) {
  std::vector<double> e(tree_nodes.size(), 0.0);
  for (std::size_t i = 0; i < problem.sender_count(); ++i) {
    const auto p = problem.probabilities(i);
    for (std::size_t k = 0; k < p.size(); ++k) e[detail::slot_of(tree_nodes, problem.candidates[i][k].tree_node)] += p[k];
  }
  return e;
}

inline std::vector<double> expected_loads(const ForwardingProblem& problem) {
  return expected_loads(problem, problem.tree_nodes());
}

/// Counts and mc for an assignment (candidate index per sender), plus expected counts.
inline LoadStats load_stats(const ForwardingProblem& problem, std::span<const std::size_t> assignment) {
  LoadStats st;
  st.tree_nodes = problem.tree_nodes();
  st.count.assign(st.tree_nodes.size(), 0);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    ++st.count[detail::slot_of(st.tree_nodes, problem.candidates[i][assignment[i]].tree_node)];
  }
  st.expected_count = expected_loads(problem, st.tree_nodes);
  st.mc = st.count.empty() ? 0 : *std::max_element(st.count.begin(), st.count.end());
  return st;
}

/// One independent selection per sender.
inline std::vector<std::size_t> realize_selection(const ForwardingProblem& problem, Rng& rng) {
  std::vector<std::size_t> a(problem.sender_count());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = select_parent(problem.probabilities(i), rng);
  return a;
}

// ---------------------------------------------------------------------------
// Exact min-max load

enum class MinMaxSolver { Matching, Exhaustive };

struct MinMaxResult {
  std::vector<std::size_t> assignment;  // candidate index per sender
  std::size_t mc = 0;
};

inline constexpr double kExhaustiveGuard = 1e6;

namespace detail {

// Can every sender be placed with at most `cap` senders per tree node?
// Capacitated bipartite matching by augmenting paths; deterministic order.
inline bool assign_with_capacity(const ForwardingProblem& pb, const std::vector<NodeId>& targets, std::size_t cap,
                                 std::vector<std::size_t>& assignment) {
  const std::size_t n = pb.sender_count();
  std::vector<std::vector<std::size_t>> holders(targets.size());
  std::vector<std::size_t> stamp_of(targets.size(), n);
  assignment.assign(n, 0);

  auto augment = [&](auto&& self, std::size_t i, std::size_t stamp) -> bool {
    const auto& cs = pb.candidates[i];
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const std::size_t t = slot_of(targets, cs[k].tree_node);
      if (stamp_of[t] == stamp) continue;
      stamp_of[t] = stamp;
      if (holders[t].size() < cap) {
        holders[t].push_back(i);
        assignment[i] = k;
        return true;
      }
      for (auto& h : holders[t]) {
        if (self(self, h, stamp)) {
          h = i;
          assignment[i] = k;
          return true;
        }
      }
    }
    return false;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (pb.candidates[i].empty()) return false;
    if (!augment(augment, i, i)) return false;
  }
  return true;
}

}  // namespace detail

/// Assignment minimizing the largest per-tree-node count (each sender picks
/// exactly one candidate). Matching solves by binary search on mc with a
/// capacitated matching feasibility test; Exhaustive enumerates every
/// assignment and is limited to kExhaustiveGuard combinations.
inline MinMaxResult min_max_load_exact(const ForwardingProblem& problem,
                                       MinMaxSolver solver = MinMaxSolver::Matching) {
  const std::size_t n = problem.sender_count();
  MinMaxResult best;
  if (n == 0) return best;
  for (const auto& cs : problem.candidates) {
    if (cs.empty()) throw DegenerateInput("sender without candidates");
  }
  const auto targets = problem.tree_nodes();

  if (solver == MinMaxSolver::Exhaustive) {
    double combos = 1.0;
    for (const auto& cs : problem.candidates) combos *= static_cast<double>(cs.size());
    if (combos > kExhaustiveGuard) throw InstanceTooLarge("exhaustive min-max search over the guard");
    std::vector<std::size_t> a(n, 0);
    best.mc = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> count(targets.size());
    while (true) {
      std::fill(count.begin(), count.end(), 0);
      for (std::size_t i = 0; i < n; ++i) ++count[detail::slot_of(targets, problem.candidates[i][a[i]].tree_node)];
      const std::size_t mc = *std::max_element(count.begin(), count.end());
      if (mc < best.mc) {
        best.mc = mc;
        best.assignment = a;
      }
      std::size_t pos = 0;
      while (pos < n && ++a[pos] == problem.candidates[pos].size()) a[pos++] = 0;
      if (pos == n) break;
    }
    return best;
  }

  std::size_t lo = (n + targets.size() - 1) / targets.size();
  std::size_t hi = n;
  std::vector<std::size_t> trial;
  detail::assign_with_capacity(problem, targets, hi, best.assignment);
  best.mc = hi;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (detail::assign_with_capacity(problem, targets, mid, trial)) {
      hi = mid;
      best.assignment = trial;
    } else {
      lo = mid + 1;
    }
  }
  best.mc = hi;
  // Recompute the realized maximum; it equals hi at the optimum.
  std::vector<std::size_t> count(targets.size(), 0);
  for (std::size_t i = 0; i < n; ++i) ++count[detail::slot_of(targets, problem.candidates[i][best.assignment[i]].tree_node)];
  best.mc = *std::max_element(count.begin(), count.end());
  return best;
}

// ---------------------------------------------------------------------------
// Backbone forwarding structure

/// Per-node forwarding options over a given tree-node set.
///
/// Vertices follow ReachabilityGraph numbering (the sink is vertex n). A node
/// in range of the sink sends straight to it. An eligible tree node forwards to
/// eligible tree neighbors one backbone level closer to the sink. Any other
/// node may use every eligible tree neighbor that has a backbone path.
struct ForwardingStructure {
  std::size_t sink = 0;
  std::vector<bool> is_tree;
  std::vector<std::size_t> level;
  std::vector<std::vector<std::size_t>> next_hops;
  std::vector<std::vector<double>> fitness;
  std::vector<std::size_t> children_count;

  static constexpr std::size_t kNoLevel = std::numeric_limits<std::size_t>::max();

  std::vector<NodeId> tree_nodes() const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < is_tree.size(); ++i) {
      if (is_tree[i]) out.push_back(NodeId{i});
    }
    return out;
  }

  std::vector<double> probabilities(std::size_t v) const { return selection_probabilities(fitness[v]); }

  /// Highest-fitness next hop; ties go to the smaller vertex id.
  std::size_t best_hop(std::size_t v) const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < next_hops[v].size(); ++k) {
      if (fitness[v][k] > fitness[v][best]) best = k;
    }
    return next_hops[v][best];
  }

  /// Senders whose options are tree nodes (direct-to-sink senders excluded).
  ForwardingProblem problem() const {
    ForwardingProblem pb;
    for (std::size_t i = 0; i < next_hops.size(); ++i) {
      if (next_hops[i].empty() || next_hops[i].front() == sink) continue;
      pb.senders.push_back(NodeId{i});
      std::vector<ForwardingCandidate> cs;
      for (std::size_t k = 0; k < next_hops[i].size(); ++k) cs.push_back({NodeId{next_hops[i][k]}, fitness[i][k]});
      pb.candidates.push_back(std::move(cs));
    }
    return pb;
  }
};

/// Throws ConstructionFailed for live nodes left without any option.
inline ForwardingStructure build_forwarding(const Scenario& s, const ReachabilityGraph& g,
                                            std::span<const NodeId> tree_nodes, const EnergyPolicy& policy,
                                            const FitnessParams& params) {
  const std::size_t n = s.nodes.size();
  const std::size_t sink = g.sink();
  ForwardingStructure fs;
  fs.sink = sink;
  fs.is_tree.assign(n, false);
  for (NodeId t : tree_nodes) {
    if (policy.eligible(s.nodes[t.index].energy)) fs.is_tree[t.index] = true;
  }

  // Backbone levels by BFS from the sink over eligible tree nodes.
  fs.level.assign(n + 1, ForwardingStructure::kNoLevel);
  fs.level[sink] = 0;
  std::vector<std::size_t> frontier{sink};
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const std::size_t v = frontier[head];
    for (std::size_t u : g.neighbors(v)) {
      if (u == sink || !fs.is_tree[u] || fs.level[u] != ForwardingStructure::kNoLevel) continue;
      fs.level[u] = fs.level[v] + 1;
      frontier.push_back(u);
    }
  }

  // Reference next hop of each backbone node, used for the straightness term.
  std::vector<std::optional<Vec2>> onward(n + 1);
  for (std::size_t t = 0; t < n; ++t) {
    if (!fs.is_tree[t] || fs.level[t] == ForwardingStructure::kNoLevel) continue;
    if (fs.level[t] == 1) {
      onward[t] = s.field.sink;
      continue;
    }
    std::size_t pick = sink;
    double pick_d = std::numeric_limits<double>::infinity();
    for (std::size_t u : g.neighbors(t)) {
      if (u == sink || !fs.is_tree[u] || fs.level[u] + 1 != fs.level[t]) continue;
      const double d = distance(g.position(u), s.field.sink);
      if (d < pick_d) {
        pick_d = d;
        pick = u;
      }
    }
    onward[t] = g.position(pick);
  }

  fs.next_hops.assign(n, {});
  fs.fitness.assign(n, {});
  fs.children_count.assign(n, 0);
  std::vector<NodeId> missing;
  for (std::size_t i = 0; i < n; ++i) {
    if (!g.live(i)) continue;
    auto& hops = fs.next_hops[i];
    if (g.adjacent(i, sink)) {
      hops.push_back(sink);
    } else {
      const bool backbone = fs.is_tree[i] && fs.level[i] != ForwardingStructure::kNoLevel;
      for (std::size_t u : g.neighbors(i)) {
        if (u == sink || !fs.is_tree[u] || fs.level[u] == ForwardingStructure::kNoLevel) continue;
        if (backbone && fs.level[u] + 1 != fs.level[i]) continue;
        hops.push_back(u);
      }
    }
    if (hops.empty()) {
      missing.push_back(NodeId{i});
      continue;
    }
    for (std::size_t u : hops) {
      FitnessContext ctx;
      ctx.node = g.position(i);
      ctx.candidate = g.position(u);
      ctx.candidate_next_hop = u == sink ? std::nullopt : onward[u];
      ctx.candidate_energy = u == sink ? policy.e_init : s.nodes[u].energy;
      ctx.range = g.range();
      ctx.e_init = policy.e_init;
      fs.fitness[i].push_back(fitness(ctx, params).total);
      if (u != sink) ++fs.children_count[u];
    }
  }
  if (!missing.empty()) throw ConstructionFailed(std::move(missing));
  return fs;
}

/// If no eligible tree node hears the sink, promotes one gateway: the eligible
/// node in sink range, adjacent to an eligible tree node, closest to the sink.
inline std::vector<NodeId> attach_gateway(const Scenario& s, const ReachabilityGraph& g,
                                          std::vector<NodeId> tree_nodes, const EnergyPolicy& policy) {
  const std::size_t sink = g.sink();
  std::vector<bool> tree(s.nodes.size(), false);
  for (NodeId t : tree_nodes) {
    if (policy.eligible(s.nodes[t.index].energy)) tree[t.index] = true;
  }
  for (std::size_t u : g.neighbors(sink)) {
    if (tree[u]) return tree_nodes;
  }
  std::optional<std::size_t> pick;
  double pick_d = std::numeric_limits<double>::infinity();
  for (std::size_t u : g.neighbors(sink)) {
    if (!policy.eligible(s.nodes[u].energy)) continue;
    bool touches = false;
    for (std::size_t w : g.neighbors(u)) touches = touches || (w != sink && tree[w]);
    if (!touches) continue;
    const double d = distance(g.position(u), s.field.sink);
    if (d < pick_d) {
      pick_d = d;
      pick = u;
    }
  }
  if (pick) tree_nodes.push_back(NodeId{*pick});
  return tree_nodes;
}

}  // namespace wsnvbt
