#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "wsnvbt/energy.hpp"
#include "wsnvbt/rng.hpp"

namespace wsnvbt {

/// Dense index of a sensor node within its scenario.
struct NodeId {
  std::size_t index = 0;
  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class NodeStatus { Tree, CandidateNonTree, PermanentNonTree, Failed };

constexpr std::string_view to_string(NodeStatus s) {
  switch (s) {
    case NodeStatus::Tree: return "tree";
    case NodeStatus::CandidateNonTree: return "candidate";
    case NodeStatus::PermanentNonTree: return "permanent_non_tree";
    case NodeStatus::Failed: return "failed";
  }
  return "?";
}

/// Energy thresholds shared by every construction.
///
/// `th` gates relaying (tree eligibility). `e_fail` is the dead threshold: the
/// energy needed to receive a single packet.
struct EnergyPolicy {
  double e_init = 2.0;
  double th = 0.2;
  double e_fail = 50e-9 * 4096;

  static EnergyPolicy make(const RadioParams& radio, double e_init = 2.0, double th_fraction = 0.1) {
    if (!(e_init > 0.0)) throw std::invalid_argument("e_init must be positive");
    if (!(th_fraction >= 0.0 && th_fraction <= 1.0)) {
      throw std::invalid_argument("th_fraction must lie in [0, 1]");
    }
    EnergyPolicy p;
    p.e_init = e_init;
    p.th = th_fraction * e_init;
    p.e_fail = rx_cost(radio);
    if (p.th < p.e_fail) p.th = p.e_fail;
    return p;
  }

  bool alive(double energy) const { return energy >= e_fail; }
  bool eligible(double energy) const { return energy >= th && alive(energy); }
};

/// Status as a function of residual energy and child count.
inline NodeStatus classify_status(double energy, std::size_t children, const EnergyPolicy& policy) {
  if (!policy.alive(energy)) return NodeStatus::Failed;
  if (energy < policy.th) return NodeStatus::PermanentNonTree;
  return children > 0 ? NodeStatus::Tree : NodeStatus::CandidateNonTree;
}

/// Edges of the node state diagram. Staying in place is always legal.
constexpr bool is_legal_transition(NodeStatus from, NodeStatus to) {
  using enum NodeStatus;
  if (from == to) return true;
  switch (from) {
    case Tree: return to == CandidateNonTree || to == PermanentNonTree;
    case CandidateNonTree: return to == Tree || to == PermanentNonTree;
    case PermanentNonTree: return to == Failed;
    case Failed: return false;
  }
  return false;
}

struct Node {
  NodeId id;
  Vec2 pos;
  double energy = 0.0;
  NodeStatus status = NodeStatus::CandidateNonTree;
};

struct Field {
  double width = 200.0;
  double height = 200.0;
  Vec2 sink{100.0, 100.0};

  bool contains(Vec2 p) const { return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height; }
};

struct Scenario {
  Field field;
  std::vector<Node> nodes;
  double sensing_range = 30.0;
  std::uint64_t rng_seed = 0;

  std::size_t size() const { return nodes.size(); }

  /// Throws std::invalid_argument when a structural invariant is broken.
  void validate() const {
    if (!(field.width > 0.0) || !(field.height > 0.0)) throw std::invalid_argument("field dimensions must be positive");
    if (!field.contains(field.sink)) throw std::invalid_argument("sink outside field");
    if (!(sensing_range > 0.0)) throw std::invalid_argument("sensing range must be positive");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].id.index != i) throw std::invalid_argument("node ids must be dense and ordered");
      if (!field.contains(nodes[i].pos)) throw std::invalid_argument("node outside field");
      if (nodes[i].energy < 0.0) throw std::invalid_argument("negative node energy");
    }
  }
};

/// Sets every status from energy alone (no children yet).
inline void reset_statuses(std::span<Node> nodes, const EnergyPolicy& policy) {
  for (auto& n : nodes) n.status = classify_status(n.energy, 0, policy);
}

/// Statuses from a per-node child count.
inline void apply_statuses(std::span<Node> nodes, std::span<const std::size_t> children, const EnergyPolicy& policy) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes[i].status = classify_status(nodes[i].energy, children[i], policy);
  }
}

inline std::vector<Node> deploy_uniform(const Field& field, std::size_t n, std::uint64_t seed,
                                        const EnergyPolicy& policy = {}) {
  if (n == 0) throw std::invalid_argument("deploy_uniform: n must be at least 1");
  Rng rng(seed);
  std::vector<Node> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].id = NodeId{i};
    nodes[i].pos.x = rng.uniform(0.0, field.width);
    nodes[i].pos.y = rng.uniform(0.0, field.height);
    nodes[i].energy = policy.e_init;
    nodes[i].status = classify_status(nodes[i].energy, 0, policy);
  }
  return nodes;
}

/// Gaussian clusters with uniformly placed centers; samples are clamped into the field.
inline std::vector<Node> deploy_clustered(const Field& field, std::size_t n, std::size_t clusters, double sigma,
                                          std::uint64_t seed, const EnergyPolicy& policy = {}) {
  if (n == 0) throw std::invalid_argument("deploy_clustered: n must be at least 1");
  if (clusters == 0) throw std::invalid_argument("deploy_clustered: need at least one cluster");
  Rng rng(seed);
  std::vector<Vec2> centers(clusters);
  for (auto& c : centers) c = {rng.uniform(0.0, field.width), rng.uniform(0.0, field.height)};
  std::vector<Node> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 c = centers[i % clusters];
    const double x = c.x + sigma * rng.normal();
    const double y = c.y + sigma * rng.normal();
    nodes[i].id = NodeId{i};
    nodes[i].pos = {std::clamp(x, 0.0, field.width), std::clamp(y, 0.0, field.height)};
    nodes[i].energy = policy.e_init;
    nodes[i].status = classify_status(nodes[i].energy, 0, policy);
  }
  return nodes;
}

inline Scenario make_uniform_scenario(const Field& field, std::size_t n, double range, std::uint64_t seed,
                                      const EnergyPolicy& policy = {}) {
  Scenario s;
  s.field = field;
  s.nodes = deploy_uniform(field, n, seed, policy);
  s.sensing_range = range;
  s.rng_seed = seed;
  return s;
}

/// Unit-disk graph over the sensors plus the sink.
///
/// Vertices 0..n-1 are sensors, vertex n is the sink. Edge (i, j) exists iff
/// i != j and their distance is at most the range. Liveness is captured at
/// build time; dead vertices keep their edges but never carry traffic.
class ReachabilityGraph {
 public:
  static ReachabilityGraph build(const Scenario& s, const EnergyPolicy& policy = {}) {
    ReachabilityGraph g;
    const std::size_t n = s.nodes.size();
    g.range_ = s.sensing_range;
    g.positions_.resize(n + 1);
    g.live_.assign(n + 1, true);
    for (std::size_t i = 0; i < n; ++i) {
      g.positions_[i] = s.nodes[i].pos;
      g.live_[i] = policy.alive(s.nodes[i].energy);
    }
    g.positions_[n] = s.field.sink;
    g.adjacency_.assign(n + 1, {});

    // Bucket into range-sized cells and only compare the 3x3 neighborhood.
    const double cell = g.range_;
    const auto cols = static_cast<std::size_t>(std::floor(s.field.width / cell)) + 1;
    const auto rows = static_cast<std::size_t>(std::floor(s.field.height / cell)) + 1;
    auto cell_of = [&](Vec2 p) {
      const auto cx = std::min(cols - 1, static_cast<std::size_t>(std::max(0.0, p.x) / cell));
      const auto cy = std::min(rows - 1, static_cast<std::size_t>(std::max(0.0, p.y) / cell));
      return std::pair{cx, cy};
    };
    std::vector<std::vector<std::size_t>> buckets(cols * rows);
    for (std::size_t v = 0; v <= n; ++v) {
      auto [cx, cy] = cell_of(g.positions_[v]);
      buckets[cy * cols + cx].push_back(v);
    }
    for (std::size_t v = 0; v <= n; ++v) {
      auto [cx, cy] = cell_of(g.positions_[v]);
      for (std::size_t yy = cy == 0 ? 0 : cy - 1; yy <= std::min(rows - 1, cy + 1); ++yy) {
        for (std::size_t xx = cx == 0 ? 0 : cx - 1; xx <= std::min(cols - 1, cx + 1); ++xx) {
          for (std::size_t u : buckets[yy * cols + xx]) {
            if (u != v && distance(g.positions_[u], g.positions_[v]) <= g.range_) g.adjacency_[v].push_back(u);
          }
        }
      }
      std::sort(g.adjacency_[v].begin(), g.adjacency_[v].end());
    }
    return g;
  }

  std::size_t sensor_count() const { return positions_.size() - 1; }
  std::size_t vertex_count() const { return positions_.size(); }
  std::size_t sink() const { return positions_.size() - 1; }
  double range() const { return range_; }
  Vec2 position(std::size_t v) const { return positions_[v]; }
  bool live(std::size_t v) const { return live_[v]; }
  std::span<const std::size_t> neighbors(std::size_t v) const { return adjacency_[v]; }
  double edge_length(std::size_t u, std::size_t v) const { return distance(positions_[u], positions_[v]); }

  bool adjacent(std::size_t u, std::size_t v) const {
    return std::binary_search(adjacency_[u].begin(), adjacency_[u].end(), v);
  }

 private:
  double range_ = 0.0;
  std::vector<Vec2> positions_;
  std::vector<bool> live_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// Live sensors that cannot reach the sink through live vertices.
inline std::vector<NodeId> unreachable_from_sink(const ReachabilityGraph& g) {
  std::vector<bool> seen(g.vertex_count(), false);
  std::vector<std::size_t> stack{g.sink()};
  seen[g.sink()] = true;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t u : g.neighbors(v)) {
      if (!seen[u] && g.live(u)) {
        seen[u] = true;
        stack.push_back(u);
      }
    }
  }
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < g.sensor_count(); ++i) {
    if (g.live(i) && !seen[i]) out.push_back(NodeId{i});
  }
  return out;
}

inline bool is_connected_to_sink(const ReachabilityGraph& g) { return unreachable_from_sink(g).empty(); }

}  // namespace wsnvbt
