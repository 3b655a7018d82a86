#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "wsnvbt/core.hpp"
#include "wsnvbt/energy.hpp"
#include "wsnvbt/errors.hpp"
#include "wsnvbt/text.hpp"

namespace wsnvbt {

/// Upstream hop of a node: nothing yet, the sink, or another sensor.
class Parent {
 public:
  static constexpr Parent none() { return Parent{Kind::None, {}}; }
  static constexpr Parent sink() { return Parent{Kind::Sink, {}}; }
  static constexpr Parent node(NodeId id) { return Parent{Kind::Node, id}; }

  constexpr bool is_none() const { return kind_ == Kind::None; }
  constexpr bool is_sink() const { return kind_ == Kind::Sink; }
  constexpr bool is_node() const { return kind_ == Kind::Node; }
  constexpr NodeId id() const { return id_; }

  /// Graph vertex index (sink is `sink_vertex`). Undefined for none().
  constexpr std::size_t vertex(std::size_t sink_vertex) const { return is_sink() ? sink_vertex : id_.index; }

  static constexpr Parent from_vertex(std::size_t v, std::size_t sink_vertex) {
    return v == sink_vertex ? sink() : node(NodeId{v});
  }

  std::string to_string() const {
    if (is_none()) return "none";
    if (is_sink()) return "sink";
    return std::to_string(id_.index);
  }

  friend constexpr bool operator==(Parent, Parent) = default;

 private:
  enum class Kind { None, Sink, Node };
  constexpr Parent(Kind k, NodeId id) : kind_(k), id_(id) {}
  Kind kind_;
  NodeId id_;
};

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Sink-rooted backbone: parent pointers plus Consumption(i) for every node.
struct BackboneTree {
  std::vector<Parent> parent;
  std::vector<double> consumption;
  std::vector<std::size_t> children_count;

  std::size_t size() const { return parent.size(); }
  bool reaches_sink(NodeId i) const { return consumption[i.index] != kUnreachable; }

  std::size_t tree_node_count() const {
    std::size_t k = 0;
    for (auto c : children_count) k += c > 0;
    return k;
  }

  /// Sensor ids from `i` (inclusive) up to, not including, the sink.
  std::vector<NodeId> route(NodeId i) const {
    std::vector<NodeId> out;
    if (!reaches_sink(i)) return out;
    Parent p = Parent::node(i);
    while (p.is_node()) {
      out.push_back(p.id());
      p = parent[p.id().index];
    }
    return out;
  }

  friend bool operator==(const BackboneTree&, const BackboneTree&) = default;
};

enum class ChangeKind { Reparented, Promoted, Demoted, Unreachable, Rebuilt, SinkMoved };

constexpr std::string_view to_string(ChangeKind k) {
  switch (k) {
    case ChangeKind::Reparented: return "reparented";
    case ChangeKind::Promoted: return "promoted";
    case ChangeKind::Demoted: return "demoted";
    case ChangeKind::Unreachable: return "unreachable";
    case ChangeKind::Rebuilt: return "rebuilt";
    case ChangeKind::SinkMoved: return "sink_moved";
  }
  return "?";
}

struct ChangeEvent {
  ChangeKind kind;
  std::optional<NodeId> node;
  std::string detail;
};

struct ChangeReport {
  std::vector<ChangeEvent> events;
  bool empty() const { return events.empty(); }
};

namespace detail {

inline bool can_relay(const Scenario& s, const EnergyPolicy& policy, std::size_t v) {
  return v == s.nodes.size() || policy.eligible(s.nodes[v].energy);
}

// Sink ranks below every sensor so that it wins exact ties.
inline std::size_t tie_rank(std::size_t v, std::size_t sink) { return v == sink ? 0 : v + 1; }

}  // namespace detail

/// Minimal-energy backbone: shortest-path tree toward the sink under
/// w(u -> v) = tx(|uv|) + rx (rx omitted when v is the sink), where only
/// Th-eligible nodes may relay. Exact ties go to the smaller candidate parent id.
///
/// Throws ConstructionFailed listing every live node left without a route.
inline BackboneTree build_mmevbt(const Scenario& s, const ReachabilityGraph& g, const RadioParams& radio,
                                 const EnergyPolicy& policy) {
  const std::size_t n = s.nodes.size();
  const std::size_t sink = g.sink();
  BackboneTree t;
  t.parent.assign(n, Parent::none());
  t.consumption.assign(n, kUnreachable);
  t.children_count.assign(n, 0);

  std::vector<double> cost(n + 1, kUnreachable);
  std::vector<std::size_t> via(n + 1, sink);
  std::vector<bool> done(n + 1, false);
  cost[sink] = 0.0;

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  heap.emplace(0.0, sink);
  while (!heap.empty()) {
    const auto [c, v] = heap.top();
    heap.pop();
    if (done[v]) continue;
    done[v] = true;
    if (!detail::can_relay(s, policy, v)) continue;
    for (std::size_t u : g.neighbors(v)) {
      if (u == sink || done[u] || !g.live(u)) continue;
      const double cand = c + hop_weight(radio, g.edge_length(u, v), v == sink);
      if (cand < cost[u]) {
        cost[u] = cand;
        via[u] = v;
        heap.emplace(cand, u);
      } else if (cand == cost[u] && detail::tie_rank(v, sink) < detail::tie_rank(via[u], sink)) {
        via[u] = v;
      }
    }
  }

  std::vector<NodeId> missing;
  for (std::size_t i = 0; i < n; ++i) {
    if (!g.live(i)) continue;
    if (cost[i] == kUnreachable) {
      missing.push_back(NodeId{i});
      continue;
    }
    t.consumption[i] = cost[i];
    t.parent[i] = Parent::from_vertex(via[i], sink);
    if (via[i] != sink) ++t.children_count[via[i]];
  }
  if (!missing.empty()) throw ConstructionFailed(std::move(missing));
  return t;
}

inline BackboneTree build_mmevbt(const Scenario& s, const RadioParams& radio, const EnergyPolicy& policy) {
  return build_mmevbt(s, ReachabilityGraph::build(s, policy), radio, policy);
}

inline void apply_tree_statuses(Scenario& s, const BackboneTree& t, const EnergyPolicy& policy) {
  apply_statuses(s.nodes, t.children_count, policy);
}

namespace detail {

inline std::vector<std::vector<std::size_t>> child_lists(const BackboneTree& t) {
  std::vector<std::vector<std::size_t>> kids(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.parent[i].is_node()) kids[t.parent[i].id().index].push_back(i);
  }
  return kids;
}

// Breadth-first order of the subtree hanging below `root`, root excluded.
inline std::vector<std::size_t> descendants(const std::vector<std::vector<std::size_t>>& kids, std::size_t root) {
  std::vector<std::size_t> out(kids[root].begin(), kids[root].end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (std::size_t c : kids[out[k]]) out.push_back(c);
  }
  return out;
}

}  // namespace detail

/// Moves `node` to the neighbor minimizing w(node -> p) + Consumption(p) among
/// eligible neighbors that still route to the sink and are not below `node`.
///
/// Consumption of the moved subtree is recomputed along the new chain. Statuses
/// are refreshed from the new child counts. Returns an empty report at a fixed point.
inline ChangeReport reparent_if_better(BackboneTree& t, Scenario& s, NodeId node, const ReachabilityGraph& g,
                                       const RadioParams& radio, const EnergyPolicy& policy) {
  ChangeReport report;
  const std::size_t sink = g.sink();
  const std::size_t i = node.index;
  const auto kids = detail::child_lists(t);
  const auto below = detail::descendants(kids, i);
  std::vector<bool> in_subtree(t.size(), false);
  for (std::size_t d : below) in_subtree[d] = true;

  std::size_t best = sink + 1;
  double best_cost = kUnreachable;
  for (std::size_t v : g.neighbors(i)) {
    if (v != sink) {
      if (!g.live(v) || !policy.eligible(s.nodes[v].energy) || in_subtree[v]) continue;
      if (t.consumption[v] == kUnreachable) continue;
    }
    const double base = v == sink ? 0.0 : t.consumption[v];
    const double c = base + hop_weight(radio, g.edge_length(i, v), v == sink);
    if (c < best_cost || (c == best_cost && detail::tie_rank(v, sink) < detail::tie_rank(best, sink))) {
      best_cost = c;
      best = v;
    }
  }

  const Parent old_parent = t.parent[i];
  const std::vector<NodeStatus> before = [&] {
    std::vector<NodeStatus> st;
    for (const auto& n : s.nodes) st.push_back(n.status);
    return st;
  }();

  if (best == sink + 1) {
    if (old_parent.is_node()) --t.children_count[old_parent.id().index];
    t.parent[i] = Parent::none();
    t.consumption[i] = kUnreachable;
    report.events.push_back({ChangeKind::Unreachable, node, "no eligible parent"});
    for (std::size_t d : below) {
      t.parent[d] = Parent::none();
      t.consumption[d] = kUnreachable;
      t.children_count[d] = 0;
      report.events.push_back({ChangeKind::Unreachable, NodeId{d}, "upstream lost"});
    }
    t.children_count[i] = 0;
  } else {
    const Parent next = Parent::from_vertex(best, sink);
    if (next == old_parent) return report;
    if (old_parent.is_node()) --t.children_count[old_parent.id().index];
    if (next.is_node()) ++t.children_count[best];
    t.parent[i] = next;
    t.consumption[i] = best_cost;
    report.events.push_back({ChangeKind::Reparented, node, old_parent.to_string() + "->" + next.to_string()});
    for (std::size_t d : below) {
      const std::size_t p = t.parent[d].id().index;
      t.consumption[d] = t.consumption[p] + hop_weight(radio, g.edge_length(d, p), false);
    }
  }

  apply_tree_statuses(s, t, policy);
  auto note = [&](Parent p) {
    if (!p.is_node()) return;
    const std::size_t k = p.id().index;
    if (before[k] == s.nodes[k].status) return;
    if (s.nodes[k].status == NodeStatus::Tree) {
      report.events.push_back({ChangeKind::Promoted, p.id(), std::string(to_string(before[k])) + "->tree"});
    } else if (before[k] == NodeStatus::Tree) {
      report.events.push_back({ChangeKind::Demoted, p.id(), "tree->" + std::string(to_string(s.nodes[k].status))});
    }
  };
  note(old_parent);
  note(t.parent[i]);
  return report;
}

/// Diff of two trees as change events (parent switches, promotions, demotions).
inline ChangeReport diff_trees(const BackboneTree& before, const BackboneTree& after) {
  ChangeReport r;
  for (std::size_t i = 0; i < after.size(); ++i) {
    const NodeId id{i};
    if (i < before.size() && before.parent[i] != after.parent[i]) {
      const auto kind = after.parent[i].is_none() ? ChangeKind::Unreachable : ChangeKind::Reparented;
      r.events.push_back({kind, id, before.parent[i].to_string() + "->" + after.parent[i].to_string()});
    }
    const bool was = i < before.size() && before.children_count[i] > 0;
    const bool is = after.children_count[i] > 0;
    if (!was && is) r.events.push_back({ChangeKind::Promoted, id, "tree"});
    if (was && !is) r.events.push_back({ChangeKind::Demoted, id, "non-tree"});
  }
  return r;
}

/// Rebuild on the current energies. Observationally the semantic baseline for
/// any repair strategy. Statuses in `s` are refreshed; ConstructionFailed propagates.
inline BackboneTree maintain_after_drain(const BackboneTree& previous, Scenario& s, const RadioParams& radio,
                                         const EnergyPolicy& policy, ChangeReport* report = nullptr) {
  BackboneTree next = build_mmevbt(s, radio, policy);
  apply_tree_statuses(s, next, policy);
  if (report) {
    auto d = diff_trees(previous, next);
    report->events.insert(report->events.end(), d.events.begin(), d.events.end());
  }
  return next;
}

/// Target of a sink move: the centre of the grid cell with the highest mean
/// residual energy among live nodes. Cells are indexed row-major from the
/// origin; exact ties go to the smaller index. With `max_step`, the sink moves
/// at most that far along the straight line toward the target.
inline Vec2 relocate_sink(const Scenario& s, std::size_t grid, std::optional<double> max_step,
                          const EnergyPolicy& policy) {
  if (grid == 0) throw std::invalid_argument("relocate_sink: grid must be at least 1");
  const double cw = s.field.width / static_cast<double>(grid);
  const double ch = s.field.height / static_cast<double>(grid);
  std::vector<double> sum(grid * grid, 0.0);
  std::vector<std::size_t> count(grid * grid, 0);
  for (const auto& n : s.nodes) {
    if (!policy.alive(n.energy)) continue;
    const auto cx = std::min(grid - 1, static_cast<std::size_t>(n.pos.x / cw));
    const auto cy = std::min(grid - 1, static_cast<std::size_t>(n.pos.y / ch));
    sum[cy * grid + cx] += n.energy;
    ++count[cy * grid + cx];
  }
  std::optional<std::size_t> best;
  double best_mean = -1.0;
  for (std::size_t c = 0; c < sum.size(); ++c) {
    if (count[c] == 0) continue;
    const double mean = sum[c] / static_cast<double>(count[c]);
    if (mean > best_mean) {
      best_mean = mean;
      best = c;
    }
  }
  if (!best) return s.field.sink;
  const Vec2 target{(static_cast<double>(*best % grid) + 0.5) * cw, (static_cast<double>(*best / grid) + 0.5) * ch};
  if (!max_step) return target;
  const double gap = distance(s.field.sink, target);
  if (gap <= *max_step) return target;
  const double f = *max_step / gap;
  return {s.field.sink.x + f * (target.x - s.field.sink.x), s.field.sink.y + f * (target.y - s.field.sink.y)};
}

}  // namespace wsnvbt
