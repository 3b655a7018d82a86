#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wsnvbt/core.hpp"
#include "wsnvbt/errors.hpp"

namespace wsnvbt {

/// Per-node cover marks: 0 uncovered, 1 covered, 2 tree node.
struct CoverState {
  std::vector<std::uint8_t> covered;
  std::vector<std::size_t> wd;
  bool flag = false;
};

struct CoverResult {
  std::vector<NodeId> tree_nodes;  // in pick order, seed first
  CoverState state;
};

struct CoverOptions {
  // The greedy seed is picked on reachability alone. Set this to also demand
  // energy >= Th from the seed, as every later pick does.
  bool require_eligible_seed = false;
};

/// Greedy minimal-tree-node cover.
///
/// Seed = node with the most neighbors. Then, while anything is uncovered, the
/// covered, Th-eligible node reaching the most uncovered nodes becomes a tree
/// node. Ties keep the first maximum (smallest id). The sink is not part of the
/// cover universe and Failed nodes are ignored.
///
/// Throws ConstructionFailed with the uncovered ids when a round cannot make progress.
inline CoverResult build_min_cover(const Scenario& s, const ReachabilityGraph& g, const EnergyPolicy& policy,
                                   CoverOptions opts = {}) {
  const std::size_t n = s.nodes.size();
  const std::size_t sink = g.sink();
  CoverResult r;
  auto& covered = r.state.covered;
  auto& wd = r.state.wd;
  covered.assign(n, 0);
  wd.assign(n, 0);

  auto live = [&](std::size_t v) { return v != sink && g.live(v); };
  auto mark_around = [&](std::size_t t) {
    covered[t] = 2;
    for (std::size_t k : g.neighbors(t)) {
      if (live(k) && covered[k] != 2) covered[k] = 1;
    }
  };
  auto uncovered = [&] {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < n; ++i) {
      if (live(i) && covered[i] == 0) out.push_back(NodeId{i});
    }
    return out;
  };

  long long max = -1;
  std::size_t maxid = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!live(i)) continue;
    if (opts.require_eligible_seed && !policy.eligible(s.nodes[i].energy)) continue;
    long long rts = 0;
    for (std::size_t k : g.neighbors(i)) rts += live(k);
    if (max < rts) {
      max = rts;
      maxid = i;
    }
  }
  if (maxid == n) {
    auto missing = uncovered();
    if (missing.empty()) return r;
    throw ConstructionFailed(std::move(missing));
  }
  mark_around(maxid);
  r.tree_nodes.push_back(NodeId{maxid});

  r.state.flag = !uncovered().empty();
  while (r.state.flag) {
    std::fill(wd.begin(), wd.end(), 0);
    for (std::size_t b = 0; b < n; ++b) {
      if (covered[b] != 1 || !policy.eligible(s.nodes[b].energy)) continue;
      for (std::size_t c : g.neighbors(b)) {
        if (live(c) && covered[c] == 0) ++wd[b];
      }
    }
    max = -1;
    maxid = n;
    for (std::size_t b = 0; b < n; ++b) {
      if (covered[b] != 1 || !policy.eligible(s.nodes[b].energy)) continue;
      if (static_cast<long long>(wd[b]) > max) {
        max = static_cast<long long>(wd[b]);
        maxid = b;
      }
    }
    if (maxid == n || max == 0) throw ConstructionFailed(uncovered());
    mark_around(maxid);
    r.tree_nodes.push_back(NodeId{maxid});
    r.state.flag = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (live(k) && covered[k] == 0) {
        r.state.flag = true;
        break;
      }
    }
  }
  return r;
}

inline CoverResult build_min_cover(const Scenario& s, const EnergyPolicy& policy, CoverOptions opts = {}) {
  return build_min_cover(s, ReachabilityGraph::build(s, policy), policy, opts);
}

}  // namespace wsnvbt
