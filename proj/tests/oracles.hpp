#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the algorithms it checks; only plain data types are shared.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "wsnvbt/balanced.hpp"
#include "wsnvbt/core.hpp"
#include "wsnvbt/energy.hpp"

namespace oracle {

using wsnvbt::Scenario;

/// O(n^2) unit-disk adjacency including the sink as vertex n.
inline std::vector<std::vector<std::size_t>> brute_adjacency(const Scenario& s) {
  const std::size_t n = s.nodes.size();
  std::vector<wsnvbt::Vec2> p;
  for (const auto& node : s.nodes) p.push_back(node.pos);
  p.push_back(s.field.sink);
  std::vector<std::vector<std::size_t>> adj(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      const double dx = p[i].x - p[j].x, dy = p[i].y - p[j].y;
      if (i != j && std::sqrt(dx * dx + dy * dy) <= s.sensing_range) adj[i].push_back(j);
    }
  }
  return adj;
}

/// Bellman-Ford minimal consumption to the sink. Relays must hold energy >= th;
/// the sink receives for free. Infinity marks unreachable or dead nodes.
inline std::vector<double> bellman_ford_consumption(const Scenario& s, double e_elec, double e_amp, double bits,
                                                    double th, double e_fail) {
  const std::size_t n = s.nodes.size();
  const auto adj = brute_adjacency(s);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> c(n + 1, inf);
  c[n] = 0.0;
  auto pos = [&](std::size_t v) { return v == n ? s.field.sink : s.nodes[v].pos; };
  auto alive = [&](std::size_t v) { return v == n || s.nodes[v].energy >= e_fail; };
  auto relay = [&](std::size_t v) { return v == n || (s.nodes[v].energy >= th && alive(v)); };
  for (std::size_t pass = 0; pass <= n; ++pass) {
    bool changed = false;
    for (std::size_t u = 0; u < n; ++u) {
      if (!alive(u)) continue;
      for (std::size_t v : adj[u]) {
        if (!relay(v) || c[v] == inf) continue;
        const double dx = pos(u).x - pos(v).x, dy = pos(u).y - pos(v).y;
        const double d2 = dx * dx + dy * dy;
        const double w = e_elec * bits + e_amp * bits * d2 + (v == n ? 0.0 : e_elec * bits);
        if (c[v] + w < c[u]) {
          c[u] = c[v] + w;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  c.pop_back();
  return c;
}

/// Smallest connected dominating set over sensors only (exhaustive, n <= ~14).
inline std::size_t min_connected_cover_size(const Scenario& s) {
  const std::size_t n = s.nodes.size();
  const auto adj = brute_adjacency(s);
  std::vector<std::uint32_t> nb(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : adj[i]) {
      if (j < n) nb[i] |= 1u << j;
    }
  }
  std::size_t best = n + 1;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size >= best) continue;
    std::uint32_t dom = mask;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1u) dom |= nb[i];
    }
    if (dom != (1u << n) - 1) continue;
    std::uint32_t seen = mask & (~mask + 1);
    for (bool grew = true; grew;) {
      grew = false;
      for (std::size_t i = 0; i < n; ++i) {
        if ((seen >> i & 1u) && ((nb[i] & mask) | seen) != seen) {
          seen |= nb[i] & mask;
          grew = true;
        }
      }
    }
    if (seen == mask) best = size;
  }
  return best;
}

/// Optimal mc by enumerating every assignment.
inline std::size_t brute_min_max(const wsnvbt::ForwardingProblem& pb) {
  const std::size_t n = pb.senders.size();
  if (n == 0) return 0;
  std::vector<std::size_t> idx(n, 0);
  std::size_t best = n;
  while (true) {
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(pb.candidates[i][idx[i]].tree_node.index);
    std::sort(ids.begin(), ids.end());
    std::size_t run = 1, mc = 1;
    for (std::size_t k = 1; k < ids.size(); ++k) {
      run = ids[k] == ids[k - 1] ? run + 1 : 1;
      mc = std::max(mc, run);
    }
    best = std::min(best, mc);
    std::size_t k = 0;
    while (k < n && ++idx[k] == pb.candidates[k].size()) idx[k++] = 0;
    if (k == n) break;
  }
  return best;
}

inline double binomial_se(double p, double trials) { return std::sqrt(p * (1.0 - p) / trials); }

}  // namespace oracle
