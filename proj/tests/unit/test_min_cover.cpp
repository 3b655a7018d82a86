#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "wsnvbt/min_cover.hpp"

using namespace wsnvbt;

namespace {

const EnergyPolicy kPolicy;

Scenario small_instance(std::uint64_t seed, std::size_t n, double side, double range) {
  Field f{side, side, {side / 2, side / 2}};
  return make_uniform_scenario(f, n, range, seed);
}

// Sensor-only adjacency (sink dropped).
std::vector<std::set<std::size_t>> sensor_adjacency(const Scenario& s) {
  const auto full = oracle::brute_adjacency(s);
  std::vector<std::set<std::size_t>> adj(s.nodes.size());
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    for (std::size_t j : full[i]) {
      if (j < s.nodes.size()) adj[i].insert(j);
    }
  }
  return adj;
}

bool sensors_connected(const std::vector<std::set<std::size_t>>& adj) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto u : adj[v]) {
      if (!seen[u]) {
        seen[u] = true;
        stack.push_back(u);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

}  // namespace

TEST(MinCover, CollinearTripleUsesMiddle) {
  Scenario s;
  s.sensing_range = 20;
  s.nodes = {Node{NodeId{0}, {110, 100}, 2.0}, Node{NodeId{1}, {125, 100}, 2.0}, Node{NodeId{2}, {140, 100}, 2.0}};
  const auto r = build_min_cover(s, kPolicy);
  ASSERT_EQ(r.tree_nodes.size(), 1u);
  EXPECT_EQ(r.tree_nodes[0].index, 1u);
  EXPECT_EQ(r.state.covered, (std::vector<std::uint8_t>{1, 2, 1}));
  EXPECT_FALSE(r.state.flag);
}

TEST(MinCover, SingleNode) {
  Scenario s;
  s.nodes = {Node{NodeId{0}, {110, 100}, 2.0}};
  const auto r = build_min_cover(s, kPolicy);
  ASSERT_EQ(r.tree_nodes.size(), 1u);
  EXPECT_EQ(r.tree_nodes[0].index, 0u);
}

TEST(MinCover, DisconnectedFails) {
  Scenario s;
  s.sensing_range = 20;
  s.nodes = {Node{NodeId{0}, {110, 100}, 2.0}, Node{NodeId{1}, {125, 100}, 2.0}, Node{NodeId{2}, {10, 10}, 2.0}};
  try {
    build_min_cover(s, kPolicy);
    FAIL();
  } catch (const ConstructionFailed& e) {
    ASSERT_EQ(e.unreachable().size(), 1u);
    EXPECT_EQ(e.unreachable()[0].index, 2u);
  }
}

TEST(MinCover, NeverBeatsExhaustiveOptimumAndCoversEverything) {
  std::size_t compared = 0;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto s = small_instance(seed, 12, 70.0, 25.0);
    const auto adj = sensor_adjacency(s);
    if (!sensors_connected(adj)) {
      EXPECT_THROW(build_min_cover(s, kPolicy), ConstructionFailed) << "seed " << seed;
      continue;
    }
    const auto r = build_min_cover(s, kPolicy);
    EXPECT_GE(r.tree_nodes.size(), oracle::min_connected_cover_size(s)) << "seed " << seed;

    std::set<std::size_t> picked;
    for (NodeId t : r.tree_nodes) picked.insert(t.index);
    EXPECT_EQ(picked.size(), r.tree_nodes.size());
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
      bool dominated = picked.count(i) > 0;
      for (auto j : adj[i]) dominated = dominated || picked.count(j) > 0;
      EXPECT_TRUE(dominated) << "seed " << seed << " node " << i;
    }
    // Every pick after the seed touches an earlier pick.
    for (std::size_t k = 1; k < r.tree_nodes.size(); ++k) {
      bool touches = false;
      for (std::size_t m = 0; m < k; ++m) touches = touches || adj[r.tree_nodes[k].index].count(r.tree_nodes[m].index);
      EXPECT_TRUE(touches);
    }
    ++compared;
  }
  EXPECT_GE(compared, 40u);
}

TEST(MinCover, EachPickMaximisesNewCoverage) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = make_uniform_scenario(Field{}, 200, 35.0, seed);
    const auto adj = sensor_adjacency(s);
    CoverResult r;
    try {
      r = build_min_cover(s, kPolicy);
    } catch (const ConstructionFailed&) {
      continue;
    }
    // Seed has the maximum degree, first one on ties.
    std::size_t best_deg = 0;
    for (const auto& a : adj) best_deg = std::max(best_deg, a.size());
    EXPECT_EQ(adj[r.tree_nodes[0].index].size(), best_deg);

    std::vector<int> mark(s.nodes.size(), 0);
    auto take = [&](std::size_t t) {
      mark[t] = 2;
      for (auto j : adj[t]) {
        if (mark[j] != 2) mark[j] = 1;
      }
    };
    auto gain = [&](std::size_t b) {
      std::size_t g = 0;
      for (auto j : adj[b]) g += mark[j] == 0;
      return g;
    };
    take(r.tree_nodes[0].index);
    for (std::size_t k = 1; k < r.tree_nodes.size(); ++k) {
      const std::size_t t = r.tree_nodes[k].index;
      ASSERT_EQ(mark[t], 1);
      for (std::size_t b = 0; b < s.nodes.size(); ++b) {
        if (mark[b] == 1) {
          EXPECT_GE(gain(t), gain(b)) << "seed " << seed << " step " << k;
        }
      }
      take(t);
    }
    EXPECT_EQ(std::count(mark.begin(), mark.end(), 0), 0);
  }
}

TEST(MinCover, DeterministicAndSkipsIneligibleRelays) {
  auto s = make_uniform_scenario(Field{}, 200, 35.0, 3);
  const auto a = build_min_cover(s, kPolicy);
  const auto b = build_min_cover(s, kPolicy);
  EXPECT_EQ(a.tree_nodes, b.tree_nodes);
  // Drain the second pick: it can no longer be chosen after the seed.
  if (a.tree_nodes.size() > 1) {
    s.nodes[a.tree_nodes[1].index].energy = 0.1;
    try {
      const auto c = build_min_cover(s, kPolicy);
      for (std::size_t k = 1; k < c.tree_nodes.size(); ++k) EXPECT_NE(c.tree_nodes[k], a.tree_nodes[1]);
    } catch (const ConstructionFailed&) {
    }
  }
}
