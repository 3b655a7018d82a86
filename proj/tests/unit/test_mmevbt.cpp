#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wsnvbt/mmevbt.hpp"

using namespace wsnvbt;

namespace {

const RadioParams kRadio;
const EnergyPolicy kPolicy;

Scenario scenario_of(std::vector<Vec2> pts, double range, double energy = 2.0) {
  Scenario s;
  s.sensing_range = range;
  for (std::size_t i = 0; i < pts.size(); ++i) s.nodes.push_back(Node{NodeId{i}, pts[i], energy});
  return s;
}

void expect_matches_oracle(const Scenario& s, const BackboneTree& t) {
  const auto ref = oracle::bellman_ford_consumption(s, kRadio.e_elec, kRadio.e_amp, kRadio.packet_bits, kPolicy.th,
                                                    kPolicy.e_fail);
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    if (std::isinf(ref[i])) {
      EXPECT_FALSE(t.reaches_sink(NodeId{i}));
    } else {
      EXPECT_NEAR(t.consumption[i], ref[i], 1e-9 * ref[i]) << "node " << i;
    }
  }
}

void expect_invariants(const Scenario& s, const BackboneTree& t) {
  std::vector<std::size_t> kids(s.nodes.size(), 0);
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const Parent p = t.parent[i];
    if (!p.is_node()) continue;
    ++kids[p.id().index];
    EXPECT_TRUE(kPolicy.eligible(s.nodes[p.id().index].energy)) << "ineligible parent of " << i;
    EXPECT_LE(distance(s.nodes[i].pos, s.nodes[p.id().index].pos), s.sensing_range);
    EXPECT_GT(t.consumption[i], t.consumption[p.id().index]);
  }
  EXPECT_EQ(kids, t.children_count);
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    EXPECT_EQ(s.nodes[i].status == NodeStatus::Tree, t.children_count[i] > 0) << "node " << i;
  }
}

}  // namespace

TEST(Mmevbt, SingleNodeNearSink) {
  auto s = scenario_of({{110, 100}}, 20);
  const auto t = build_mmevbt(s, kRadio, kPolicy);
  EXPECT_TRUE(t.parent[0].is_sink());
  EXPECT_NEAR(t.consumption[0], 2.4576e-4, 1e-18);
  EXPECT_EQ(t.tree_node_count(), 0u);
}

TEST(Mmevbt, CollinearPairGoesDirect) {
  // A 10 m and B 20 m from the sink on one line. A -> sink; B goes direct since
  // tx(20) = 3.6864e-4 beats tx(10) + rx + C(A) = 6.9632e-4.
  auto s = scenario_of({{110, 100}, {120, 100}}, 25);
  const auto t = build_mmevbt(s, kRadio, kPolicy);
  EXPECT_TRUE(t.parent[0].is_sink());
  EXPECT_NEAR(t.consumption[0], 2.4576e-4, 1e-18);
  EXPECT_TRUE(t.parent[1].is_sink());
  EXPECT_NEAR(t.consumption[1], 3.6864e-4, 1e-18);
}

TEST(Mmevbt, OutOfSinkRangeRelays) {
  auto s = scenario_of({{110, 100}, {125, 100}}, 20);
  const auto t = build_mmevbt(s, kRadio, kPolicy);
  EXPECT_EQ(t.parent[1], Parent::node(NodeId{0}));
  EXPECT_NEAR(t.consumption[1], 2.4576e-4 + 2.048e-4 + tx_cost(kRadio, 15), 1e-15);
  ASSERT_EQ(t.route(NodeId{1}).size(), 2u);
}

TEST(Mmevbt, IneligibleRelayFailsConstruction) {
  auto s = scenario_of({{110, 100}, {125, 100}}, 20);
  s.nodes[0].energy = 0.1;  // below Th, alive
  try {
    build_mmevbt(s, kRadio, kPolicy);
    FAIL();
  } catch (const ConstructionFailed& e) {
    ASSERT_EQ(e.unreachable().size(), 1u);
    EXPECT_EQ(e.unreachable()[0].index, 1u);
  }
}

TEST(Mmevbt, MatchesBellmanFordOnRandomInstances) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto s = make_uniform_scenario(Field{}, 60, 45.0, seed);
    Rng rng(seed + 1000);
    for (auto& n : s.nodes) n.energy = rng.uniform(0.0, 2.0);
    try {
      const auto t = build_mmevbt(s, kRadio, kPolicy);
      apply_tree_statuses(s, t, kPolicy);
      expect_matches_oracle(s, t);
      expect_invariants(s, t);
      ++checked;
    } catch (const ConstructionFailed& e) {
      const auto ref = oracle::bellman_ford_consumption(s, kRadio.e_elec, kRadio.e_amp, kRadio.packet_bits,
                                                        kPolicy.th, kPolicy.e_fail);
      for (NodeId id : e.unreachable()) EXPECT_TRUE(std::isinf(ref[id.index]));
    }
  }
  EXPECT_GT(checked, 20u);
}

TEST(Mmevbt, ReparentAtFixedPointIsNoop) {
  auto s = make_uniform_scenario(Field{}, 150, 35.0, 5);
  const auto g = ReachabilityGraph::build(s, kPolicy);
  auto t = build_mmevbt(s, g, kRadio, kPolicy);
  apply_tree_statuses(s, t, kPolicy);
  const auto before = t;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    EXPECT_TRUE(reparent_if_better(t, s, NodeId{i}, g, kRadio, kPolicy).empty());
  }
  EXPECT_EQ(t, before);
}

TEST(Mmevbt, ReparentAfterDrainMovesChildAndDemotes) {
  // Node 1 is out of sink range and can relay through 0 or 2. Draining its
  // relay below Th must move it onto the other one and demote the old relay.
  auto s = scenario_of({{115, 100}, {128, 101}, {116, 103}}, 20);
  auto g = ReachabilityGraph::build(s, kPolicy);
  auto t = build_mmevbt(s, g, kRadio, kPolicy);
  apply_tree_statuses(s, t, kPolicy);
  ASSERT_TRUE(t.parent[1].is_node());
  const std::size_t relay = t.parent[1].id().index;
  const std::size_t other = relay == 0 ? 2 : 0;
  EXPECT_EQ(s.nodes[relay].status, NodeStatus::Tree);

  s.nodes[relay].energy = 0.1;
  g = ReachabilityGraph::build(s, kPolicy);
  const auto report = reparent_if_better(t, s, NodeId{1}, g, kRadio, kPolicy);
  EXPECT_EQ(t.parent[1], Parent::node(NodeId{other}));
  EXPECT_EQ(s.nodes[relay].status, NodeStatus::PermanentNonTree);
  EXPECT_EQ(s.nodes[other].status, NodeStatus::Tree);
  bool reparented = false;
  for (const auto& e : report.events) reparented = reparented || e.kind == ChangeKind::Reparented;
  EXPECT_TRUE(reparented);
  expect_matches_oracle(s, t);
}

TEST(Mmevbt, ReparentWithoutOptionsDetachesSubtree) {
  auto s = scenario_of({{115, 100}, {130, 100}, {145, 100}}, 20);
  auto g = ReachabilityGraph::build(s, kPolicy);
  auto t = build_mmevbt(s, g, kRadio, kPolicy);
  apply_tree_statuses(s, t, kPolicy);
  ASSERT_EQ(t.parent[2], Parent::node(NodeId{1}));
  s.nodes[0].energy = 0.1;
  g = ReachabilityGraph::build(s, kPolicy);
  const auto report = reparent_if_better(t, s, NodeId{1}, g, kRadio, kPolicy);
  EXPECT_TRUE(t.parent[1].is_none());
  EXPECT_TRUE(t.parent[2].is_none());
  EXPECT_GE(report.events.size(), 2u);
}

TEST(Mmevbt, MaintainEqualsRebuild) {
  auto s = make_uniform_scenario(Field{}, 200, 30.0, 11);
  auto t = build_mmevbt(s, kRadio, kPolicy);
  apply_tree_statuses(s, t, kPolicy);
  Rng rng(4);
  for (auto& n : s.nodes) n.energy -= rng.uniform(0.0, 1.5);
  ChangeReport report;
  const auto kept = maintain_after_drain(t, s, kRadio, kPolicy, &report);
  EXPECT_EQ(kept, build_mmevbt(s, kRadio, kPolicy));
  expect_invariants(s, kept);
  expect_matches_oracle(s, kept);
}

TEST(Mmevbt, RelocateSinkUniformEnergyStays) {
  // All cells share the same mean, so the first cell wins; with a zero step the sink holds.
  auto s = make_uniform_scenario(Field{}, 400, 30.0, 2);
  EXPECT_EQ(relocate_sink(s, 4, 0.0, kPolicy), s.field.sink);
  const Vec2 first = relocate_sink(s, 4, std::nullopt, kPolicy);
  EXPECT_EQ(first, (Vec2{25, 25}));
}

TEST(Mmevbt, RelocateSinkPicksRichestCell) {
  auto s = make_uniform_scenario(Field{}, 400, 30.0, 2);
  for (auto& n : s.nodes) {
    if (n.pos.x >= 150 && n.pos.y >= 100 && n.pos.y < 150) n.energy = 2.0;
    else n.energy = 1.0;
  }
  EXPECT_EQ(relocate_sink(s, 4, std::nullopt, kPolicy), (Vec2{175, 125}));
}

TEST(Mmevbt, RelocateSinkStepLimit) {
  Scenario s;
  s.field.sink = {125, 125};
  // The rich node puts the target at the centre of cell (3, 2): (175, 125), 50 m east.
  s.nodes = {Node{NodeId{0}, {180, 120}, 2.0}, Node{NodeId{1}, {10, 10}, 1.0}};
  EXPECT_EQ(relocate_sink(s, 4, std::nullopt, kPolicy), (Vec2{175, 125}));
  const Vec2 p = relocate_sink(s, 4, 10.0, kPolicy);
  EXPECT_NEAR(p.x, 135.0, 1e-12);
  EXPECT_NEAR(p.y, 125.0, 1e-12);
  EXPECT_EQ(relocate_sink(s, 4, 60.0, kPolicy), (Vec2{175, 125}));
}
