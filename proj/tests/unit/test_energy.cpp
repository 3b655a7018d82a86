#include <gtest/gtest.h>

#include <vector>

#include "wsnvbt/energy.hpp"
#include "wsnvbt/rng.hpp"

using namespace wsnvbt;

TEST(Energy, TxCostHandValues) {
  const RadioParams p;
  EXPECT_NEAR(tx_cost(p, 0.0), 2.048e-4, 1e-18);
  EXPECT_NEAR(tx_cost(p, 20.0), 3.6864e-4, 1e-18);
  EXPECT_NEAR(tx_cost(p, 10.0), 2.4576e-4, 1e-18);
  EXPECT_THROW(tx_cost(p, -1.0), std::invalid_argument);
}

TEST(Energy, TxCostStrictlyIncreasing) {
  const RadioParams p;
  for (double d = 0.0; d < 100.0; d += 0.5) EXPECT_LT(tx_cost(p, d), tx_cost(p, d + 0.5));
}

TEST(Energy, RxCost) {
  RadioParams p;
  EXPECT_NEAR(rx_cost(p), 2.048e-4, 1e-18);
  const double one = rx_cost(p);
  p.packet_bits *= 2;
  EXPECT_DOUBLE_EQ(rx_cost(p), 2.0 * one);
  p.packet_bits = 0;
  EXPECT_EQ(rx_cost(p), 0.0);
}

TEST(Energy, PathConsumptionExamples) {
  const RadioParams p;
  EXPECT_EQ(path_consumption(p, std::vector<double>{}), 0.0);
  EXPECT_NEAR(path_consumption(p, std::vector<double>{10}), 2.4576e-4, 1e-18);
  EXPECT_NEAR(path_consumption(p, std::vector<double>{10, 10}), 6.9632e-4, 1e-18);
  // One 20 m hop is cheaper than two 10 m hops under these constants.
  EXPECT_LT(path_consumption(p, std::vector<double>{20}), path_consumption(p, std::vector<double>{10, 10}));
}

TEST(Energy, PathConsumptionIsFoldAndMonotone) {
  const RadioParams p;
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> hops;
    const auto k = 1 + rng.below(8);
    for (std::uint64_t i = 0; i < k; ++i) hops.push_back(rng.uniform(0, 50));
    double fold = 0.0;
    for (std::size_t i = 0; i < hops.size(); ++i) fold += tx_cost(p, hops[i]) + (i + 1 < hops.size() ? rx_cost(p) : 0.0);
    const double got = path_consumption(p, hops);
    EXPECT_NEAR(got, fold, 1e-12 * fold);
    auto longer = hops;
    longer.insert(longer.begin(), rng.uniform(0, 50));
    EXPECT_GE(path_consumption(p, longer), got);
  }
}
