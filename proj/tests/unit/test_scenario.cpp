#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "hexcell/scenario.hpp"

namespace hexcell {
namespace {

ScenarioConfig SmallScenario() {
  ScenarioConfig c;
  c.map_size_m = 3000.0;
  c.grid_side = 3;
  c.num_ues = 40;
  c.num_slots = 50;
  c.ou_params.mu_x = {300.0, 2700.0};
  c.ou_params.mu_y = {300.0, 2700.0};
  c.ou_params.sigma_x = {300.0, 3000.0};
  c.ou_params.sigma_y = {300.0, 3000.0};
  return c;
}

UeTrajectory Static(Vec2 p, int num_slots) {
  UeTrajectory t;
  t.positions.assign(num_slots + 1, p);
  t.mean = p;
  return t;
}

TEST(Layout, FiveByFiveCentersAndSpacing) {
  ScenarioConfig c;
  const CellLayout layout = BuildLayout(c);
  ASSERT_EQ(layout.size(), 25);
  EXPECT_EQ(layout.cells[0].center, (Vec2{500.0, 500.0}));
  EXPECT_DOUBLE_EQ(Distance(layout.cells[0].center, layout.cells[1].center), 1000.0);
  EXPECT_DOUBLE_EQ(Distance(layout.cells[0].center, layout.cells[5].center), 1000.0);
}

TEST(Layout, SingleCell) {
  ScenarioConfig c;
  c.map_size_m = 1000.0;
  c.grid_side = 1;
  const CellLayout layout = BuildLayout(c);
  ASSERT_EQ(layout.size(), 1);
  EXPECT_EQ(layout.cells[0].center, (Vec2{500.0, 500.0}));
}

TEST(Layout, LowBandCenterCellGetsTenMegahertz) {
  ScenarioConfig c;
  c.map_size_m = 3000.0;
  c.grid_side = 3;
  std::vector<double> plan(9, 2.6);
  plan[4] = 0.7;
  const CellLayout layout = BuildLayout(c, plan);
  EXPECT_DOUBLE_EQ(layout.cells[4].bandwidth_hz, 10e6);
  EXPECT_DOUBLE_EQ(layout.cells[0].bandwidth_hz, 40e6);
}

TEST(Layout, InvalidFrequencyIsConfigError) {
  EXPECT_THROW(BandwidthForFrequency(1.0), ConfigError);
  ScenarioConfig c;
  c.grid_side = 1;
  c.map_size_m = 1000.0;
  c.frequency_plan = {3.5};
  EXPECT_THROW(ValidateScenario(c), ConfigError);
}

TEST(Layout, DefaultPlanUsesAllBands) {
  const auto plan = DefaultFrequencyPlan(3);
  for (double f : kBandFrequenciesGhz) {
    EXPECT_NE(std::find(plan.begin(), plan.end(), f), plan.end());
  }
}

TEST(Mobility, ZeroNoiseStepMovesTowardMean) {
  const Vec2 next = OuStep({0.0, 0.0}, {100.0, 100.0}, 0.01, 0.1, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(next.x, 1.0);
  EXPECT_DOUBLE_EQ(next.y, 1.0);
}

TEST(Mobility, NoReversionNoNoiseIsConstant) {
  Vec2 p{123.0, 456.0};
  for (int i = 0; i < 10; ++i) p = OuStep(p, {0.0, 0.0}, 0.0, 0.0, {1.0, -1.0});
  EXPECT_EQ(p, (Vec2{123.0, 456.0}));
}

TEST(Mobility, SameSeedIdenticalTrajectories) {
  const auto c = SmallScenario();
  const auto a = GenerateTrajectories(c, 42);
  const auto b = GenerateTrajectories(c, 42);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].positions, b[k].positions);
    EXPECT_EQ(a[k].mean, b[k].mean);
  }
  const auto other = GenerateTrajectories(c, 43);
  EXPECT_NE(a[0].positions, other[0].positions);
}

TEST(Mobility, TrajectoryLengthIsSlotsPlusOne) {
  const auto c = SmallScenario();
  for (const auto& t : GenerateTrajectories(c, 1)) {
    EXPECT_EQ(static_cast<int>(t.positions.size()), c.num_slots + 1);
  }
}

TEST(MobilityProperty, PositionsStayOnMap) {
  auto c = SmallScenario();
  c.ou_params.volatility = 400.0;
  for (uint64_t seed = 0; seed < 30; ++seed) {
    for (const auto& t : GenerateTrajectories(c, seed)) {
      for (const Vec2 p : t.positions) {
        ASSERT_GE(p.x, 0.0);
        ASSERT_LE(p.x, c.map_size_m);
        ASSERT_GE(p.y, 0.0);
        ASSERT_LE(p.y, c.map_size_m);
      }
    }
  }
}

TEST(MobilityProperty, ZeroNoiseDistanceToMeanNonIncreasing) {
  auto c = SmallScenario();
  for (double iota : {0.01, 0.3, 1.0}) {
    MobilityDraw d;
    d.iota = iota;
    d.volatility = 0.0;
    d.mu_x = d.mu_y = 1500.0;
    d.sigma_x = d.sigma_y = 800.0;
    for (const auto& t : GenerateTrajectories(c, d, 5)) {
      double prev = Distance(t.positions[0], t.mean);
      for (const Vec2 p : t.positions) {
        const double dist = Distance(p, t.mean);
        ASSERT_LE(dist, prev + 1e-9);
        prev = dist;
      }
    }
  }
}

TEST(DistributionStd, AllInOneGrid) {
  std::vector<UeTrajectory> ues(4, Static({10.0, 10.0}, 3));
  EXPECT_NEAR(UeDistributionStd(ues, 500.0, 1000.0, 3), std::sqrt(3.0), 1e-12);
}

TEST(DistributionStd, UniformIsZero) {
  std::vector<UeTrajectory> ues = {Static({10, 10}, 1), Static({600, 10}, 1),
                                   Static({10, 600}, 1), Static({600, 600}, 1)};
  EXPECT_DOUBLE_EQ(UeDistributionStd(ues, 500.0, 1000.0, 1), 0.0);
}

TEST(DistributionStd, TwoTwoZeroZero) {
  std::vector<UeTrajectory> ues = {Static({10, 10}, 1), Static({20, 10}, 1),
                                   Static({600, 10}, 1), Static({700, 10}, 1)};
  EXPECT_DOUBLE_EQ(UeDistributionStd(ues, 500.0, 1000.0, 1), 1.0);
}

TEST(DistributionStd, RejectsNonDividingGrid) {
  std::vector<UeTrajectory> ues(1, Static({10, 10}, 1));
  EXPECT_THROW(UeDistributionStd(ues, 300.0, 1000.0, 1), std::invalid_argument);
}

TEST(DistributionStdProperty, PermutationInvariant) {
  const auto c = SmallScenario();
  for (uint64_t seed = 0; seed < 10; ++seed) {
    auto ues = GenerateTrajectories(c, seed);
    const double base = UeDistributionStd(ues, 500.0, c.map_size_m, c.num_slots);
    Rng rng(seed);
    rng.Shuffle(ues.begin(), ues.end());
    EXPECT_EQ(UeDistributionStd(ues, 500.0, c.map_size_m, c.num_slots), base);
  }
}

TEST(Speed, StationaryIsZero) {
  std::vector<UeTrajectory> ues(3, Static({5, 5}, 10));
  EXPECT_DOUBLE_EQ(AverageUeSpeed(ues, 0.2), 0.0);
}

TEST(Speed, StraightLine) {
  UeTrajectory t;
  for (int i = 0; i <= 10; ++i) t.positions.push_back({5.0 * i, 0.0});
  std::vector<UeTrajectory> ues{t};
  EXPECT_NEAR(AverageUeSpeed(ues, 0.2), 25.0, 1e-12);
}

TEST(Speed, MeanOverUes) {
  UeTrajectory a, b;
  for (int i = 0; i <= 4; ++i) {
    a.positions.push_back({2.0 * i, 0.0});
    b.positions.push_back({0.0, 6.0 * i});
  }
  std::vector<UeTrajectory> ues{a, b};
  EXPECT_NEAR(AverageUeSpeed(ues, 0.2), 20.0, 1e-12);
}

TEST(Scenario, ValidateRejectsBadValues) {
  ScenarioConfig c;
  c.num_ues = 0;
  EXPECT_THROW(ValidateScenario(c), ConfigError);
  c = ScenarioConfig{};
  c.slot_length = 0.0;
  EXPECT_THROW(ValidateScenario(c), ConfigError);
  c = ScenarioConfig{};
  EXPECT_NO_THROW(ValidateScenario(c));
}

}  // namespace
}  // namespace hexcell
