#include <gtest/gtest.h>

#include <cmath>

#include "hexcell/env.hpp"

namespace hexcell {
namespace {

EnvConfig SmallEnv() {
  EnvConfig c;
  auto& sc = c.scenario;
  sc.map_size_m = 3000.0;
  sc.grid_side = 3;
  sc.num_ues = 30;
  sc.num_slots = 40;
  sc.ou_params.volatility = 10.0;
  sc.ou_params.mu_x = sc.ou_params.mu_y = {300.0, 2700.0};
  sc.ou_params.sigma_x = sc.ou_params.sigma_y = {300.0, 3000.0};
  c.radio.los_model.kind = LosModelKind::kTr38901Uma;
  c.observation.grid_length_m = 500.0;
  c.observation.kappa = 2;
  c.observation.eta = 3;
  return c;
}

std::vector<ActionVector> RandomActions(int m, Rng& rng) {
  std::vector<ActionVector> out(m);
  for (auto& a : out) {
    for (auto& i : a) i = static_cast<int>(rng.UniformInt(kActionsPerHead));
    a[0] = static_cast<int>(rng.UniformInt(20));
  }
  return out;
}

TEST(Actions, DecodeAndEncode) {
  const ActionVector a{0, 0, 96, 10, 20};
  const HandoverParams p = DecodeAction(a);
  EXPECT_EQ(p.u_ca, 0);
  EXPECT_EQ(p.z_ce, -44);
  EXPECT_EQ(p.z_pe, -140);
  EXPECT_EQ(p.w_ce, -54);
  EXPECT_EQ(p.w_pe, -64);
  EXPECT_EQ(EncodeParams(p), a);
  EXPECT_EQ(DecodeAction(MidRangeAction()), HandoverParams{});
  EXPECT_THROW(DecodeAction(ActionVector{97, 0, 0, 0, 0}), std::out_of_range);
}

TEST(Load, HandExample) {
  // completion times 8 D / R of 0.5 s and 1.0 s
  const std::vector<double> d{1.0, 1.0};
  const std::vector<double> r{16.0, 8.0};
  EXPECT_NEAR(CellLoad(d, r, 0.2), 0.15, 1e-15);
}

TEST(Load, EmptyCellIsZero) {
  EXPECT_DOUBLE_EQ(CellLoad(std::vector<double>{}, std::vector<double>{}, 0.2), 0.0);
}

TEST(Load, NonPositiveRateIsInternalError) {
  EXPECT_THROW(CellLoad(std::vector<double>{1.0}, std::vector<double>{0.0}, 0.2),
               InternalError);
}

TEST(Load, StdExamples) {
  EXPECT_DOUBLE_EQ(LoadStd(std::vector<double>{2, 2, 2}), 0.0);
  EXPECT_NEAR(LoadStd(std::vector<double>{0, 3, 6}), std::sqrt(6.0), 1e-12);
  EXPECT_DOUBLE_EQ(LoadStd(std::vector<double>{4.2}), 0.0);
}

TEST(Load, ObjectiveExamples) {
  EXPECT_DOUBLE_EQ(EpisodeObjective(std::vector<double>(100, 0.0)), 0.0);
  EXPECT_DOUBLE_EQ(EpisodeObjective(std::vector<double>(100, 1.0)), 100.0);
}

TEST(Observation, EmptyWindowIsZero) {
  ScenarioConfig sc;
  sc.map_size_m = 3000.0;
  sc.grid_side = 3;
  const auto layout = BuildLayout(sc);
  ObservationConfig oc{500.0, 2, 3};
  const auto obs = BuildObservation(0, layout, oc, {});
  for (int32_t v : obs.raw()) EXPECT_EQ(v, 0);
  EXPECT_EQ(obs.channels(), 6);
  EXPECT_EQ(obs.tokens(), 25);
}

TEST(Observation, OwnGridUeLandsInCenter) {
  ScenarioConfig sc;
  sc.map_size_m = 3000.0;
  sc.grid_side = 3;
  const auto layout = BuildLayout(sc);
  ObservationConfig oc{500.0, 2, 1};
  GridSnapshot s;
  s.grid_x = {1};
  s.grid_y = {1};
  s.serving = {0};
  const std::vector<GridSnapshot> window{s};
  const auto obs = BuildObservation(0, layout, oc, window);
  EXPECT_EQ(obs.ued(0, 2, 2), 1);
  EXPECT_EQ(obs.csm(0, 2, 2), 1);
  int total = 0;
  for (int32_t v : obs.raw()) total += v;
  EXPECT_EQ(total, 2);
  const auto other = BuildObservation(4, layout, oc, window);
  EXPECT_EQ(other.csm(0, 0, 0), 0);
}

TEST(Environment, SameSeedSameInitialObservations) {
  Environment a(SmallEnv()), b(SmallEnv());
  EXPECT_EQ(a.Reset(17), b.Reset(17));
  EXPECT_EQ(a.serving(), b.serving());
}

TEST(Environment, EpisodeRunsToCompletion) {
  Environment env(SmallEnv());
  env.Reset(3);
  const std::vector<ActionVector> mid(env.num_cells(), MidRangeAction());
  int steps = 0;
  StepResult r;
  do {
    r = env.Step(mid);
    ++steps;
  } while (!r.done);
  EXPECT_EQ(steps, 40);
  EXPECT_TRUE(env.done());
  EXPECT_EQ(env.log().slots.size(), 40u);
  EXPECT_THROW(env.Step(mid), std::logic_error);
}

TEST(Environment, BadActionAbortsEpisode) {
  Environment env(SmallEnv());
  env.Reset(3);
  std::vector<ActionVector> actions(env.num_cells(), MidRangeAction());
  actions[4][2] = 120;
  try {
    env.Step(actions);
    FAIL() << "expected ActionError";
  } catch (const ActionError& e) {
    EXPECT_EQ(e.agent(), 4);
  }
  actions[4][2] = 0;
  EXPECT_THROW(env.Step(actions), std::logic_error);
}

TEST(Environment, ParametersHeldBetweenDecisions) {
  EnvConfig c = SmallEnv();
  c.action_period = 4;
  Environment env(c);
  env.Reset(5);
  Rng rng(1);
  for (int t = 1; t <= 12; ++t) env.Step(RandomActions(env.num_cells(), rng));
  const auto& slots = env.log().slots;
  for (int t = 1; t <= 12; ++t) {
    const int decision = ((t - 1) / 4) * 4 + 1;
    EXPECT_EQ(slots[t - 1].params, slots[decision - 1].params);
  }
  EXPECT_NE(slots[0].params, slots[4].params);
}

TEST(Environment, ExactAverageRewardMatchesDefinition) {
  EnvConfig c = SmallEnv();
  c.exact_average_reward = true;
  Environment env(c);
  env.Reset(9);
  Rng rng(2);
  while (!env.done()) {
    const auto r = env.Step(RandomActions(env.num_cells(), rng));
    const auto& rec = env.log().slots.back();
    const double avg = ExactAverage(rec.load);
    for (int m = 0; m < env.num_cells(); ++m) {
      EXPECT_EQ(r.rewards[m], -std::abs(rec.load[m] - avg));
      EXPECT_EQ(rec.reward[m], rec.exact_reward[m]);
    }
  }
}

TEST(Environment, PerfectEstimatesGiveZeroReward) {
  // 2x2 cells on one carrier with one UE on each centre and fading off: the
  // geometry is symmetric, so every load is equal.
  EnvConfig c = SmallEnv();
  c.scenario.map_size_m = 2000.0;
  c.scenario.grid_side = 2;
  c.scenario.num_ues = 4;
  c.scenario.num_slots = 5;
  c.scenario.frequency_plan.assign(4, 2.6);
  c.radio.fading = FadingMode::kOff;
  Environment env(c);
  const auto layout = BuildLayout(c.scenario);
  std::vector<UeTrajectory> ues(4);
  for (int k = 0; k < 4; ++k) {
    ues[k].positions.assign(6, layout.cells[k].center);
    ues[k].mean = layout.cells[k].center;
  }
  env.Reset(1, ues);
  const std::vector<ActionVector> mid(4, MidRangeAction());
  while (!env.done()) {
    const auto r = env.Step(mid);
    for (double v : r.rewards) EXPECT_NEAR(v, 0.0, 1e-12);
    EXPECT_NEAR(env.log().slots.back().gamma, 0.0, 1e-12);
  }
  EXPECT_TRUE(env.log().events.empty());
}

TEST(EnvironmentProperty, StepInvariants) {
  for (uint64_t seed = 0; seed < 8; ++seed) {
    Environment env(SmallEnv());
    env.Reset(seed);
    Rng rng(seed + 100);
    const int M = env.num_cells();
    const auto& oc = env.config().observation;
    while (!env.done()) {
      const auto r = env.Step(RandomActions(M, rng));
      const auto& rec = env.log().slots.back();
      // exactly one association per UE
      const auto alpha = AssociationMatrix(rec.serving, M);
      for (int k = 0; k < env.num_ues(); ++k) {
        int sum = 0;
        for (int m = 0; m < M; ++m) sum += alpha[m][k];
        ASSERT_EQ(sum, 1);
      }
      // CSM <= UED
      for (const auto& obs : r.observations) {
        for (int w = 0; w < oc.eta; ++w) {
          for (int row = 0; row < oc.side(); ++row) {
            for (int col = 0; col < oc.side(); ++col) {
              ASSERT_LE(obs.csm(w, row, col), obs.ued(w, row, col));
            }
          }
        }
      }
      // Gamma is zero iff all loads are equal
      bool all_equal = true;
      for (double l : rec.load) all_equal = all_equal && l == rec.load[0];
      ASSERT_EQ(rec.gamma == 0.0, all_equal);
      ASSERT_DOUBLE_EQ(rec.gamma, LoadStd(rec.load));
    }
  }
}

TEST(EnvironmentProperty, ObservationsMatchRecount) {
  const EnvConfig c = SmallEnv();
  Environment env(c);
  env.Reset(21);
  Rng rng(4);
  const auto& oc = c.observation;
  const int per_side = static_cast<int>(c.scenario.map_size_m / oc.grid_length_m);
  while (!env.done()) {
    const int t = env.slot();
    const auto r = env.Step(RandomActions(env.num_cells(), rng));
    for (int m = 0; m < env.num_cells(); ++m) {
      const Vec2 center = env.layout().cells[m].center;
      const int cx = static_cast<int>(center.x / oc.grid_length_m);
      const int cy = static_cast<int>(center.y / oc.grid_length_m);
      Observation expect(oc.eta, oc.side());
      for (int w = 0; w < oc.eta; ++w) {
        const int slot = t - (oc.eta - 1 - w);
        if (slot < 1) continue;
        const auto& serving = env.log().slots[slot - 1].serving;
        for (int k = 0; k < env.num_ues(); ++k) {
          const Vec2 p = env.trajectories()[k].positions[slot - 1];
          const int gx = std::min(per_side - 1, static_cast<int>(p.x / oc.grid_length_m));
          const int gy = std::min(per_side - 1, static_cast<int>(p.y / oc.grid_length_m));
          const int col = gx - cx + oc.kappa;
          const int row = gy - cy + oc.kappa;
          if (col < 0 || row < 0 || col >= oc.side() || row >= oc.side()) continue;
          ++expect.ued(w, row, col);
          if (serving[k] == m) ++expect.csm(w, row, col);
        }
      }
      ASSERT_EQ(r.observations[m], expect) << "slot " << t << " cell " << m;
    }
  }
}

TEST(EnvironmentProperty, SameSeedSameActionsSameEpisode) {
  Environment a(SmallEnv()), b(SmallEnv());
  a.Reset(33);
  b.Reset(33);
  Rng ra(8), rb(8);
  while (!a.done()) {
    const auto sa = a.Step(RandomActions(a.num_cells(), ra));
    const auto sb = b.Step(RandomActions(b.num_cells(), rb));
    ASSERT_EQ(sa.rewards, sb.rewards);
    ASSERT_EQ(sa.observations, sb.observations);
  }
  EXPECT_EQ(a.log().events, b.log().events);
  ASSERT_EQ(a.log().slots.size(), b.log().slots.size());
  for (std::size_t i = 0; i < a.log().slots.size(); ++i) {
    EXPECT_EQ(a.log().slots[i].load, b.log().slots[i].load);
    EXPECT_EQ(a.log().slots[i].serving, b.log().slots[i].serving);
  }
}

TEST(Environment, InvalidConfigRejectedUpFront) {
  EnvConfig c = SmallEnv();
  c.timing.h2 = 0;
  EXPECT_THROW(Environment{c}, ConfigError);
  c = SmallEnv();
  c.observation.eta = 0;
  EXPECT_THROW(Environment{c}, ConfigError);
  c = SmallEnv();
  c.chi_m = 10.0;  // no edges
  EXPECT_THROW(Environment{c}, GraphError);
}

TEST(Environment, FrequencyPlanRerandomizedPerEpisode) {
  EnvConfig c = SmallEnv();
  c.rerandomize_frequencies = true;
  Environment env(c);
  env.Reset(1);
  std::vector<double> first;
  for (const auto& cell : env.layout().cells) first.push_back(cell.freq_ghz);
  bool changed = false;
  for (uint64_t s = 2; s < 10 && !changed; ++s) {
    env.Reset(s);
    for (int m = 0; m < env.num_cells(); ++m) {
      changed = changed || env.layout().cells[m].freq_ghz != first[m];
    }
  }
  EXPECT_TRUE(changed);
}

}  // namespace
}  // namespace hexcell
