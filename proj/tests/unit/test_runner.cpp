#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>

#include "hexcell/runner.hpp"

namespace hexcell {
namespace {

namespace fs = std::filesystem;

RunConfig TinyRun() {
  RunConfig c;
  auto& sc = c.env.scenario;
  sc.map_size_m = 2000.0;
  sc.grid_side = 2;
  sc.num_ues = 12;
  sc.num_slots = 12;
  sc.ou_params.volatility = 20.0;
  sc.ou_params.mu_x = sc.ou_params.mu_y = {200.0, 1800.0};
  sc.ou_params.sigma_x = sc.ou_params.sigma_y = {200.0, 2000.0};
  c.env.observation = {500.0, 1, 2};
  c.ppo.d_model = 8;
  c.ppo.d_key = 4;
  c.ppo.hidden = 8;
  c.ppo.minibatch = 8;
  c.training.checkpoint_every = 0;
  return c;
}

fs::path TempDir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hexcell_runner_" + name);
  fs::remove_all(p);
  return p;
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (int threads : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(37);
    ParallelFor(37, threads, [&](int i) { ++hits[i]; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  ParallelFor(0, 4, [](int) { FAIL(); });
}

TEST(ParallelFor, RethrowsFirstException) {
  EXPECT_THROW(ParallelFor(10, 4,
                           [](int i) {
                             if (i == 6) throw std::runtime_error("boom");
                           }),
               std::runtime_error);
}

TEST(Spearman, Examples) {
  EXPECT_DOUBLE_EQ(Spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0);
  EXPECT_DOUBLE_EQ(Spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
  // monotone but non-linear
  EXPECT_DOUBLE_EQ(Spearman({1, 2, 3, 4, 5}, {1, 8, 27, 64, 125}), 1.0);
  // ties get average ranks: x ranks (1.5, 1.5, 3), y ranks (1, 2, 3)
  EXPECT_NEAR(Spearman({1, 1, 2}, {1, 2, 3}), 0.8660254037844386, 1e-12);
  EXPECT_THROW(Spearman({1}, {1}), std::invalid_argument);
}

TEST(SummarizeTest, MeanStdAndInterval) {
  const Summary s = Summarize({2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0});
  EXPECT_EQ(s.n, 8);
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  EXPECT_NEAR(s.std, std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_NEAR(s.ci_hi - s.mean, 1.959963984540054 * s.std / std::sqrt(8.0), 1e-12);
  EXPECT_EQ(Summarize({}).n, 0);
  EXPECT_EQ(Summarize({3.0}).std, 0.0);
}

TEST(Seeds, EpisodeSeedsAreDistinct) {
  EXPECT_NE(TrainEpisodeSeed(1, 0), TrainEpisodeSeed(1, 1));
  EXPECT_NE(TrainEpisodeSeed(1, 0), EvalEpisodeSeed(1, 0));
  EXPECT_EQ(EvalEpisodeSeed(4, 9), EvalEpisodeSeed(4, 9));
}

TEST(Evaluate, DeterministicAndIndependentOfThreads) {
  const RunConfig c = TinyRun();
  for (Baseline b : {Baseline::kFixed, Baseline::kRandom}) {
    EvalOptions o;
    o.baseline = b;
    o.episodes = 4;
    o.seed = 11;
    const auto one = Evaluate(c, nullptr, o);
    o.parallel = 4;
    const auto four = Evaluate(c, nullptr, o);
    EXPECT_EQ(EpisodesToJson(one), EpisodesToJson(four)) << ToString(b);
    ASSERT_EQ(one.size(), 4u);
    EXPECT_EQ(one[2].seed, EvalEpisodeSeed(11, 2));
  }
}

TEST(Evaluate, LearnedNeedsAgents) {
  EvalOptions o;
  o.baseline = Baseline::kLearned;
  o.episodes = 1;
  EXPECT_ANY_THROW(Evaluate(TinyRun(), nullptr, o));
}

TEST(Baselines, NamesRoundTrip) {
  for (Baseline b : {Baseline::kLearned, Baseline::kFixed, Baseline::kRandom}) {
    EXPECT_EQ(BaselineFromString(ToString(b)), b);
  }
  for (SweepAxis a : {SweepAxis::kUeDistributionStd, SweepAxis::kAverageSpeed,
                      SweepAxis::kIntraFreqRatio}) {
    EXPECT_EQ(SweepAxisFromString(ToString(a)), a);
  }
  EXPECT_ANY_THROW(BaselineFromString("oracle"));
}

TEST(Train, ZeroEpisodesLeavesInitialState) {
  const RunConfig c = TinyRun();
  TrainState s = InitialTrainState(c, 2);
  const std::string before = SerializeCheckpoint(StateToCheckpoint(c, s));
  TrainEpisodes(c, 2, 0, s, 1);
  EXPECT_EQ(s.episodes_done, 0);
  EXPECT_EQ(SerializeCheckpoint(StateToCheckpoint(c, s)), before);
}

TEST(Train, ParallelRolloutsMatchSerial) {
  const RunConfig c = TinyRun();
  TrainState a = InitialTrainState(c, 2), b = InitialTrainState(c, 2);
  TrainEpisodes(c, 2, 2, a, 1);
  TrainEpisodes(c, 2, 2, b, 3);
  EXPECT_EQ(SerializeCheckpoint(StateToCheckpoint(c, a)),
            SerializeCheckpoint(StateToCheckpoint(c, b)));
}

TEST(Train, ResumeEqualsUninterruptedRun) {
  const RunConfig c = TinyRun();
  const fs::path full = TempDir("full"), first = TempDir("first"), rest = TempDir("rest");
  TrainRunOptions o;
  o.seed = 5;
  o.episodes = 3;
  o.out = full;
  TrainRun(c, o);

  o.episodes = 2;
  o.out = first;
  TrainRun(c, o);
  o.episodes = 1;
  o.out = rest;
  o.resume = first / "checkpoint.bin";
  std::vector<int64_t> numbers;
  o.on_episode = [&](const TrainingRow& r) { numbers.push_back(r.episode); };
  const TrainState s = TrainRun(c, o);
  EXPECT_EQ(s.episodes_done, 3);
  EXPECT_EQ(numbers, std::vector<int64_t>{2});
  EXPECT_EQ(ReadTextFile(full / "checkpoint.bin"), ReadTextFile(rest / "checkpoint.bin"));
}

TEST(Train, ResumeRejectsOtherConfig) {
  RunConfig c = TinyRun();
  const fs::path a = TempDir("a"), b = TempDir("b");
  TrainRunOptions o;
  o.episodes = 0;
  o.out = a;
  TrainRun(c, o);
  c.ppo.clip = 0.2;
  o.out = b;
  o.resume = a / "checkpoint.bin";
  EXPECT_THROW(TrainRun(c, o), CheckpointError);
}

TEST(SweepTest, UnreachableBucketIsReportedUnsampled) {
  SweepOptions o;
  o.axis = SweepAxis::kUeDistributionStd;
  o.buckets = {{0.0, 1e9}, {-2.0, -1.0}};
  o.episodes_per_bucket = 2;
  o.max_attempts = 3;
  o.eval.seed = 3;
  const auto buckets = Sweep(TinyRun(), nullptr, o);
  ASSERT_EQ(buckets.size(), 2u);
  EXPECT_TRUE(buckets[0].sampled);
  EXPECT_EQ(buckets[0].accepted, 2);
  EXPECT_FALSE(buckets[1].sampled);
  EXPECT_TRUE(buckets[1].records.empty());
}

TEST(SweepTest, SpeedBucketsHitTheirWindow) {
  SweepOptions o;
  o.axis = SweepAxis::kAverageSpeed;
  o.buckets = {{24.0, 26.0}};
  o.episodes_per_bucket = 3;
  o.eval.seed = 4;
  RunConfig c = TinyRun();
  // diffusion alone would move UEs faster than the bucket
  c.env.scenario.ou_params.volatility = 0.1;
  const auto buckets = Sweep(c, nullptr, o);
  ASSERT_TRUE(buckets[0].sampled);
  for (const auto& r : buckets[0].records) {
    EXPECT_GE(r.report.average_ue_speed, 24.0);
    EXPECT_LE(r.report.average_ue_speed, 26.0);
  }
}

TEST(SweepTest, DistributionWindowFiltersEpisodes) {
  SweepOptions o;
  o.axis = SweepAxis::kAverageSpeed;
  o.buckets = {{0.0, 1e9}};
  o.distribution_window = {{0.5, 1.5}};
  o.episodes_per_bucket = 3;
  o.eval.seed = 6;
  const auto buckets = Sweep(TinyRun(), nullptr, o);
  ASSERT_TRUE(buckets[0].sampled);
  for (const auto& r : buckets[0].records) {
    EXPECT_GE(r.report.ue_distribution_std, 0.5);
    EXPECT_LE(r.report.ue_distribution_std, 1.5);
  }
}

TEST(SyntheticLoadsTest, BoundedAndSeeded) {
  const auto a = SyntheticLoads(50, 7, 2.5, 9);
  ASSERT_EQ(a.size(), 50u);
  for (const auto& row : a) {
    ASSERT_EQ(row.size(), 7u);
    for (double v : row) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 2.5);
    }
  }
  EXPECT_EQ(SyntheticLoads(50, 7, 2.5, 9), a);
  EXPECT_NE(SyntheticLoads(50, 7, 2.5, 10), a);
}

}  // namespace
}  // namespace hexcell
