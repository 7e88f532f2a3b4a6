#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "hexcell/metrics.hpp"

namespace hexcell {
namespace {

HandoverEvent Ev(int ue, int src, int dst, int exec, HandoverType type = HandoverType::kCah,
                 std::optional<int> monitor = std::nullopt) {
  HandoverEvent e;
  e.ue = ue;
  e.source = src;
  e.target = dst;
  e.type = type;
  e.execute_slot = exec;
  e.report_slot = exec - 1;
  e.monitor_start_slot = monitor;
  return e;
}

TEST(PingPong, ReturnWithinWindow) {
  const std::vector<HandoverEvent> ev{Ev(0, 0, 1, 10), Ev(0, 1, 0, 13)};
  EXPECT_DOUBLE_EQ(PingPongRatio(ev, 5), 0.5);
}

TEST(PingPong, NoHandovers) { EXPECT_DOUBLE_EQ(PingPongRatio({}, 5), 0.0); }

TEST(PingPong, ReturnOutsideWindow) {
  const std::vector<HandoverEvent> ev{Ev(0, 0, 1, 10), Ev(0, 1, 0, 16)};
  EXPECT_DOUBLE_EQ(PingPongRatio(ev, 5), 0.0);
  const std::vector<HandoverEvent> edge{Ev(0, 0, 1, 10), Ev(0, 1, 0, 15)};
  EXPECT_DOUBLE_EQ(PingPongRatio(edge, 5), 0.0);
  const std::vector<HandoverEvent> inside{Ev(0, 0, 1, 10), Ev(0, 1, 0, 14)};
  EXPECT_DOUBLE_EQ(PingPongRatio(inside, 5), 0.5);
}

TEST(PingPong, OtherUesDoNotCount) {
  const std::vector<HandoverEvent> ev{Ev(0, 0, 1, 10), Ev(1, 1, 0, 12)};
  EXPECT_DOUBLE_EQ(PingPongRatio(ev, 5), 0.0);
}

TEST(PingPongProperty, InvariantToUeRelabeling) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<HandoverEvent> ev;
    for (int k = 0; k < 8; ++k) {
      int cell = static_cast<int>(rng.UniformInt(4));
      int t = 1;
      for (int h = 0; h < 6; ++h) {
        t += 2 + static_cast<int>(rng.UniformInt(6));
        int next = static_cast<int>(rng.UniformInt(4));
        if (next == cell) next = (next + 1) % 4;
        ev.push_back(Ev(k, cell, next, t));
        cell = next;
      }
    }
    const double base = PingPongRatio(ev, 5);
    EXPECT_GE(base, 0.0);
    EXPECT_LE(base, 1.0);
    std::vector<int> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    rng.Shuffle(perm.begin(), perm.end());
    for (auto& e : ev) e.ue = perm[e.ue];
    rng.Shuffle(ev.begin(), ev.end());
    EXPECT_DOUBLE_EQ(PingPongRatio(ev, 5), base);
  }
}

TEST(Latency, InterFrequencyOnly) {
  const std::vector<HandoverEvent> ev{Ev(0, 0, 1, 12, HandoverType::kCeh, 3),
                                      Ev(1, 0, 2, 20)};
  const auto l = HandoverLatency(ev, 0.2);
  ASSERT_TRUE(l);
  EXPECT_NEAR(*l, 1.8, 1e-12);
}

TEST(Latency, AbsentWithoutInterFrequencyEvents) {
  const std::vector<HandoverEvent> ev{Ev(0, 0, 1, 12)};
  EXPECT_FALSE(HandoverLatency(ev, 0.2).has_value());
}

TEST(Throughput, CappedAtRequest) {
  // rate far above D / d_t: 1 MB per slot, 100 slots of 0.2 s
  const std::vector<std::vector<double>> rates(100, std::vector<double>{1e9});
  const std::vector<double> d{1e6};
  EXPECT_NEAR(SystemThroughput(rates, d, 0.2), 5e6, 1e-6);
}

TEST(Throughput, ZeroRates) {
  const std::vector<std::vector<double>> rates(10, std::vector<double>{0.0, 0.0});
  EXPECT_DOUBLE_EQ(SystemThroughput(rates, std::vector<double>{1e6, 1e6}, 0.2), 0.0);
}

TEST(LowRate, Examples) {
  const std::vector<std::vector<double>> high(5, std::vector<double>{1e9, 1e9});
  const std::vector<std::vector<double>> low(5, std::vector<double>{1e3, 1e3});
  const std::vector<std::vector<double>> half(5, std::vector<double>{1e3, 1e9});
  EXPECT_DOUBLE_EQ(LowRateUserRatio(high, 1e6), 0.0);
  EXPECT_DOUBLE_EQ(LowRateUserRatio(low, 1e6), 1.0);
  EXPECT_DOUBLE_EQ(LowRateUserRatio(half, 1e6), 0.5);
}

CellLayout LineLayout(std::vector<double> freqs) {
  CellLayout layout;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    layout.cells.push_back({{1000.0 * i, 0.0}, freqs[i], BandwidthForFrequency(freqs[i])});
  }
  layout.map_size_m = 1000.0 * freqs.size();
  return layout;
}

TEST(IntraFreq, Examples) {
  const auto same = LineLayout({2.6, 2.6, 2.6});
  const auto g = BuildGraph(same, 1000.0);
  EXPECT_DOUBLE_EQ(IntraFreqNeighborRatio(same, g), 1.0);
  const auto distinct = LineLayout({0.7, 2.6, 4.9});
  EXPECT_DOUBLE_EQ(IntraFreqNeighborRatio(distinct, BuildGraph(distinct, 1000.0)), 0.0);
  const auto mixed = LineLayout({0.7, 0.7, 2.6});
  const auto gm = BuildGraph(mixed, 1000.0);
  EXPECT_EQ(gm.neighbors[1].size(), 2u);
  EXPECT_DOUBLE_EQ(IntraFreqNeighborRatio(mixed, gm), 0.5);
}

TEST(Report, ComputedFromLog) {
  EpisodeLog log;
  log.slot_length = 0.2;
  log.num_cells = 3;
  log.num_ues = 2;
  log.request_bytes = {1e6, 1e6};
  for (int t = 1; t <= 4; ++t) {
    SlotRecord s;
    s.slot = t;
    s.load = {0.0, 3.0, 6.0};
    s.gamma = LoadStd(s.load);
    s.reward = {-1.0, 0.0, -1.0};
    s.rate_bps = {1e9, 1e3};
    s.serving = {0, 1};
    log.slots.push_back(s);
  }
  log.events = {Ev(0, 0, 1, 2), Ev(0, 1, 0, 3, HandoverType::kCah)};
  const auto layout = LineLayout({0.7, 0.7, 2.6});
  const auto g = BuildGraph(layout, 1000.0);
  const auto r = ComputeReport(log, layout, g, MetricsConfig{});
  EXPECT_NEAR(r.episode_objective, 4 * std::sqrt(6.0), 1e-12);
  EXPECT_EQ(r.total_handover_count, 2);
  EXPECT_DOUBLE_EQ(r.ping_pong_ratio, 0.5);
  EXPECT_FALSE(r.mean_handover_latency_s);
  EXPECT_DOUBLE_EQ(r.low_rate_user_ratio, 0.5);
  EXPECT_NEAR(r.mean_reward, -2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(r.intra_freq_neighbor_ratio, 0.5);
}

TEST(Metrics, ValidateRejectsBadConfig) {
  MetricsConfig c;
  c.ping_pong_slots = 0;
  EXPECT_THROW(ValidateMetrics(c), ConfigError);
}

}  // namespace
}  // namespace hexcell
