#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hexcell/consensus.hpp"
#include "hexcell/env.hpp"
#include "hexcell/handover.hpp"

namespace hexcell {

struct MetricsConfig {
  int ping_pong_slots = 5;              // T_pp
  double low_rate_bytes_per_s = 1e6;    // R_low
};

void ValidateMetrics(const MetricsConfig& config);

struct EpisodeReport {
  double ping_pong_ratio = 0.0;
  std::optional<double> mean_handover_latency_s;
  double system_throughput = 0.0;  // bytes/s
  double low_rate_user_ratio = 0.0;
  int total_handover_count = 0;
  double episode_objective = 0.0;
  double intra_freq_neighbor_ratio = 0.0;
  double mean_reward = 0.0;
  double ue_distribution_std = 0.0;
  double average_ue_speed = 0.0;
};

// A handover is ping-pong when it returns the UE to a cell the UE left in
// [t_depart, t_depart + T_pp).
double PingPongRatio(std::span<const HandoverEvent> events, int window_slots);

// Mean of (execute - monitor start) slot_length over inter-frequency events;
// empty when there are none.
std::optional<double> HandoverLatency(std::span<const HandoverEvent> events,
                                      double slot_length);

// rates[t][k] in bit/s; request_bytes[k]. Delivery per slot is capped at the
// request.
double SystemThroughput(const std::vector<std::vector<double>>& rates,
                        std::span<const double> request_bytes, double slot_length);

// Mean over slots of the fraction of UEs below the threshold (bytes/s).
double LowRateUserRatio(const std::vector<std::vector<double>>& rates,
                        double threshold_bytes_per_s);

double IntraFreqNeighborRatio(const CellLayout& layout, const NeighborGraph& graph);

EpisodeReport ComputeReport(const EpisodeLog& log, const CellLayout& layout,
                            const NeighborGraph& graph, const MetricsConfig& config);

}  // namespace hexcell
