#include "hexcell/metrics.hpp"

#include <algorithm>
#include <map>

namespace hexcell {

void ValidateMetrics(const MetricsConfig& c) {
  if (c.ping_pong_slots < 1) throw ConfigError("metrics: T_pp must be >= 1");
  if (!(c.low_rate_bytes_per_s > 0.0)) throw ConfigError("metrics: R_low must be > 0");
}

double PingPongRatio(std::span<const HandoverEvent> events, int window) {
  if (events.empty()) return 0.0;
  std::map<int, std::vector<const HandoverEvent*>> per_ue;
  for (const auto& e : events) per_ue[e.ue].push_back(&e);
  int ping_pong = 0;
  for (auto& [ue, list] : per_ue) {
    std::stable_sort(list.begin(), list.end(), [](auto* a, auto* b) {
      return a->execute_slot < b->execute_slot;
    });
    for (std::size_t i = 1; i < list.size(); ++i) {
      const HandoverEvent& e = *list[i];
      // Most recent departure from the cell this event re-enters.
      for (std::size_t j = i; j-- > 0;) {
        if (list[j]->source == e.target) {
          const int dep = list[j]->execute_slot;
          if (e.execute_slot >= dep && e.execute_slot < dep + window) ++ping_pong;
          break;
        }
      }
    }
  }
  return static_cast<double>(ping_pong) / static_cast<double>(events.size());
}

std::optional<double> HandoverLatency(std::span<const HandoverEvent> events,
                                      double slot_length) {
  double sum = 0.0;
  int n = 0;
  for (const auto& e : events) {
    if (e.type == HandoverType::kCah || !e.monitor_start_slot) continue;
    sum += (e.execute_slot - *e.monitor_start_slot) * slot_length;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

double SystemThroughput(const std::vector<std::vector<double>>& rates,
                        std::span<const double> request_bytes, double slot_length) {
  if (rates.empty()) return 0.0;
  double bytes = 0.0;
  for (const auto& row : rates) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      bytes += std::min(request_bytes[k], row[k] * slot_length / 8.0);
    }
  }
  return bytes / (static_cast<double>(rates.size()) * slot_length);
}

double LowRateUserRatio(const std::vector<std::vector<double>>& rates,
                        double threshold) {
  if (rates.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& row : rates) {
    if (row.empty()) continue;
    int low = 0;
    for (double r : row) {
      if (r / 8.0 < threshold) ++low;
    }
    acc += static_cast<double>(low) / static_cast<double>(row.size());
  }
  return acc / static_cast<double>(rates.size());
}

double IntraFreqNeighborRatio(const CellLayout& layout, const NeighborGraph& graph) {
  if (graph.num_nodes == 0) return 0.0;
  double acc = 0.0;
  for (int m = 0; m < graph.num_nodes; ++m) {
    const auto& nb = graph.neighbors[m];
    if (nb.empty()) continue;
    int same = 0;
    for (int j : nb) {
      if (layout.cells[j].freq_ghz == layout.cells[m].freq_ghz) ++same;
    }
    acc += static_cast<double>(same) / static_cast<double>(nb.size());
  }
  return acc / graph.num_nodes;
}

EpisodeReport ComputeReport(const EpisodeLog& log, const CellLayout& layout,
                            const NeighborGraph& graph, const MetricsConfig& config) {
  EpisodeReport r;
  r.ping_pong_ratio = PingPongRatio(log.events, config.ping_pong_slots);
  r.mean_handover_latency_s = HandoverLatency(log.events, log.slot_length);
  std::vector<std::vector<double>> rates;
  std::vector<double> gammas;
  double reward_sum = 0.0;
  std::size_t reward_n = 0;
  rates.reserve(log.slots.size());
  for (const auto& s : log.slots) {
    rates.push_back(s.rate_bps);
    gammas.push_back(s.gamma);
    for (double x : s.reward) reward_sum += x;
    reward_n += s.reward.size();
  }
  r.system_throughput = SystemThroughput(rates, log.request_bytes, log.slot_length);
  r.low_rate_user_ratio = LowRateUserRatio(rates, config.low_rate_bytes_per_s);
  r.total_handover_count = static_cast<int>(log.events.size());
  r.episode_objective = EpisodeObjective(gammas);
  r.intra_freq_neighbor_ratio = IntraFreqNeighborRatio(layout, graph);
  r.mean_reward = reward_n ? reward_sum / static_cast<double>(reward_n) : 0.0;
  r.ue_distribution_std = log.ue_distribution_std;
  r.average_ue_speed = log.average_ue_speed;
  return r;
}

}  // namespace hexcell
