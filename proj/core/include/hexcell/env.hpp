#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hexcell/consensus.hpp"
#include "hexcell/handover.hpp"
#include "hexcell/radio.hpp"
#include "hexcell/scenario.hpp"

namespace hexcell {

struct ObservationConfig {
  double grid_length_m = 200.0;  // nu
  int kappa = 7;                 // window is (2 kappa + 1)^2 grids
  int eta = 5;                   // rolling window length in slots

  int side() const { return 2 * kappa + 1; }
};

enum class EmptyCellLoad { kZero };

struct EnvConfig {
  ScenarioConfig scenario;
  RadioConfig radio;
  HandoverTiming timing;
  ObservationConfig observation;
  double chi_m = 2000.0;
  bool lazy_consensus = false;
  // Agents choose new parameters every action_period slots; parameters are
  // held in between.
  int action_period = 1;
  EmptyCellLoad empty_cell_load = EmptyCellLoad::kZero;
  // Diagnostic: reward against the exact network average instead of the
  // consensus estimate.
  bool exact_average_reward = false;
  // Draw a fresh random frequency plan every episode.
  bool rerandomize_frequencies = false;
};

// Throws ConfigError. Checks every section plus cross-section constraints.
void ValidateEnvConfig(const EnvConfig& config);

// Rolling window of eta (UED, CSM) grid pairs, oldest first.
class Observation {
 public:
  Observation() = default;
  Observation(int eta, int side)
      : eta_(eta), side_(side), data_(static_cast<std::size_t>(eta) * 2 * side * side, 0) {}

  int eta() const { return eta_; }
  int side() const { return side_; }
  int channels() const { return 2 * eta_; }
  int tokens() const { return side_ * side_; }

  // w = window position (0 oldest), row = y offset, col = x offset.
  int32_t ued(int w, int row, int col) const { return data_[Index(w, 0, row, col)]; }
  int32_t csm(int w, int row, int col) const { return data_[Index(w, 1, row, col)]; }
  int32_t& ued(int w, int row, int col) { return data_[Index(w, 0, row, col)]; }
  int32_t& csm(int w, int row, int col) { return data_[Index(w, 1, row, col)]; }

  // Value of token (row * side + col) on channel c, where c = 2 w + {0: UED, 1: CSM}.
  int32_t at(int token, int channel) const {
    return data_[Index(channel / 2, channel % 2, token / side_, token % side_)];
  }

  std::span<const int32_t> raw() const { return data_; }
  friend bool operator==(const Observation&, const Observation&) = default;

 private:
  std::size_t Index(int w, int kind, int row, int col) const {
    return ((static_cast<std::size_t>(w) * 2 + kind) * side_ + row) * side_ + col;
  }

  int eta_ = 0;
  int side_ = 0;
  std::vector<int32_t> data_;
};

inline constexpr int kNumHeads = 5;
inline constexpr int kActionsPerHead = 97;

// Indices into the five per-parameter action heads, in the order
// (U_CA, Z_CE, Z_PE, W_CE, W_PE). Index i decodes to U = i and to
// threshold = -44 - i.
using ActionVector = std::array<int, kNumHeads>;

// Throws std::out_of_range for an index outside [0, 96].
HandoverParams DecodeAction(const ActionVector& action);
ActionVector EncodeParams(const HandoverParams& params);
ActionVector MidRangeAction();

class ActionError : public std::out_of_range {
 public:
  ActionError(const std::string& what, int agent)
      : std::out_of_range(what), agent_(agent) {}
  int agent() const { return agent_; }

 private:
  int agent_;
};

// Per-UE grid snapshot of one slot.
struct GridSnapshot {
  std::vector<int> grid_x;
  std::vector<int> grid_y;
  std::vector<int> serving;
};

// Builds cell m's observation from a window of snapshots (oldest first;
// fewer than eta entries are zero-padded at the front).
Observation BuildObservation(int cell, const CellLayout& layout,
                             const ObservationConfig& config,
                             std::span<const GridSnapshot> window);

// Population std of the loads.
double LoadStd(std::span<const double> loads);
// Sum over slots of the per-slot load std.
double EpisodeObjective(std::span<const double> gammas);

// Completion-time load of one cell: mean over served UEs of D / R times the
// slot length. D in bytes, R in bit/s.
double CellLoad(std::span<const double> request_bytes,
                std::span<const double> rates_bps, double slot_length);

struct SlotRecord {
  int slot = 0;
  std::vector<double> load;         // L_{m,t}
  std::vector<double> estimate;     // rho_{m,t}
  std::vector<double> reward;       // -|L - rho|
  std::vector<double> exact_reward; // -|L - mean(L)|
  double gamma = 0.0;               // load std
  std::vector<int> serving;         // per UE after this slot's executions
  std::vector<double> rate_bps;     // per UE on the serving link
  std::vector<HandoverParams> params;
};

struct EpisodeLog {
  std::vector<SlotRecord> slots;
  std::vector<HandoverEvent> events;
  std::vector<double> request_bytes;  // per UE
  double slot_length = 0.0;
  int num_cells = 0;
  int num_ues = 0;
  double ue_distribution_std = 0.0;
  double average_ue_speed = 0.0;
};

struct StepResult {
  std::vector<Observation> observations;
  std::vector<double> rewards;
  bool done = false;
};

// The multi-cell Dec-POMDP. One Step() advances one slot through the fixed
// phase order: apply parameters, move UEs, radio, measurements, execution of
// last slot's reports, loads/consensus/rewards, observations.
class Environment {
 public:
  explicit Environment(EnvConfig config);

  std::vector<Observation> Reset(uint64_t episode_seed);
  // Same, with explicit mobility parameters instead of drawing them.
  std::vector<Observation> Reset(uint64_t episode_seed, const MobilityDraw& draw);
  // Same, with pre-built trajectories.
  std::vector<Observation> Reset(uint64_t episode_seed,
                                 std::vector<UeTrajectory> trajectories);

  StepResult Step(std::span<const ActionVector> actions);

  // True if slot t (1-based) is one where agents choose new parameters.
  bool IsDecisionSlot(int t) const { return (t - 1) % config_.action_period == 0; }

  const EnvConfig& config() const { return config_; }
  int num_cells() const { return layout_.size(); }
  int num_ues() const { return static_cast<int>(trajectories_.size()); }
  int slot() const { return slot_; }
  bool done() const { return slot_ > config_.scenario.num_slots; }
  const CellLayout& layout() const { return layout_; }
  const NeighborSets& measurement_neighbors() const { return neighbors_; }
  const std::optional<NeighborGraph>& graph() const { return graph_; }
  const std::vector<UeTrajectory>& trajectories() const { return trajectories_; }
  const std::vector<int>& serving() const { return serving_; }
  const std::vector<MeasurementState>& measurement_states() const { return states_; }
  const std::vector<HandoverParams>& params() const { return params_; }
  const LinkMatrix& links() const { return links_; }
  const std::vector<double>& loads() const { return loads_; }
  const std::vector<double>& estimates() const { return consensus_.estimate; }
  const EpisodeLog& log() const { return log_; }
  std::vector<Observation> CurrentObservations() const;

 private:
  void ResetCommon(uint64_t episode_seed, std::vector<UeTrajectory> trajectories);
  std::vector<Vec2> PositionsAt(int t) const;
  GridSnapshot Snapshot(std::span<const Vec2> positions) const;

  EnvConfig config_;
  CellLayout layout_;
  NeighborSets neighbors_;
  std::optional<NeighborGraph> graph_;
  std::vector<UeTrajectory> trajectories_;
  std::vector<double> requests_;
  uint64_t fading_seed_ = 0;
  int slot_ = 0;
  bool aborted_ = false;
  std::vector<int> serving_;
  std::vector<MeasurementState> states_;
  std::vector<HandoverParams> params_;
  LinkMatrix links_;
  std::vector<double> loads_;
  ConsensusState consensus_;
  std::deque<GridSnapshot> window_;
  EpisodeLog log_;
};

}  // namespace hexcell
