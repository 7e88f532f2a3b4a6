#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hexcell/radio.hpp"
#include "hexcell/scenario.hpp"

namespace hexcell {

// CAH: intra-frequency, coverage based (no monitor gate).
// CEH: inter-frequency towards a lower band, coverage based.
// PEH: inter-frequency towards a higher band, priority based.
enum class HandoverType : int { kCah = 0, kCeh = 1, kPeh = 2 };

const char* ToString(HandoverType type);
HandoverType HandoverTypeFromString(const std::string& s);

inline constexpr int kOffsetMin = 0;
inline constexpr int kOffsetMax = 96;
inline constexpr int kThresholdMax = -44;
inline constexpr int kThresholdMin = -140;

struct HandoverParams {
  int u_ca = 48;   // dB
  int z_ce = -92;  // dBm
  int w_ce = -92;
  int z_pe = -92;
  int w_pe = -92;

  friend bool operator==(const HandoverParams&, const HandoverParams&) = default;
};

// Empty result means valid.
std::vector<std::string> ValidateParams(const HandoverParams& p);
// Same check for externally supplied values; also flags non-integers.
// Order: u_ca, z_ce, w_ce, z_pe, w_pe.
std::vector<std::string> ValidateRawParams(std::span<const double, 5> values);

struct HandoverTiming {
  int h1 = 5;  // slots the serving RSRP must stay <= Z before monitoring
  int h2 = 3;  // slots a report condition must hold
  // Slots between monitor activation and the first inter-frequency
  // measurement while the receiver retunes.
  int retune_slots = 1;
};

struct PendingHandover {
  int target = -1;
  HandoverType type = HandoverType::kCah;
  int report_slot = 0;
  int monitor_start_slot = -1;  // -1 for CAH
};

struct HandoverEvent {
  int ue = 0;
  int source = 0;
  int target = 0;
  HandoverType type = HandoverType::kCah;
  int report_slot = 0;
  int execute_slot = 0;
  std::optional<int> monitor_start_slot;

  friend bool operator==(const HandoverEvent&, const HandoverEvent&) = default;
};

// Per-UE handover memory. Counters are indexed by cell id.
struct MeasurementState {
  int serving = 0;
  int monitor_counter_ce = 0;
  int monitor_counter_pe = 0;
  bool monitoring_ce = false;
  bool monitoring_pe = false;
  int monitor_run_start_ce = -1;
  int monitor_run_start_pe = -1;
  int monitor_start_ce = -1;  // first slot of the run that armed monitoring
  int monitor_start_pe = -1;
  int measure_from_ce = 0;    // first slot inter-frequency counters advance
  int measure_from_pe = 0;
  std::vector<int> cah_counters;
  std::vector<int> ce_counters;
  std::vector<int> pe_counters;
  std::optional<PendingHandover> pending;

  MeasurementState() = default;
  MeasurementState(int num_cells, int serving_cell);

  // Clears every counter, flag and pending report.
  void Reset();
  bool IsClear() const;
};

// Cells a UE served by cell m is able to measure.
using NeighborSets = std::vector<std::vector<int>>;

// Neighbours of each cell are the cells whose centre falls in the cell's
// (2 kappa + 1)^2 observation window of grid_length squares.
NeighborSets BuildMeasurementNeighbors(const CellLayout& layout,
                                       double grid_length, int kappa);

// One slot of monitor/measure/report for a UE. The serving cell's parameters
// apply. Returns the report fired in this slot, if any; the report is also
// stored as state.pending. Throws InternalError if rsrp_row does not cover
// the serving cell.
std::optional<PendingHandover> StepMeasurements(
    MeasurementState& state, std::span<const double> rsrp_row,
    const HandoverParams& serving_params, const HandoverTiming& timing,
    const CellLayout& layout, const NeighborSets& neighbors, int slot);

// Applies a pending handover in the slot after its report. serving_of_ue is
// the association vector (alpha in index form). Returns the executed event;
// a pending handover to a cell that no longer exists is dropped and the
// state reset.
std::optional<HandoverEvent> ExecutePending(MeasurementState& state,
                                            std::vector<int>& serving_of_ue,
                                            int ue, int slot, int num_cells);

// Max-RSRP attachment, ties to the lowest cell id.
std::vector<int> InitialAssociation(const LinkMatrix& links);

// Binary association matrix alpha[m][k] from the index form.
std::vector<std::vector<int>> AssociationMatrix(std::span<const int> serving,
                                                int num_cells);

}  // namespace hexcell
