#include "hexcell/handover.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hexcell {

const char* ToString(HandoverType type) {
  switch (type) {
    case HandoverType::kCah:
      return "CAH";
    case HandoverType::kCeh:
      return "CEH";
    case HandoverType::kPeh:
      return "PEH";
  }
  return "?";
}

HandoverType HandoverTypeFromString(const std::string& s) {
  if (s == "CAH") return HandoverType::kCah;
  if (s == "CEH") return HandoverType::kCeh;
  if (s == "PEH") return HandoverType::kPeh;
  throw std::invalid_argument("unknown handover type: " + s);
}

namespace {

void CheckRange(double v, double lo, double hi, const char* name,
                std::vector<std::string>& out) {
  if (v != std::floor(v)) {
    out.push_back(std::string(name) + " is not an integer");
  } else if (v < lo || v > hi) {
    std::ostringstream os;
    os << name << " = " << v << " outside [" << lo << ", " << hi << "]";
    out.push_back(os.str());
  }
}

// Candidate comparison: type priority, then RSRP, then cell id.
struct Candidate {
  HandoverType type;
  int cell;
  double rsrp;
};

bool Better(const Candidate& a, const Candidate& b) {
  if (a.type != b.type) return static_cast<int>(a.type) < static_cast<int>(b.type);
  if (a.rsrp != b.rsrp) return a.rsrp > b.rsrp;
  return a.cell < b.cell;
}

// Advances the monitor gate of one inter-frequency type.
void StepMonitor(bool below, int slot, const HandoverTiming& timing,
                 int& counter, int& run_start, bool& monitoring,
                 int& monitor_start, int& measure_from) {
  if (monitoring) return;
  if (!below) {
    counter = 0;
    run_start = -1;
    return;
  }
  if (counter == 0) run_start = slot;
  ++counter;
  if (counter >= timing.h1) {
    monitoring = true;
    monitor_start = run_start;
    measure_from = slot + timing.retune_slots + 1;
  }
}

}  // namespace

std::vector<std::string> ValidateParams(const HandoverParams& p) {
  const std::array<double, 5> raw{double(p.u_ca), double(p.z_ce),
                                  double(p.w_ce), double(p.z_pe),
                                  double(p.w_pe)};
  return ValidateRawParams(std::span<const double, 5>(raw));
}

std::vector<std::string> ValidateRawParams(std::span<const double, 5> v) {
  std::vector<std::string> out;
  CheckRange(v[0], kOffsetMin, kOffsetMax, "U_CA", out);
  CheckRange(v[1], kThresholdMin, kThresholdMax, "Z_CE", out);
  CheckRange(v[2], kThresholdMin, kThresholdMax, "W_CE", out);
  CheckRange(v[3], kThresholdMin, kThresholdMax, "Z_PE", out);
  CheckRange(v[4], kThresholdMin, kThresholdMax, "W_PE", out);
  return out;
}

MeasurementState::MeasurementState(int num_cells, int serving_cell)
    : serving(serving_cell),
      cah_counters(num_cells, 0),
      ce_counters(num_cells, 0),
      pe_counters(num_cells, 0) {}

void MeasurementState::Reset() {
  monitor_counter_ce = monitor_counter_pe = 0;
  monitoring_ce = monitoring_pe = false;
  monitor_run_start_ce = monitor_run_start_pe = -1;
  monitor_start_ce = monitor_start_pe = -1;
  measure_from_ce = measure_from_pe = 0;
  std::fill(cah_counters.begin(), cah_counters.end(), 0);
  std::fill(ce_counters.begin(), ce_counters.end(), 0);
  std::fill(pe_counters.begin(), pe_counters.end(), 0);
  pending.reset();
}

bool MeasurementState::IsClear() const {
  auto zero = [](const std::vector<int>& v) {
    for (int c : v) {
      if (c != 0) return false;
    }
    return true;
  };
  return monitor_counter_ce == 0 && monitor_counter_pe == 0 &&
         !monitoring_ce && !monitoring_pe && zero(cah_counters) &&
         zero(ce_counters) && zero(pe_counters) && !pending.has_value();
}

NeighborSets BuildMeasurementNeighbors(const CellLayout& layout,
                                       double grid_length, int kappa) {
  const int per_side =
      std::max(1, static_cast<int>(std::lround(layout.map_size_m / grid_length)));
  const int m_count = layout.size();
  NeighborSets out(m_count);
  for (int m = 0; m < m_count; ++m) {
    const Vec2 c = layout.cells[m].center;
    const int gx = GridIndex(c.x, grid_length, per_side);
    const int gy = GridIndex(c.y, grid_length, per_side);
    for (int j = 0; j < m_count; ++j) {
      if (j == m) continue;
      const Vec2 o = layout.cells[j].center;
      const int ox = GridIndex(o.x, grid_length, per_side);
      const int oy = GridIndex(o.y, grid_length, per_side);
      if (std::abs(ox - gx) <= kappa && std::abs(oy - gy) <= kappa) {
        out[m].push_back(j);
      }
    }
  }
  return out;
}

std::optional<PendingHandover> StepMeasurements(
    MeasurementState& s, std::span<const double> rsrp_row,
    const HandoverParams& params, const HandoverTiming& timing,
    const CellLayout& layout, const NeighborSets& neighbors, int slot) {
  const int m = s.serving;
  if (m < 0 || m >= static_cast<int>(rsrp_row.size()) || m >= layout.size()) {
    throw InternalError("StepMeasurements: serving cell missing from RSRP row");
  }
  if (s.pending) return std::nullopt;  // awaiting execution

  const double serving = rsrp_row[m];
  const double f_serving = layout.cells[m].freq_ghz;

  StepMonitor(serving <= params.z_ce, slot, timing, s.monitor_counter_ce,
              s.monitor_run_start_ce, s.monitoring_ce, s.monitor_start_ce,
              s.measure_from_ce);
  StepMonitor(serving <= params.z_pe, slot, timing, s.monitor_counter_pe,
              s.monitor_run_start_pe, s.monitoring_pe, s.monitor_start_pe,
              s.measure_from_pe);
  const bool measure_ce = s.monitoring_ce && slot >= s.measure_from_ce;
  const bool measure_pe = s.monitoring_pe && slot >= s.measure_from_pe;

  std::optional<Candidate> best;
  auto offer = [&](HandoverType type, int cell) {
    const Candidate c{type, cell, rsrp_row[cell]};
    if (!best || Better(c, *best)) best = c;
  };

  for (int j : neighbors[m]) {
    const double g = rsrp_row[j];
    const double f = layout.cells[j].freq_ghz;
    if (f == f_serving) {
      s.cah_counters[j] = (g - serving >= params.u_ca) ? s.cah_counters[j] + 1 : 0;
      if (s.cah_counters[j] >= timing.h2) offer(HandoverType::kCah, j);
    } else if (f < f_serving) {
      if (measure_ce) {
        s.ce_counters[j] = (g >= params.w_ce) ? s.ce_counters[j] + 1 : 0;
        if (s.ce_counters[j] >= timing.h2) offer(HandoverType::kCeh, j);
      }
    } else {
      if (measure_pe) {
        s.pe_counters[j] = (g >= params.w_pe) ? s.pe_counters[j] + 1 : 0;
        if (s.pe_counters[j] >= timing.h2) offer(HandoverType::kPeh, j);
      }
    }
  }

  if (!best) return std::nullopt;
  PendingHandover p;
  p.target = best->cell;
  p.type = best->type;
  p.report_slot = slot;
  if (best->type == HandoverType::kCeh) p.monitor_start_slot = s.monitor_start_ce;
  if (best->type == HandoverType::kPeh) p.monitor_start_slot = s.monitor_start_pe;
  s.pending = p;
  return p;
}

std::optional<HandoverEvent> ExecutePending(MeasurementState& s,
                                            std::vector<int>& serving_of_ue,
                                            int ue, int slot, int num_cells) {
  if (!s.pending) return std::nullopt;
  const PendingHandover p = *s.pending;
  if (p.report_slot >= slot) return std::nullopt;  // executes next slot
  if (p.target < 0 || p.target >= num_cells) {
    s.Reset();
    return std::nullopt;
  }
  HandoverEvent ev;
  ev.ue = ue;
  ev.source = serving_of_ue[ue];
  ev.target = p.target;
  ev.type = p.type;
  ev.report_slot = p.report_slot;
  ev.execute_slot = slot;
  if (p.type != HandoverType::kCah) ev.monitor_start_slot = p.monitor_start_slot;
  serving_of_ue[ue] = p.target;
  s.serving = p.target;
  s.Reset();
  return ev;
}

std::vector<int> InitialAssociation(const LinkMatrix& links) {
  std::vector<int> out(links.num_ues, 0);
  for (int k = 0; k < links.num_ues; ++k) {
    int best = 0;
    for (int m = 1; m < links.num_cells; ++m) {
      if (links.rsrp(m, k) > links.rsrp(best, k)) best = m;
    }
    out[k] = best;
  }
  return out;
}

std::vector<std::vector<int>> AssociationMatrix(std::span<const int> serving,
                                                int num_cells) {
  std::vector<std::vector<int>> alpha(num_cells,
                                      std::vector<int>(serving.size(), 0));
  for (std::size_t k = 0; k < serving.size(); ++k) {
    alpha.at(serving[k])[k] = 1;
  }
  return alpha;
}

}  // namespace hexcell
