#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hexcell/scenario.hpp"

namespace hexcell {

enum class LosModelKind { kAlwaysLos, kAlwaysNlos, kTr38901Uma, kFixedProbability };

struct LosModel {
  LosModelKind kind = LosModelKind::kFixedProbability;
  double p = 1.0;  // only for kFixedProbability

  double Probability(double distance_m) const;
};

// kLinear applies the Rayleigh draw as a unit-mean power gain h^2 / (2 s^2)
// added in dB. kStrict multiplies the dB link budget by h, exactly as the
// RSRP expression is typeset; it exists for fidelity experiments only.
enum class FadingMode { kOff, kLinear, kStrict };

struct RadioConfig {
  double tx_power_dbm = 45.0;
  double g_tx_db = 10.0;
  double g_rx_db = 1.0;
  double noise_dbm = -110.0;
  double rayleigh_scale = 2.0;
  LosModel los_model;
  FadingMode fading = FadingMode::kLinear;
  double min_distance_m = 1.0;
};

void ValidateRadio(const RadioConfig& config);

// Path loss in dB for distance in metres and carrier in GHz. Both throw
// std::domain_error for d <= 0 or f <= 0.
double PathLossLos(double distance_m, double freq_ghz);
double PathLossNlos(double distance_m, double freq_ghz);
// dB-domain mixture of the two models.
double AvgPathLoss(double distance_m, double freq_ghz, double pr_los);

// Standard UMa LOS probability for a UE at 1.5 m (C'(h_UT) = 0).
double UmaLosProbability(double distance_m);

double DbmToMw(double dbm);
double MwToDbm(double mw);

double RayleighPowerGain(double h, double scale);

// RSRP in dBm given the average path loss and one fading draw h. With
// FadingMode::kOff h is ignored.
double Rsrp(double avg_path_loss_db, const RadioConfig& config, double h);

// Serving power over same-frequency interference plus noise, all in linear
// mW. same_freq[j] selects which interferers count.
double Sinr(double serving_dbm, std::span<const double> interferer_dbm,
            std::span<const bool> same_freq, double noise_dbm);

// Equal-split Shannon rate in bit/s; 0 when not served. Throws InternalError
// for a served UE with num_served == 0.
double Rate(bool served, double bandwidth_hz, double sinr, int num_served);

// Rayleigh(scale) draw by inverse CDF from a uniform in (0, 1).
double RayleighFromUniform(double u, double scale);

// Per-slot link quantities for every cell-UE pair, stored cell-major.
struct LinkMatrix {
  int num_cells = 0;
  int num_ues = 0;
  std::vector<double> rsrp_dbm;
  std::vector<double> sinr;

  double rsrp(int cell, int ue) const {
    return rsrp_dbm[static_cast<std::size_t>(cell) * num_ues + ue];
  }
  double sinr_at(int cell, int ue) const {
    return sinr[static_cast<std::size_t>(cell) * num_ues + ue];
  }
  std::span<const double> RsrpRowOfUe(int ue, std::vector<double>& scratch) const;
};

// RSRP and SINR for every pair at the given slot. Fading draws are a pure
// function of (fading_seed, slot, cell, ue).
LinkMatrix ComputeLinks(const CellLayout& layout, std::span<const Vec2> ues,
                        const RadioConfig& config, uint64_t fading_seed,
                        int slot);

}  // namespace hexcell
