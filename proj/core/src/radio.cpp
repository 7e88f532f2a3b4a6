#include "hexcell/radio.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hexcell/rng.hpp"

namespace hexcell {

namespace {

void RequirePositive(double d, double f) {
  if (!(d > 0.0)) throw std::domain_error("path loss: distance must be > 0");
  if (!(f > 0.0)) throw std::domain_error("path loss: frequency must be > 0");
}

}  // namespace

double LosModel::Probability(double distance_m) const {
  switch (kind) {
    case LosModelKind::kAlwaysLos:
      return 1.0;
    case LosModelKind::kAlwaysNlos:
      return 0.0;
    case LosModelKind::kTr38901Uma:
      return UmaLosProbability(distance_m);
    case LosModelKind::kFixedProbability:
      return p;
  }
  return p;
}

void ValidateRadio(const RadioConfig& c) {
  if (!(c.rayleigh_scale > 0.0)) {
    throw ConfigError("radio.rayleigh_scale must be positive");
  }
  if (c.los_model.kind == LosModelKind::kFixedProbability &&
      !(c.los_model.p >= 0.0 && c.los_model.p <= 1.0)) {
    throw ConfigError("radio.los_model.p must lie in [0, 1]");
  }
  if (!(c.min_distance_m > 0.0)) {
    throw ConfigError("radio.min_distance_m must be positive");
  }
}

double PathLossLos(double d, double f) {
  RequirePositive(d, f);
  return 28.0 + 22.0 * std::log10(d) + 20.0 * std::log10(f);
}

double PathLossNlos(double d, double f) {
  RequirePositive(d, f);
  return 32.4 + 30.0 * std::log10(d) + 20.0 * std::log10(f);
}

double AvgPathLoss(double d, double f, double pr_los) {
  return PathLossLos(d, f) * pr_los + PathLossNlos(d, f) * (1.0 - pr_los);
}

double UmaLosProbability(double d) {
  if (d <= 18.0) return 1.0;
  return 18.0 / d + std::exp(-d / 63.0) * (1.0 - 18.0 / d);
}

double DbmToMw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double MwToDbm(double mw) { return 10.0 * std::log10(mw); }

double RayleighPowerGain(double h, double scale) {
  return h * h / (2.0 * scale * scale);
}

double Rsrp(double avg_path_loss_db, const RadioConfig& c, double h) {
  const double budget = c.tx_power_dbm - avg_path_loss_db + c.g_tx_db + c.g_rx_db;
  switch (c.fading) {
    case FadingMode::kOff:
      return budget;
    case FadingMode::kLinear:
      return budget + 10.0 * std::log10(RayleighPowerGain(h, c.rayleigh_scale));
    case FadingMode::kStrict:
      return h * budget;
  }
  return budget;
}

double Sinr(double serving_dbm, std::span<const double> interferer_dbm,
            std::span<const bool> same_freq, double noise_dbm) {
  if (interferer_dbm.size() != same_freq.size()) {
    throw std::invalid_argument("Sinr: interferer/flag size mismatch");
  }
  double interference = 0.0;
  for (std::size_t j = 0; j < interferer_dbm.size(); ++j) {
    if (same_freq[j]) interference += DbmToMw(interferer_dbm[j]);
  }
  return DbmToMw(serving_dbm) / (interference + DbmToMw(noise_dbm));
}

double Rate(bool served, double bandwidth_hz, double sinr, int num_served) {
  if (!served) return 0.0;
  if (num_served < 1) {
    throw InternalError("Rate: served UE but the cell serves nobody");
  }
  return bandwidth_hz / num_served * std::log2(1.0 + sinr);
}

double RayleighFromUniform(double u, double scale) {
  return scale * std::sqrt(-2.0 * std::log1p(-u));
}

std::span<const double> LinkMatrix::RsrpRowOfUe(
    int ue, std::vector<double>& scratch) const {
  scratch.resize(num_cells);
  for (int m = 0; m < num_cells; ++m) scratch[m] = rsrp(m, ue);
  return scratch;
}

LinkMatrix ComputeLinks(const CellLayout& layout, std::span<const Vec2> ues,
                        const RadioConfig& config, uint64_t fading_seed,
                        int slot) {
  LinkMatrix out;
  out.num_cells = layout.size();
  out.num_ues = static_cast<int>(ues.size());
  const std::size_t n = static_cast<std::size_t>(out.num_cells) * out.num_ues;
  out.rsrp_dbm.resize(n);
  out.sinr.resize(n);

  std::vector<double> linear(n);
  for (int m = 0; m < out.num_cells; ++m) {
    const Cell& cell = layout.cells[m];
    for (int k = 0; k < out.num_ues; ++k) {
      const double d =
          std::max(Distance(cell.center, ues[k]), config.min_distance_m);
      const double pl =
          AvgPathLoss(d, cell.freq_ghz, config.los_model.Probability(d));
      double h = 1.0;
      if (config.fading != FadingMode::kOff) {
        const double u = HashUniform(fading_seed, static_cast<uint64_t>(slot),
                                     static_cast<uint64_t>(m),
                                     static_cast<uint64_t>(k));
        h = RayleighFromUniform(u, config.rayleigh_scale);
      }
      const std::size_t idx = static_cast<std::size_t>(m) * out.num_ues + k;
      out.rsrp_dbm[idx] = Rsrp(pl, config, h);
      linear[idx] = DbmToMw(out.rsrp_dbm[idx]);
    }
  }

  const double noise = DbmToMw(config.noise_dbm);
  for (int m = 0; m < out.num_cells; ++m) {
    for (int k = 0; k < out.num_ues; ++k) {
      double interference = 0.0;
      for (int j = 0; j < out.num_cells; ++j) {
        if (j == m || layout.cells[j].freq_ghz != layout.cells[m].freq_ghz) {
          continue;
        }
        interference += linear[static_cast<std::size_t>(j) * out.num_ues + k];
      }
      const std::size_t idx = static_cast<std::size_t>(m) * out.num_ues + k;
      out.sinr[idx] = linear[idx] / (interference + noise);
    }
  }
  return out;
}

}  // namespace hexcell
