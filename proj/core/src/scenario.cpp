#include "hexcell/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hexcell {

namespace {

double Clamp(double v, double hi) { return std::clamp(v, 0.0, hi); }

Vec2 ClampToMap(Vec2 p, double map_size) {
  return {Clamp(p.x, map_size), Clamp(p.y, map_size)};
}

void RequireRange(const Range& r, const char* name, bool positive) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    std::ostringstream os;
    os << "ou_params." << name << ": invalid range [" << r.lo << ", " << r.hi
       << "]";
    throw ConfigError(os.str());
  }
  if (positive && !(r.lo > 0.0)) {
    std::ostringstream os;
    os << "ou_params." << name << " must be positive";
    throw ConfigError(os.str());
  }
}

}  // namespace

double BandwidthForFrequency(double freq_ghz) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(freq_ghz - kBandFrequenciesGhz[i]) < 1e-9) {
      return kBandBandwidthsHz[i];
    }
  }
  std::ostringstream os;
  os << "frequency " << freq_ghz
     << " GHz is not one of the allowed bands (0.7, 2.6, 4.9)";
  throw ConfigError(os.str());
}

std::vector<double> DefaultFrequencyPlan(int grid_side) {
  std::vector<double> plan;
  plan.reserve(static_cast<std::size_t>(grid_side) * grid_side);
  for (int row = 0; row < grid_side; ++row) {
    for (int col = 0; col < grid_side; ++col) {
      plan.push_back(kBandFrequenciesGhz[(row + 2 * col) % 3]);
    }
  }
  return plan;
}

std::vector<double> RandomFrequencyPlan(int num_cells, Rng& rng) {
  std::vector<double> plan(num_cells);
  for (auto& f : plan) f = kBandFrequenciesGhz[rng.UniformInt(3)];
  return plan;
}

void ValidateScenario(const ScenarioConfig& c) {
  if (!(c.map_size_m > 0.0)) throw ConfigError("map_size_m must be positive");
  if (c.grid_side < 1) throw ConfigError("grid_side must be at least 1");
  if (c.num_ues < 1) throw ConfigError("num_ues must be at least 1");
  if (!(c.slot_length > 0.0)) throw ConfigError("slot_length must be positive");
  if (c.num_slots < 1) throw ConfigError("num_slots must be at least 1");
  if (!(c.request_bytes > 0.0)) {
    throw ConfigError("request_bytes must be positive");
  }
  if (!c.request_overrides.empty() &&
      static_cast<int>(c.request_overrides.size()) != c.num_ues) {
    throw ConfigError("request_overrides must list one size per UE");
  }
  for (double d : c.request_overrides) {
    if (!(d > 0.0)) throw ConfigError("request_overrides must be positive");
  }
  if (!c.frequency_plan.empty()) {
    if (static_cast<int>(c.frequency_plan.size()) != c.num_cells()) {
      throw ConfigError("frequency_plan must list grid_side^2 frequencies");
    }
    for (double f : c.frequency_plan) BandwidthForFrequency(f);
  }
  const auto& ou = c.ou_params;
  if (!(ou.iota >= 0.0)) throw ConfigError("ou_params.iota must be >= 0");
  if (!(ou.volatility >= 0.0)) {
    throw ConfigError("ou_params.volatility must be >= 0");
  }
  RequireRange(ou.mu_x, "mu_x", false);
  RequireRange(ou.mu_y, "mu_y", false);
  RequireRange(ou.sigma_x, "sigma_x", true);
  RequireRange(ou.sigma_y, "sigma_y", true);
}

CellLayout BuildLayout(const ScenarioConfig& config) {
  if (config.frequency_plan.empty()) {
    const auto plan = DefaultFrequencyPlan(config.grid_side);
    return BuildLayout(config, plan);
  }
  return BuildLayout(config, config.frequency_plan);
}

CellLayout BuildLayout(const ScenarioConfig& config,
                       std::span<const double> frequency_plan) {
  if (static_cast<int>(frequency_plan.size()) != config.num_cells()) {
    throw ConfigError("frequency plan size does not match grid_side^2");
  }
  CellLayout layout;
  layout.map_size_m = config.map_size_m;
  layout.grid_side = config.grid_side;
  const double spacing = config.map_size_m / config.grid_side;
  layout.cells.reserve(frequency_plan.size());
  for (int row = 0; row < config.grid_side; ++row) {
    for (int col = 0; col < config.grid_side; ++col) {
      const double f = frequency_plan[row * config.grid_side + col];
      layout.cells.push_back(Cell{
          .center = {(col + 0.5) * spacing, (row + 0.5) * spacing},
          .freq_ghz = f,
          .bandwidth_hz = BandwidthForFrequency(f),
      });
    }
  }
  return layout;
}

MobilityDraw DrawMobility(const OuParams& p, Rng& rng) {
  MobilityDraw d;
  d.iota = p.iota;
  d.volatility = p.volatility;
  d.mu_x = p.mu_x.Sample(rng);
  d.mu_y = p.mu_y.Sample(rng);
  d.sigma_x = p.sigma_x.Sample(rng);
  d.sigma_y = p.sigma_y.Sample(rng);
  return d;
}

std::vector<UeTrajectory> GenerateTrajectories(const ScenarioConfig& config,
                                               uint64_t rng_seed) {
  Rng rng(DeriveSeed(rng_seed, {kMobilityStream, 0}));
  const MobilityDraw draw = DrawMobility(config.ou_params, rng);
  return GenerateTrajectories(config, draw, rng_seed);
}

Vec2 OuStep(Vec2 position, Vec2 mean, double iota, double volatility,
            Vec2 noise) {
  return position + iota * (mean - position) + volatility * noise;
}

std::vector<UeTrajectory> GenerateTrajectories(const ScenarioConfig& config,
                                               const MobilityDraw& draw,
                                               uint64_t rng_seed) {
  if (!(draw.sigma_x > 0.0) || !(draw.sigma_y > 0.0)) {
    throw ConfigError("position std must be positive");
  }
  Rng rng(DeriveSeed(rng_seed, {kMobilityStream, 1}));
  const double map = config.map_size_m;
  std::vector<UeTrajectory> out(config.num_ues);
  for (int k = 0; k < config.num_ues; ++k) {
    auto& traj = out[k];
    traj.request_bytes = config.request_overrides.empty()
                             ? config.request_bytes
                             : config.request_overrides[k];
    Vec2 start{draw.mu_x + draw.sigma_x * rng.Normal(),
               draw.mu_y + draw.sigma_y * rng.Normal()};
    Vec2 mean{draw.mu_x + draw.sigma_x * rng.Normal(),
              draw.mu_y + draw.sigma_y * rng.Normal()};
    traj.mean = ClampToMap(mean, map);
    traj.positions.reserve(config.num_slots + 1);
    traj.positions.push_back(ClampToMap(start, map));
    for (int t = 0; t < config.num_slots; ++t) {
      const Vec2 noise{rng.Normal(), rng.Normal()};
      const Vec2 next = OuStep(traj.positions.back(), traj.mean, draw.iota,
                               draw.volatility, noise);
      traj.positions.push_back(ClampToMap(next, map));
    }
  }
  return out;
}

int GridIndex(double coord, double grid_length, int grids_per_side) {
  const int idx = static_cast<int>(std::floor(coord / grid_length));
  return std::clamp(idx, 0, grids_per_side - 1);
}

double UeDistributionStd(std::span<const UeTrajectory> trajectories,
                         double grid_length, double map_size, int num_slots) {
  const int per_side = static_cast<int>(std::lround(map_size / grid_length));
  if (per_side < 1 ||
      std::abs(per_side * grid_length - map_size) > 1e-6 * map_size) {
    throw std::invalid_argument("grid length must divide the map size");
  }
  const std::size_t psi = static_cast<std::size_t>(per_side) * per_side;
  std::vector<double> counts(psi);
  double acc = 0.0;
  for (int t = 0; t < num_slots; ++t) {
    std::fill(counts.begin(), counts.end(), 0.0);
    for (const auto& traj : trajectories) {
      const Vec2 p = traj.positions.at(t);
      const int gx = GridIndex(p.x, grid_length, per_side);
      const int gy = GridIndex(p.y, grid_length, per_side);
      counts[static_cast<std::size_t>(gy) * per_side + gx] += 1.0;
    }
    double mean = 0.0;
    for (double c : counts) mean += c;
    mean /= static_cast<double>(psi);
    double var = 0.0;
    for (double c : counts) var += (c - mean) * (c - mean);
    acc += std::sqrt(var / static_cast<double>(psi));
  }
  return num_slots > 0 ? acc / num_slots : 0.0;
}

double AverageUeSpeed(std::span<const UeTrajectory> trajectories,
                      double slot_length) {
  double acc = 0.0;
  std::size_t n = 0;
  for (const auto& traj : trajectories) {
    for (std::size_t t = 0; t + 1 < traj.positions.size(); ++t) {
      acc += Distance(traj.positions[t + 1], traj.positions[t]) / slot_length;
      ++n;
    }
  }
  return n > 0 ? acc / static_cast<double>(n) : 0.0;
}

}  // namespace hexcell
