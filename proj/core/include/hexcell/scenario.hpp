#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hexcell/rng.hpp"
#include "hexcell/types.hpp"

namespace hexcell {

// Closed interval a parameter is drawn from; lo == hi pins the value.
struct Range {
  double lo = 0.0;
  double hi = 0.0;

  static Range Fixed(double v) { return {v, v}; }
  bool IsFixed() const { return lo == hi; }
  double Sample(Rng& rng) const { return IsFixed() ? lo : rng.Uniform(lo, hi); }
};

// Ornstein-Uhlenbeck mobility parameters. iota is the mean-reversion rate per
// slot, volatility the diffusion coefficient (metres per sqrt(slot)). The
// distribution means/stds are ranges re-drawn once per episode.
struct OuParams {
  double iota = 0.01;
  double volatility = 0.1;
  Range mu_x{500.0, 4500.0};
  Range mu_y{500.0, 4500.0};
  Range sigma_x{500.0, 5000.0};
  Range sigma_y{500.0, 5000.0};
};

// One concrete draw of the mobility parameters for an episode.
struct MobilityDraw {
  double iota = 0.01;
  double volatility = 0.1;
  double mu_x = 2500.0;
  double mu_y = 2500.0;
  double sigma_x = 500.0;
  double sigma_y = 500.0;
};

struct ScenarioConfig {
  double map_size_m = 5000.0;
  int grid_side = 5;
  int num_ues = 500;
  double slot_length = 0.2;  // seconds
  int num_slots = 100;
  // Carrier frequency (GHz) per cell, row-major from the south-west corner.
  // Empty selects DefaultFrequencyPlan(grid_side).
  std::vector<double> frequency_plan;
  OuParams ou_params;
  uint64_t seed = 1;
  double request_bytes = 1e6;
  // Optional per-UE request size; overrides request_bytes when non-empty.
  std::vector<double> request_overrides;

  int num_cells() const { return grid_side * grid_side; }
};

struct Cell {
  Vec2 center;
  double freq_ghz = 0.0;
  double bandwidth_hz = 0.0;
};

struct CellLayout {
  std::vector<Cell> cells;
  double map_size_m = 0.0;
  int grid_side = 0;

  int size() const { return static_cast<int>(cells.size()); }
};

struct UeTrajectory {
  // positions[i] is the location at slot i + 1; size num_slots + 1.
  std::vector<Vec2> positions;
  Vec2 mean;
  double request_bytes = 1e6;
};

// The three FR1 bands and their bandwidths.
inline constexpr double kBandFrequenciesGhz[3] = {0.7, 2.6, 4.9};
inline constexpr double kBandBandwidthsHz[3] = {10e6, 40e6, 50e6};

// Bandwidth for one of the allowed carrier frequencies; throws ConfigError
// for anything else.
double BandwidthForFrequency(double freq_ghz);

// Deterministic mixed plan used when the configuration does not give one.
std::vector<double> DefaultFrequencyPlan(int grid_side);

// Uniformly random plan over the three bands.
std::vector<double> RandomFrequencyPlan(int num_cells, Rng& rng);

// Throws ConfigError describing the first problem found.
void ValidateScenario(const ScenarioConfig& config);

CellLayout BuildLayout(const ScenarioConfig& config);

// Same as BuildLayout but with an explicit plan (used when the plan is
// re-randomised per episode).
CellLayout BuildLayout(const ScenarioConfig& config,
                       std::span<const double> frequency_plan);

MobilityDraw DrawMobility(const OuParams& params, Rng& rng);

// Draws the mobility parameters from the configured ranges with rng_seed and
// generates every UE trajectory.
std::vector<UeTrajectory> GenerateTrajectories(const ScenarioConfig& config,
                                               uint64_t rng_seed);

std::vector<UeTrajectory> GenerateTrajectories(const ScenarioConfig& config,
                                               const MobilityDraw& draw,
                                               uint64_t rng_seed);

// One OU step with unit time step: l + iota (mu - l) + volatility * noise.
Vec2 OuStep(Vec2 position, Vec2 mean, double iota, double volatility,
            Vec2 noise);

// Grid index along one axis for a coordinate in [0, map_size].
int GridIndex(double coord, double grid_length, int grids_per_side);

// Mean over slots 1..num_slots of the population std of per-grid UE counts.
double UeDistributionStd(std::span<const UeTrajectory> trajectories,
                         double grid_length, double map_size, int num_slots);

// Mean over UEs and slots of |l_{t+1} - l_t| / slot_length.
double AverageUeSpeed(std::span<const UeTrajectory> trajectories,
                      double slot_length);

}  // namespace hexcell
