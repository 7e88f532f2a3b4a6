#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hexcell/checkpoint.hpp"
#include "hexcell/config.hpp"
#include "hexcell/consensus.hpp"
#include "hexcell/logs.hpp"

namespace hexcell {

// Runs fn(i) for i in [0, n) on up to `threads` threads with a static chunked
// split. Results must be written by index; the first exception is rethrown.
void ParallelFor(int n, int threads, const std::function<void(int)>& fn);

// Seed of training episode e (0-based, global numbering).
uint64_t TrainEpisodeSeed(uint64_t run_seed, int64_t episode);
// Seed of evaluation episode e.
uint64_t EvalEpisodeSeed(uint64_t run_seed, int64_t episode);

struct TrainingRow {
  int64_t episode = 0;
  double objective = 0.0;
  double mean_reward = 0.0;
  double clip_fraction = 0.0;
  double mean_ratio = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  int handovers = 0;
};

std::string TrainingCsvHeader();
std::string TrainingCsvRow(const TrainingRow& row);

// In-memory training state of all agents.
struct TrainState {
  std::vector<Agent> agents;
  int64_t episodes_done = 0;
};

TrainState InitialTrainState(const RunConfig& config, uint64_t seed);
TrainState StateFromCheckpoint(const RunConfig& config, const Checkpoint& ckpt);
Checkpoint StateToCheckpoint(const RunConfig& config, const TrainState& state);

// Runs `episodes` more episodes of rollout followed by per-agent updates.
void TrainEpisodes(const RunConfig& config, uint64_t seed, int episodes,
                   TrainState& state, int parallel,
                   const std::function<void(const TrainingRow&)>& on_episode = {});

enum class Baseline { kLearned, kFixed, kRandom };

const char* ToString(Baseline b);
Baseline BaselineFromString(const std::string& s);

struct EvalOptions {
  Baseline baseline = Baseline::kFixed;
  bool greedy = true;
  HandoverParams fixed_params;  // for kFixed
  int episodes = 10;
  uint64_t seed = 1;
  int parallel = 1;
};

// Runs one episode in env (already constructed) under the given controller.
EpisodeRecord RunEpisode(Environment& env, const RunConfig& config,
                         const std::vector<Agent>* agents, const EvalOptions& options,
                         int64_t episode, uint64_t episode_seed,
                         std::optional<MobilityDraw> draw = std::nullopt);

std::vector<EpisodeRecord> Evaluate(const RunConfig& config,
                                    const std::vector<Agent>* agents,
                                    const EvalOptions& options);

struct Summary {
  int n = 0;
  double mean = 0.0;
  double std = 0.0;  // sample std
  double ci_lo = 0.0;
  double ci_hi = 0.0;  // normal-approximation 95% interval of the mean
};

Summary Summarize(const std::vector<double>& values);

// ---- Sweeps ---------------------------------------------------------------

enum class SweepAxis { kUeDistributionStd, kAverageSpeed, kIntraFreqRatio };

const char* ToString(SweepAxis a);
SweepAxis SweepAxisFromString(const std::string& s);

struct SweepOptions {
  SweepAxis axis = SweepAxis::kUeDistributionStd;
  std::vector<std::pair<double, double>> buckets;
  int episodes_per_bucket = 20;
  int max_attempts = 400;  // per accepted episode
  // Optional speed window applied to every accepted episode (m/s).
  std::optional<std::pair<double, double>> speed_window;
  // Optional UE-distribution-std window applied to every accepted episode.
  std::optional<std::pair<double, double>> distribution_window;
  EvalOptions eval;
};

struct SweepBucket {
  double lo = 0.0;
  double hi = 0.0;
  bool sampled = false;
  int accepted = 0;
  std::vector<EpisodeRecord> records;
  Summary objective;
  Summary load_std;   // per-slot mean of Gamma
  Summary handovers;
  Summary axis_value;
};

std::vector<SweepBucket> Sweep(const RunConfig& config,
                               const std::vector<Agent>* agents,
                               const SweepOptions& options);

// Spearman rank correlation with average ranks for ties.
double Spearman(const std::vector<double>& x, const std::vector<double>& y);

// ---- Consensus bound -------------------------------------------------------

struct BoundRunOptions {
  int steps = 10000;
  uint64_t seed = 1;
  bool synthetic = true;   // i.i.d. uniform loads in [0, zeta]
  double zeta = 1.0;       // synthetic only
};

BoundReport RunBoundCheck(const RunConfig& config, const BoundRunOptions& options,
                          std::vector<ConsensusTraceRow>* trace = nullptr);

// Synthetic i.i.d. loads uniform in [0, zeta]; satisfies the boundedness
// assumption with that zeta.
std::vector<std::vector<double>> SyntheticLoads(int steps, int nodes, double zeta,
                                                uint64_t seed);

// ---- On-disk runs ------------------------------------------------------------

struct RunFiles {
  std::filesystem::path dir;
  std::filesystem::path manifest() const { return dir / "manifest.json"; }
  std::filesystem::path config() const { return dir / "config.json"; }
  std::filesystem::path checkpoint() const { return dir / "checkpoint.bin"; }
  std::filesystem::path training_csv() const { return dir / "training.csv"; }
  std::filesystem::path episodes() const { return dir / "episodes.json"; }
  std::filesystem::path reports_csv() const { return dir / "reports.csv"; }
  std::filesystem::path summary() const { return dir / "summary.json"; }
};

// Creates dir if needed and checks it is writable; throws std::runtime_error.
void PrepareOutputDir(const std::filesystem::path& dir);

void WriteManifest(const RunFiles& files, const RunConfig& config, uint64_t seed,
                   int64_t episodes, double wall_clock_s,
                   const std::vector<std::string>& outputs,
                   const std::string& command);

void WriteTextFile(const std::filesystem::path& path, const std::string& text);
std::string ReadTextFile(const std::filesystem::path& path);

struct TrainRunOptions {
  int episodes = 0;
  uint64_t seed = 1;
  std::filesystem::path out;
  std::optional<std::filesystem::path> resume;
  int parallel = 1;
  std::function<void(const TrainingRow&)> on_episode;
};

// Writes config.json, training.csv, checkpoint.bin, periodic checkpoints under
// checkpoints/ and manifest.json. Returns the final state.
TrainState TrainRun(const RunConfig& config, const TrainRunOptions& options);

// Writes config.json, episodes.json, reports.csv, summary.json and the
// manifest. Returns the episode records.
std::vector<EpisodeRecord> EvalRun(const RunConfig& config,
                                   const std::optional<std::filesystem::path>& checkpoint,
                                   const EvalOptions& options,
                                   const std::filesystem::path& out);

}  // namespace hexcell
