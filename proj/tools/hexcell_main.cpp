// hexcell: train, evaluate, sweep, verify-bound and export.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hexcell/runner.hpp"

namespace {

using namespace hexcell;

enum class Level { kDebug = 0, kInfo, kWarn, kError };

Level g_level = Level::kInfo;

void InitLogLevel() {
  const char* env = std::getenv("HEXCELL_LOG_LEVEL");
  if (!env) return;
  const std::string v = env;
  if (v == "debug") g_level = Level::kDebug;
  else if (v == "info") g_level = Level::kInfo;
  else if (v == "warn") g_level = Level::kWarn;
  else if (v == "error") g_level = Level::kError;
}

void Log(Level level, const std::string& msg) {
  if (level < g_level) return;
  static const char* kTag[] = {"debug", "info", "warn", "error"};
  std::cerr << "[" << kTag[static_cast<int>(level)] << "] " << msg << "\n";
}

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitViolation = 3;

// "lo:hi,lo:hi"
std::vector<std::pair<double, double>> ParseBuckets(const std::string& s) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("bucket '" + item + "' is not lo:hi");
    const double lo = std::stod(item.substr(0, colon));
    const double hi = std::stod(item.substr(colon + 1));
    if (!(lo <= hi)) throw ConfigError("bucket '" + item + "' has lo > hi");
    out.emplace_back(lo, hi);
  }
  if (out.empty()) throw ConfigError("no buckets given");
  return out;
}

HandoverParams ParseParams(const std::string& s) {
  std::array<double, 5> v{};
  std::stringstream ss(s);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= 5) throw ConfigError("--params takes five values");
    v[i++] = std::stod(item);
  }
  if (i != 5) throw ConfigError("--params takes five values: U_CA,Z_CE,W_CE,Z_PE,W_PE");
  const auto errors = ValidateRawParams(std::span<const double, 5>(v));
  if (!errors.empty()) throw ConfigError("--params: " + errors.front());
  return {int(v[0]), int(v[1]), int(v[2]), int(v[3]), int(v[4])};
}

RunConfig ReadConfig(const std::string& path) {
  if (path.empty()) return RunConfig{};
  return LoadConfig(path);
}

void PrintSummary(const char* name, const Summary& s) {
  std::printf("%-22s mean %.6g  std %.6g  95%% CI [%.6g, %.6g]  (n=%d)\n", name, s.mean,
              s.std, s.ci_lo, s.ci_hi, s.n);
}

}  // namespace

int main(int argc, char** argv) {
  InitLogLevel();
  CLI::App app{"hexcell: decentralized handover parameter optimisation simulator"};
  app.require_subcommand(1);

  std::string config_path;
  uint64_t seed = 1;
  int episodes = 0;
  std::string out_dir;
  int parallel = 1;

  auto* train = app.add_subcommand("train", "train per-cell PPO agents");
  std::string resume;
  train->add_option("--config", config_path, "JSON config")->check(CLI::ExistingFile);
  train->add_option("--seed", seed, "run seed");
  train->add_option("--episodes", episodes, "episodes to train")->check(CLI::NonNegativeNumber);
  train->add_option("--out", out_dir, "output directory")->required();
  train->add_option("--resume", resume, "checkpoint to continue from")->check(CLI::ExistingFile);
  train->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "evaluate a policy or baseline");
  std::string checkpoint, mode = "greedy", baseline = "learned", params_text;
  int eval_episodes = 10;
  eval->add_option("--config", config_path, "JSON config")->check(CLI::ExistingFile);
  eval->add_option("--checkpoint", checkpoint, "trained checkpoint")->check(CLI::ExistingFile);
  eval->add_option("--seed", seed, "evaluation seed");
  eval->add_option("--episodes", eval_episodes, "episodes")->check(CLI::PositiveNumber);
  eval->add_option("--mode", mode, "greedy|sample")->check(CLI::IsMember({"greedy", "sample"}));
  eval->add_option("--baseline", baseline, "learned|fixed|random")
      ->check(CLI::IsMember({"learned", "fixed", "random"}));
  eval->add_option("--params", params_text, "fixed parameters U_CA,Z_CE,W_CE,Z_PE,W_PE");
  eval->add_option("--out", out_dir, "output directory")->required();
  eval->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "bucketed scenario sweep");
  std::string axis = "ue_distribution_std", buckets_text, speed_text, dist_text;
  int per_bucket = 20, max_attempts = 400;
  sweep->add_option("--config", config_path, "JSON config")->check(CLI::ExistingFile);
  sweep->add_option("--axis", axis, "ue_distribution_std|avg_speed|intra_freq_ratio")
      ->check(CLI::IsMember({"ue_distribution_std", "avg_speed", "intra_freq_ratio"}));
  sweep->add_option("--buckets", buckets_text, "lo:hi,lo:hi,...")->required();
  sweep->add_option("--episodes", per_bucket, "episodes per bucket")->check(CLI::PositiveNumber);
  sweep->add_option("--max-attempts", max_attempts, "draws per accepted episode");
  sweep->add_option("--speed", speed_text, "speed window lo:hi in m/s");
  sweep->add_option("--dist", dist_text, "UE distribution std window lo:hi");
  sweep->add_option("--baseline", baseline, "learned|fixed|random")
      ->check(CLI::IsMember({"learned", "fixed", "random"}));
  sweep->add_option("--checkpoint", checkpoint, "trained checkpoint")->check(CLI::ExistingFile);
  sweep->add_option("--mode", mode, "greedy|sample")->check(CLI::IsMember({"greedy", "sample"}));
  sweep->add_option("--seed", seed, "sweep seed");
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);

  auto* bound = app.add_subcommand("verify-bound", "check the consensus error bound");
  int steps = 10000;
  double zeta = 1.0;
  std::string source = "synthetic";
  bound->add_option("--config", config_path, "JSON config")->check(CLI::ExistingFile);
  bound->add_option("--steps", steps, "slots")->check(CLI::PositiveNumber);
  bound->add_option("--seed", seed, "seed");
  bound->add_option("--source", source, "synthetic|simulated")
      ->check(CLI::IsMember({"synthetic", "simulated"}));
  bound->add_option("--zeta", zeta, "bound on |L| and |dL| for synthetic loads");
  bound->add_option("--out", out_dir, "optional directory for the error trace");

  auto* exp = app.add_subcommand("export", "export logs of a run directory");
  std::string run_dir, what = "events", format = "csv", out_file;
  exp->add_option("--run", run_dir, "run directory")->required()->check(CLI::ExistingDirectory);
  exp->add_option("--what", what, "events|loads|rates|reports")
      ->check(CLI::IsMember({"events", "loads", "rates", "reports"}));
  exp->add_option("--format", format, "csv|json");
  exp->add_option("--out", out_file, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) {
      const RunConfig config = ReadConfig(config_path);
      TrainRunOptions opt;
      opt.episodes = episodes;
      opt.seed = seed;
      opt.out = out_dir;
      opt.parallel = parallel;
      if (!resume.empty()) opt.resume = resume;
      opt.on_episode = [](const TrainingRow& r) {
        std::ostringstream os;
        os << "episode " << r.episode << " objective " << r.objective << " reward "
           << r.mean_reward << " clip " << r.clip_fraction << " handovers " << r.handovers;
        Log(Level::kInfo, os.str());
      };
      const TrainState s = TrainRun(config, opt);
      Log(Level::kInfo, "trained to episode " + std::to_string(s.episodes_done) +
                            "; outputs in " + out_dir);
      return kExitOk;
    }
    if (*eval) {
      const RunConfig config = ReadConfig(config_path);
      EvalOptions opt;
      opt.baseline = BaselineFromString(baseline);
      opt.greedy = mode == "greedy";
      if (!params_text.empty()) opt.fixed_params = ParseParams(params_text);
      opt.episodes = eval_episodes;
      opt.seed = seed;
      opt.parallel = parallel;
      std::optional<std::filesystem::path> ckpt;
      if (!checkpoint.empty()) ckpt = checkpoint;
      const auto records = EvalRun(config, ckpt, opt, out_dir);
      std::vector<double> obj, ho;
      for (const auto& r : records) {
        obj.push_back(r.report.episode_objective);
        ho.push_back(r.report.total_handover_count);
      }
      PrintSummary("episode_objective", Summarize(obj));
      PrintSummary("handovers", Summarize(ho));
      return kExitOk;
    }
    if (*sweep) {
      const RunConfig config = ReadConfig(config_path);
      SweepOptions opt;
      opt.axis = SweepAxisFromString(axis);
      opt.buckets = ParseBuckets(buckets_text);
      opt.episodes_per_bucket = per_bucket;
      opt.max_attempts = max_attempts;
      if (!speed_text.empty()) opt.speed_window = ParseBuckets(speed_text).front();
      if (!dist_text.empty()) opt.distribution_window = ParseBuckets(dist_text).front();
      opt.eval.baseline = BaselineFromString(baseline == "learned" && checkpoint.empty()
                                                 ? "fixed" : baseline);
      opt.eval.greedy = mode == "greedy";
      opt.eval.seed = seed;
      opt.eval.parallel = parallel;
      std::optional<TrainState> state;
      if (opt.eval.baseline == Baseline::kLearned) {
        state = StateFromCheckpoint(config, LoadCheckpoint(checkpoint));
      }
      const auto buckets = Sweep(config, state ? &state->agents : nullptr, opt);
      std::ostringstream csv;
      csv << "lo,hi,sampled,accepted,axis_mean,objective_mean,objective_std,"
             "load_std_mean,handovers_mean,handovers_std\n";
      for (const auto& b : buckets) {
        csv << FormatDouble(b.lo) << ',' << FormatDouble(b.hi) << ',' << b.sampled << ','
            << b.accepted << ',' << FormatDouble(b.axis_value.mean) << ','
            << FormatDouble(b.objective.mean) << ',' << FormatDouble(b.objective.std)
            << ',' << FormatDouble(b.load_std.mean) << ','
            << FormatDouble(b.handovers.mean) << ',' << FormatDouble(b.handovers.std)
            << "\n";
        if (!b.sampled) {
          Log(Level::kWarn, "bucket [" + FormatDouble(b.lo) + ", " + FormatDouble(b.hi) +
                                "] unsampled after max attempts");
        }
      }
      std::cout << csv.str();
      if (!out_dir.empty()) {
        PrepareOutputDir(out_dir);
        RunFiles files{out_dir};
        WriteTextFile(files.dir / "sweep.csv", csv.str());
        // Per-episode reports, one block per bucket.
        std::ostringstream episodes;
        for (std::size_t i = 0; i < buckets.size(); ++i) {
          std::istringstream rows(ToCsv(FlattenReports(buckets[i].records)));
          std::string line;
          std::getline(rows, line);
          if (i == 0) episodes << "bucket," << line << "\n";
          while (std::getline(rows, line)) episodes << i << ',' << line << "\n";
        }
        WriteTextFile(files.dir / "sweep_episodes.csv", episodes.str());
        WriteTextFile(files.config(), DumpConfig(config));
        WriteManifest(files, config, seed, per_bucket, 0.0,
                      {"config.json", "sweep.csv", "sweep_episodes.csv"}, "sweep");
      }
      return kExitOk;
    }
    if (*bound) {
      const RunConfig config = ReadConfig(config_path);
      BoundRunOptions opt;
      opt.steps = steps;
      opt.seed = seed;
      opt.synthetic = source == "synthetic";
      opt.zeta = zeta;
      std::vector<ConsensusTraceRow> trace;
      const BoundReport r = RunBoundCheck(config, opt, out_dir.empty() ? nullptr : &trace);
      std::printf("lambda %.12g zeta %.12g\n", r.lambda, r.zeta);
      std::printf("max error %.12g <= bound %.12g : %s (worst cell %d, slot %d)\n",
                  r.max_error, r.bound, r.holds_uniform ? "yes" : "NO", r.worst_cell,
                  r.worst_slot);
      std::printf("trailing max error %.12g <= %.12g : %s\n", r.max_error_trailing,
                  r.asymptotic_bound, r.holds_asymptotic ? "yes" : "NO");
      if (!out_dir.empty()) {
        PrepareOutputDir(out_dir);
        std::ostringstream csv;
        csv << "slot,cell,estimate,average,error\n";
        for (const auto& t : trace) {
          csv << t.slot << ',' << t.cell << ',' << FormatDouble(t.estimate) << ','
              << FormatDouble(t.average) << ',' << FormatDouble(t.error) << "\n";
        }
        WriteTextFile(std::filesystem::path(out_dir) / "bound_trace.csv", csv.str());
      }
      return r.holds ? kExitOk : kExitViolation;
    }
    if (*exp) {
      if (format != "csv" && format != "json") {
        throw ConfigError("unknown format '" + format + "' (csv|json)");
      }
      RunFiles files{run_dir};
      if (!std::filesystem::exists(files.manifest())) {
        throw ConfigError(run_dir + " has no manifest.json");
      }
      std::vector<EpisodeRecord> records;
      if (std::filesystem::exists(files.episodes())) {
        records = EpisodesFromJson(ReadTextFile(files.episodes()));
      }
      const bool csv = format == "csv";
      std::string text;
      if (what == "events") {
        const auto rows = FlattenEvents(records);
        text = csv ? ToCsv(rows) : ToJson(rows);
      } else if (what == "loads") {
        const auto rows = FlattenLoads(records);
        text = csv ? ToCsv(rows) : ToJson(rows);
      } else if (what == "rates") {
        const auto rows = FlattenRates(records);
        text = csv ? ToCsv(rows) : ToJson(rows);
      } else {
        const auto rows = FlattenReports(records);
        text = csv ? ToCsv(rows) : ToJson(rows);
      }
      if (out_file.empty()) {
        std::cout << text;
      } else {
        WriteTextFile(out_file, text);
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    Log(Level::kError, e.what());
    return kExitUsage;
  } catch (const CheckpointError& e) {
    Log(Level::kError, e.what());
    return kExitUsage;
  } catch (const GraphError& e) {
    Log(Level::kError, e.what());
    return kExitUsage;
  } catch (const AssumptionViolation& e) {
    Log(Level::kError, e.what());
    return kExitViolation;
  } catch (const std::exception& e) {
    Log(Level::kError, e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
