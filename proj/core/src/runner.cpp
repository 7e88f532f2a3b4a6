#include "hexcell/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace hexcell {

using nlohmann::json;

void ParallelFor(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  threads = std::clamp(threads, 1, n);
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    const int lo = static_cast<int>(static_cast<int64_t>(n) * w / threads);
    const int hi = static_cast<int>(static_cast<int64_t>(n) * (w + 1) / threads);
    pool.emplace_back([&, lo, hi] {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

uint64_t TrainEpisodeSeed(uint64_t run_seed, int64_t episode) {
  return DeriveSeed(run_seed, {kEpisodeStream, static_cast<uint64_t>(episode)});
}

uint64_t EvalEpisodeSeed(uint64_t run_seed, int64_t episode) {
  return DeriveSeed(run_seed, {kEvalStream, static_cast<uint64_t>(episode)});
}

std::string TrainingCsvHeader() {
  return "episode,objective,mean_reward,clip_fraction,mean_ratio,policy_loss,"
         "value_loss,entropy,handovers\n";
}

std::string TrainingCsvRow(const TrainingRow& r) {
  std::ostringstream os;
  os << r.episode << ',' << FormatDouble(r.objective) << ','
     << FormatDouble(r.mean_reward) << ',' << FormatDouble(r.clip_fraction) << ','
     << FormatDouble(r.mean_ratio) << ',' << FormatDouble(r.policy_loss) << ','
     << FormatDouble(r.value_loss) << ',' << FormatDouble(r.entropy) << ','
     << r.handovers << "\n";
  return os.str();
}

TrainState InitialTrainState(const RunConfig& config, uint64_t seed) {
  TrainState s;
  const NetShape ps = PolicyShape(config.env.observation, config.ppo);
  const NetShape vs = ValueShape(config.env.observation, config.ppo);
  // Every agent starts from the same theta0 / phi0.
  const Agent prototype(ps, vs, config.ppo, seed);
  s.agents.assign(config.env.scenario.num_cells(), prototype);
  return s;
}

TrainState StateFromCheckpoint(const RunConfig& config, const Checkpoint& ckpt) {
  CheckCompatible(ckpt, config.env.scenario.num_cells(),
                  PolicyShape(config.env.observation, config.ppo),
                  ValueShape(config.env.observation, config.ppo));
  TrainState s;
  s.episodes_done = ckpt.episodes;
  for (const auto& blob : ckpt.agents) s.agents.push_back(Restore(blob, config.ppo));
  return s;
}

Checkpoint StateToCheckpoint(const RunConfig& config, const TrainState& state) {
  Checkpoint c;
  c.config_hash = ConfigHash(config);
  c.episodes = state.episodes_done;
  for (const auto& a : state.agents) c.agents.push_back(Snapshot(a));
  return c;
}

namespace {

double MeanReward(const EpisodeLog& log) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& slot : log.slots) {
    for (double r : slot.reward) s += r;
    n += slot.reward.size();
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

double Objective(const EpisodeLog& log) {
  std::vector<double> g;
  g.reserve(log.slots.size());
  for (const auto& s : log.slots) g.push_back(s.gamma);
  return EpisodeObjective(g);
}

ActionVector RandomAction(Rng& rng) {
  ActionVector a{};
  for (int& v : a) v = static_cast<int>(rng.UniformInt(kActionsPerHead));
  return a;
}

}  // namespace

void TrainEpisodes(const RunConfig& config, uint64_t seed, int episodes,
                   TrainState& state, int parallel,
                   const std::function<void(const TrainingRow&)>& on_episode) {
  const int M = config.env.scenario.num_cells();
  if (static_cast<int>(state.agents.size()) != M) {
    throw std::invalid_argument("TrainEpisodes: agent count does not match the config");
  }
  Environment env(config.env);
  for (int i = 0; i < episodes; ++i) {
    const int64_t e = state.episodes_done;
    const uint64_t ep_seed = TrainEpisodeSeed(seed, e);
    std::vector<Observation> obs = env.Reset(ep_seed);
    std::vector<Rng> action_rng;
    for (int m = 0; m < M; ++m) action_rng.emplace_back(DeriveSeed(ep_seed, {kActionStream, uint64_t(m)}));
    std::vector<std::vector<Transition>> traj(M);
    std::vector<ActionVector> actions(M);
    for (int t = 1; t <= config.env.scenario.num_slots; ++t) {
      if (env.IsDecisionSlot(t)) {
        ParallelFor(M, parallel, [&](int m) {
          Transition tr;
          tr.input = ObservationToInput(obs[m]);
          const ActResult r = state.agents[m].Act(tr.input, action_rng[m], false);
          tr.action = r.action;
          tr.logp = r.logp;
          tr.value = r.value;
          actions[m] = r.action;
          traj[m].push_back(std::move(tr));
        });
      }
      StepResult step = env.Step(actions);
      for (int m = 0; m < M; ++m) traj[m].back().reward += step.rewards[m];
      obs = std::move(step.observations);
    }

    std::vector<UpdateStats> stats(M);
    ParallelFor(M, parallel, [&](int m) {
      Rng shuffle(DeriveSeed(ep_seed, {kShuffleStream, uint64_t(m)}));
      stats[m] = state.agents[m].Update(traj[m], shuffle);
    });

    TrainingRow row;
    row.episode = e;
    row.objective = Objective(env.log());
    row.mean_reward = MeanReward(env.log());
    row.handovers = static_cast<int>(env.log().events.size());
    for (const auto& s : stats) {
      row.clip_fraction += s.clip_fraction / M;
      row.mean_ratio += s.mean_ratio / M;
      row.policy_loss += s.policy_loss / M;
      row.value_loss += s.value_loss / M;
      row.entropy += s.entropy / M;
    }
    ++state.episodes_done;
    if (on_episode) on_episode(row);
  }
}

const char* ToString(Baseline b) {
  switch (b) {
    case Baseline::kLearned:
      return "learned";
    case Baseline::kFixed:
      return "fixed";
    case Baseline::kRandom:
      return "random";
  }
  return "?";
}

Baseline BaselineFromString(const std::string& s) {
  if (s == "learned") return Baseline::kLearned;
  if (s == "fixed") return Baseline::kFixed;
  if (s == "random") return Baseline::kRandom;
  throw ConfigError("unknown baseline '" + s + "' (learned|fixed|random)");
}

namespace {

EpisodeRecord RunEpisodeImpl(Environment& env, const RunConfig& config,
                             const std::vector<Agent>* agents,
                             const EvalOptions& opt, int64_t episode,
                             uint64_t ep_seed,
                             std::optional<std::vector<UeTrajectory>> trajectories) {
  const int M = env.num_cells();
  if (opt.baseline == Baseline::kLearned &&
      (!agents || static_cast<int>(agents->size()) != M)) {
    throw std::invalid_argument("learned baseline needs one agent per cell");
  }
  std::vector<Observation> obs =
      trajectories ? env.Reset(ep_seed, std::move(*trajectories)) : env.Reset(ep_seed);
  std::vector<Rng> rng;
  for (int m = 0; m < M; ++m) rng.emplace_back(DeriveSeed(ep_seed, {kActionStream, uint64_t(m)}));
  const ActionVector fixed = EncodeParams(opt.fixed_params);
  std::vector<ActionVector> actions(M, fixed);
  for (int t = 1; t <= config.env.scenario.num_slots; ++t) {
    if (env.IsDecisionSlot(t)) {
      for (int m = 0; m < M; ++m) {
        switch (opt.baseline) {
          case Baseline::kLearned:
            actions[m] = (*agents)[m].Act(obs[m], rng[m], opt.greedy).action;
            break;
          case Baseline::kFixed:
            actions[m] = fixed;
            break;
          case Baseline::kRandom:
            actions[m] = RandomAction(rng[m]);
            break;
        }
      }
    }
    obs = env.Step(actions).observations;
  }
  EpisodeRecord rec;
  rec.episode = episode;
  rec.seed = ep_seed;
  rec.log = env.log();
  rec.report = ComputeReport(rec.log, env.layout(), *env.graph(), config.metrics);
  return rec;
}

}  // namespace

EpisodeRecord RunEpisode(Environment& env, const RunConfig& config,
                         const std::vector<Agent>* agents, const EvalOptions& opt,
                         int64_t episode, uint64_t ep_seed,
                         std::optional<MobilityDraw> draw) {
  std::optional<std::vector<UeTrajectory>> tr;
  if (draw) tr = GenerateTrajectories(config.env.scenario, *draw, ep_seed);
  return RunEpisodeImpl(env, config, agents, opt, episode, ep_seed, std::move(tr));
}

std::vector<EpisodeRecord> Evaluate(const RunConfig& config,
                                    const std::vector<Agent>* agents,
                                    const EvalOptions& opt) {
  std::vector<EpisodeRecord> out(std::max(0, opt.episodes));
  ParallelFor(opt.episodes, opt.parallel, [&](int e) {
    Environment env(config.env);
    out[e] = RunEpisode(env, config, agents, opt, e, EvalEpisodeSeed(opt.seed, e));
  });
  return out;
}

Summary Summarize(const std::vector<double>& v) {
  Summary s;
  s.n = static_cast<int>(v.size());
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / s.n;
  double acc = 0.0;
  for (double x : v) acc += (x - s.mean) * (x - s.mean);
  s.std = s.n > 1 ? std::sqrt(acc / (s.n - 1)) : 0.0;
  const double half = 1.959963984540054 * s.std / std::sqrt(static_cast<double>(s.n));
  s.ci_lo = s.mean - half;
  s.ci_hi = s.mean + half;
  return s;
}

const char* ToString(SweepAxis a) {
  switch (a) {
    case SweepAxis::kUeDistributionStd:
      return "ue_distribution_std";
    case SweepAxis::kAverageSpeed:
      return "avg_speed";
    case SweepAxis::kIntraFreqRatio:
      return "intra_freq_ratio";
  }
  return "?";
}

SweepAxis SweepAxisFromString(const std::string& s) {
  if (s == "ue_distribution_std") return SweepAxis::kUeDistributionStd;
  if (s == "avg_speed") return SweepAxis::kAverageSpeed;
  if (s == "intra_freq_ratio") return SweepAxis::kIntraFreqRatio;
  throw ConfigError("unknown sweep axis '" + s + "'");
}

namespace {

// Smallest iota whose trajectories reach the target average speed; the
// mean-reverting drift grows with iota, so speed is increasing in it.
double IotaForSpeed(const ScenarioConfig& sc, MobilityDraw draw, uint64_t seed,
                    double target) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 30; ++i) {
    draw.iota = 0.5 * (lo + hi);
    const auto tr = GenerateTrajectories(sc, draw, seed);
    if (AverageUeSpeed(tr, sc.slot_length) < target) {
      lo = draw.iota;
    } else {
      hi = draw.iota;
    }
  }
  return 0.5 * (lo + hi);
}

struct Candidate {
  RunConfig config;
  std::vector<UeTrajectory> trajectories;
  double axis_value = 0.0;
};

}  // namespace

std::vector<SweepBucket> Sweep(const RunConfig& base, const std::vector<Agent>* agents,
                               const SweepOptions& opt) {
  std::vector<SweepBucket> out;
  for (auto [lo, hi] : opt.buckets) {
    if (!(lo <= hi)) throw ConfigError("sweep bucket with lo > hi");
    SweepBucket b;
    b.lo = lo;
    b.hi = hi;
    out.push_back(b);
  }
  const auto& sc = base.env.scenario;
  const double nu = base.env.observation.grid_length_m;

  ParallelFor(static_cast<int>(out.size()), opt.eval.parallel, [&](int bi) {
    SweepBucket& b = out[bi];
    Rng rng(DeriveSeed(opt.eval.seed, {kSweepStream, uint64_t(bi)}));
    std::vector<Candidate> accepted;
    const int budget = opt.max_attempts * opt.episodes_per_bucket;
    for (int attempt = 0; attempt < budget &&
                          static_cast<int>(accepted.size()) < opt.episodes_per_bucket;
         ++attempt) {
      const uint64_t tseed = DeriveSeed(opt.eval.seed, {kSweepStream, uint64_t(bi), uint64_t(attempt)});
      Candidate c;
      c.config = base;
      MobilityDraw draw = DrawMobility(sc.ou_params, rng);
      if (opt.axis == SweepAxis::kIntraFreqRatio) {
        Rng frng(DeriveSeed(tseed, {kFrequencyStream}));
        c.config.env.scenario.frequency_plan = RandomFrequencyPlan(sc.num_cells(), frng);
      }
      if (opt.axis == SweepAxis::kAverageSpeed) {
        draw.iota = IotaForSpeed(sc, draw, tseed, rng.Uniform(b.lo, b.hi));
      } else if (opt.speed_window) {
        const auto [slo, shi] = *opt.speed_window;
        draw.iota = IotaForSpeed(sc, draw, tseed, rng.Uniform(slo, shi));
      }
      c.trajectories = GenerateTrajectories(sc, draw, tseed);
      const double speed = AverageUeSpeed(c.trajectories, sc.slot_length);
      if (opt.speed_window &&
          (speed < opt.speed_window->first || speed > opt.speed_window->second)) {
        continue;
      }
      const double dist = UeDistributionStd(c.trajectories, nu, sc.map_size_m, sc.num_slots);
      if (opt.distribution_window &&
          (dist < opt.distribution_window->first || dist > opt.distribution_window->second)) {
        continue;
      }
      switch (opt.axis) {
        case SweepAxis::kUeDistributionStd:
          c.axis_value = dist;
          break;
        case SweepAxis::kAverageSpeed:
          c.axis_value = speed;
          break;
        case SweepAxis::kIntraFreqRatio: {
          const CellLayout layout = BuildLayout(c.config.env.scenario);
          const NeighborGraph g = BuildGraph(layout, base.env.chi_m, base.env.lazy_consensus);
          c.axis_value = IntraFreqNeighborRatio(layout, g);
          break;
        }
      }
      if (c.axis_value < b.lo || c.axis_value > b.hi) continue;
      accepted.push_back(std::move(c));
    }
    b.accepted = static_cast<int>(accepted.size());
    b.sampled = b.accepted > 0;
    std::vector<double> obj, ls, ho, ax;
    for (std::size_t i = 0; i < accepted.size(); ++i) {
      Environment env(accepted[i].config.env);
      const uint64_t ep_seed = DeriveSeed(opt.eval.seed, {kEvalStream, uint64_t(bi), uint64_t(i)});
      EvalOptions eo = opt.eval;
      EpisodeRecord rec = RunEpisodeImpl(env, accepted[i].config, agents, eo,
                                         static_cast<int64_t>(i), ep_seed,
                                         std::move(accepted[i].trajectories));
      obj.push_back(rec.report.episode_objective);
      ls.push_back(rec.report.episode_objective / sc.num_slots);
      ho.push_back(rec.report.total_handover_count);
      ax.push_back(accepted[i].axis_value);
      b.records.push_back(std::move(rec));
    }
    b.objective = Summarize(obj);
    b.load_std = Summarize(ls);
    b.handovers = Summarize(ho);
    b.axis_value = Summarize(ax);
  });
  return out;
}

double Spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("Spearman: need two equal-length samples of size >= 2");
  }
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<std::vector<double>> SyntheticLoads(int steps, int nodes, double zeta,
                                                uint64_t seed) {
  Rng rng(DeriveSeed(seed, {kSyntheticLoadStream}));
  std::vector<std::vector<double>> out(steps, std::vector<double>(nodes));
  for (auto& row : out) {
    for (double& v : row) v = rng.Uniform(0.0, zeta);
  }
  return out;
}

BoundReport RunBoundCheck(const RunConfig& config, const BoundRunOptions& opt,
                          std::vector<ConsensusTraceRow>* trace) {
  const CellLayout layout = BuildLayout(config.env.scenario);
  const NeighborGraph g = BuildGraph(layout, config.env.chi_m, config.env.lazy_consensus);
  if (opt.synthetic) {
    return VerifyBound(SyntheticLoads(opt.steps, g.num_nodes, opt.zeta, opt.seed), g,
                       opt.zeta, trace);
  }
  // Loads of consecutive fixed-parameter episodes.
  std::vector<std::vector<double>> loads;
  Environment env(config.env);
  EvalOptions eo;
  eo.baseline = Baseline::kFixed;
  for (int64_t e = 0; static_cast<int>(loads.size()) < opt.steps; ++e) {
    const EpisodeRecord rec =
        RunEpisode(env, config, nullptr, eo, e, EvalEpisodeSeed(opt.seed, e));
    for (const auto& s : rec.log.slots) {
      if (static_cast<int>(loads.size()) >= opt.steps) break;
      loads.push_back(s.load);
    }
  }
  return VerifyBound(loads, g, std::nullopt, trace);
}

void PrepareOutputDir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
  const auto probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw std::runtime_error("output directory is not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("short write to " + path.string());
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteManifest(const RunFiles& files, const RunConfig& config, uint64_t seed,
                   int64_t episodes, double wall_clock_s,
                   const std::vector<std::string>& outputs,
                   const std::string& command) {
  const std::string text = DumpConfig(config);
  json j;
  j["command"] = command;
  j["config"] = json::parse(text);
  j["config_hash"] = GitBlobHash(text);
  j["seed"] = seed;
  j["episodes"] = episodes;
  j["wall_clock_s"] = wall_clock_s;
  j["outputs"] = outputs;
  WriteTextFile(files.manifest(), j.dump(2) + "\n");
}

TrainState TrainRun(const RunConfig& config, const TrainRunOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  RunFiles files{opt.out};
  PrepareOutputDir(files.dir);
  TrainState state;
  const std::string hash = ConfigHash(config);
  if (opt.resume) {
    const Checkpoint ckpt = LoadCheckpoint(*opt.resume);
    if (ckpt.config_hash != hash) {
      throw CheckpointError("checkpoint " + opt.resume->string() +
                            " was written for a different config (hash " +
                            ckpt.config_hash + ", current " + hash + ")");
    }
    state = StateFromCheckpoint(config, ckpt);
  } else {
    state = InitialTrainState(config, opt.seed);
  }
  WriteTextFile(files.config(), DumpConfig(config));

  const bool append = opt.resume && std::filesystem::exists(files.training_csv());
  std::ofstream csv(files.training_csv(), append ? std::ios::app : std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot write " + files.training_csv().string());
  if (!append) csv << TrainingCsvHeader();

  std::vector<std::string> outputs{"config.json", "training.csv", "checkpoint.bin"};
  const int every = config.training.checkpoint_every;
  const auto ckpt_dir = files.dir / "checkpoints";
  auto on_row = [&](const TrainingRow& row) {
    csv << TrainingCsvRow(row);
    csv.flush();
    if (every > 0 && state.episodes_done % every == 0) {
      std::filesystem::create_directories(ckpt_dir);
      char name[64];
      std::snprintf(name, sizeof(name), "episode_%06lld.bin",
                    static_cast<long long>(state.episodes_done));
      SaveCheckpoint(StateToCheckpoint(config, state), ckpt_dir / name);
      outputs.push_back(std::string("checkpoints/") + name);
    }
    if (opt.on_episode) opt.on_episode(row);
  };
  TrainEpisodes(config, opt.seed, opt.episodes, state, opt.parallel, on_row);
  SaveCheckpoint(StateToCheckpoint(config, state), files.checkpoint());
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  WriteManifest(files, config, opt.seed, state.episodes_done, wall, outputs, "train");
  return state;
}

std::vector<EpisodeRecord> EvalRun(const RunConfig& config,
                                   const std::optional<std::filesystem::path>& checkpoint,
                                   const EvalOptions& opt,
                                   const std::filesystem::path& out) {
  const auto start = std::chrono::steady_clock::now();
  RunFiles files{out};
  PrepareOutputDir(files.dir);
  std::optional<TrainState> state;
  if (opt.baseline == Baseline::kLearned) {
    if (!checkpoint) throw ConfigError("the learned baseline needs a checkpoint");
    state = StateFromCheckpoint(config, LoadCheckpoint(*checkpoint));
  }
  const auto records = Evaluate(config, state ? &state->agents : nullptr, opt);
  WriteTextFile(files.config(), DumpConfig(config));
  WriteTextFile(files.episodes(), EpisodesToJson(records));
  WriteTextFile(files.reports_csv(), ToCsv(FlattenReports(records)));

  std::vector<double> obj, ho, pp, tp, low;
  for (const auto& r : records) {
    obj.push_back(r.report.episode_objective);
    ho.push_back(r.report.total_handover_count);
    pp.push_back(r.report.ping_pong_ratio);
    tp.push_back(r.report.system_throughput);
    low.push_back(r.report.low_rate_user_ratio);
  }
  auto sj = [](const Summary& s) {
    return json{{"n", s.n}, {"mean", s.mean}, {"std", s.std},
                {"ci95", json::array({s.ci_lo, s.ci_hi})}};
  };
  json summary = {{"baseline", ToString(opt.baseline)},
                  {"mode", opt.greedy ? "greedy" : "sample"},
                  {"episodes", opt.episodes},
                  {"seed", opt.seed},
                  {"episode_objective", sj(Summarize(obj))},
                  {"total_handover_count", sj(Summarize(ho))},
                  {"ping_pong_ratio", sj(Summarize(pp))},
                  {"system_throughput", sj(Summarize(tp))},
                  {"low_rate_user_ratio", sj(Summarize(low))}};
  WriteTextFile(files.summary(), summary.dump(2) + "\n");
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  WriteManifest(files, config, opt.seed, opt.episodes, wall,
                {"config.json", "episodes.json", "reports.csv", "summary.json"}, "eval");
  return records;
}

}  // namespace hexcell
