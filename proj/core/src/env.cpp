#include "hexcell/env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hexcell {

namespace {

int GridsPerSide(double map_size, double grid_length) {
  return std::max(1, static_cast<int>(std::lround(map_size / grid_length)));
}

int DecodeThreshold(int index) { return kThresholdMax - index; }

void CheckIndex(int index, int agent, const char* head) {
  if (index < 0 || index >= kActionsPerHead) {
    std::ostringstream os;
    os << "action index " << index << " for " << head << " of agent " << agent
       << " outside [0, " << kActionsPerHead - 1 << "]";
    throw ActionError(os.str(), agent);
  }
}

constexpr const char* kHeadNames[kNumHeads] = {"U_CA", "Z_CE", "Z_PE", "W_CE",
                                               "W_PE"};

HandoverParams DecodeChecked(const ActionVector& a, int agent) {
  for (int i = 0; i < kNumHeads; ++i) CheckIndex(a[i], agent, kHeadNames[i]);
  HandoverParams p;
  p.u_ca = a[0];
  p.z_ce = DecodeThreshold(a[1]);
  p.z_pe = DecodeThreshold(a[2]);
  p.w_ce = DecodeThreshold(a[3]);
  p.w_pe = DecodeThreshold(a[4]);
  return p;
}

}  // namespace

void ValidateEnvConfig(const EnvConfig& c) {
  ValidateScenario(c.scenario);
  ValidateRadio(c.radio);
  if (c.timing.h1 < 1 || c.timing.h2 < 1) {
    throw ConfigError("handover timing: H1 and H2 must be >= 1");
  }
  if (c.timing.retune_slots < 0) {
    throw ConfigError("handover timing: retune_slots must be >= 0");
  }
  const auto& o = c.observation;
  if (!(o.grid_length_m > 0.0) || o.grid_length_m > c.scenario.map_size_m) {
    throw ConfigError("observation: grid_length must be in (0, map_size]");
  }
  if (o.kappa < 0) throw ConfigError("observation: kappa must be >= 0");
  if (o.eta < 1) throw ConfigError("observation: eta must be >= 1");
  if (!(c.chi_m > 0.0)) throw ConfigError("chi must be positive");
  if (c.action_period < 1) throw ConfigError("action_period must be >= 1");
  if (c.scenario.num_cells() < 2) {
    throw ConfigError("at least two cells are needed for consensus");
  }
}

HandoverParams DecodeAction(const ActionVector& action) {
  return DecodeChecked(action, -1);
}

ActionVector EncodeParams(const HandoverParams& p) {
  const auto errors = ValidateParams(p);
  if (!errors.empty()) throw std::out_of_range(errors.front());
  return {p.u_ca, kThresholdMax - p.z_ce, kThresholdMax - p.z_pe,
          kThresholdMax - p.w_ce, kThresholdMax - p.w_pe};
}

ActionVector MidRangeAction() { return EncodeParams(HandoverParams{}); }

Observation BuildObservation(int cell, const CellLayout& layout,
                             const ObservationConfig& config,
                             std::span<const GridSnapshot> window) {
  const int side = config.side();
  Observation obs(config.eta, side);
  const int per_side = GridsPerSide(layout.map_size_m, config.grid_length_m);
  const Vec2 c = layout.cells.at(cell).center;
  const int cx = GridIndex(c.x, config.grid_length_m, per_side);
  const int cy = GridIndex(c.y, config.grid_length_m, per_side);
  const int available = std::min<int>(config.eta, static_cast<int>(window.size()));
  const int pad = config.eta - available;
  for (int i = 0; i < available; ++i) {
    const GridSnapshot& s = window[window.size() - available + i];
    const int w = pad + i;
    for (std::size_t k = 0; k < s.grid_x.size(); ++k) {
      const int col = s.grid_x[k] - cx + config.kappa;
      const int row = s.grid_y[k] - cy + config.kappa;
      if (col < 0 || col >= side || row < 0 || row >= side) continue;
      ++obs.ued(w, row, col);
      if (s.serving[k] == cell) ++obs.csm(w, row, col);
    }
  }
  return obs;
}

double LoadStd(std::span<const double> loads) {
  if (loads.empty()) return 0.0;
  const double mean = ExactAverage(loads);
  double acc = 0.0;
  for (double l : loads) acc += (l - mean) * (l - mean);
  return std::sqrt(acc / static_cast<double>(loads.size()));
}

double EpisodeObjective(std::span<const double> gammas) {
  double s = 0.0;
  for (double g : gammas) s += g;
  return s;
}

double CellLoad(std::span<const double> request_bytes,
                std::span<const double> rates_bps, double slot_length) {
  if (request_bytes.size() != rates_bps.size()) {
    throw InternalError("CellLoad: size mismatch");
  }
  if (request_bytes.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < rates_bps.size(); ++i) {
    if (!(rates_bps[i] > 0.0)) throw InternalError("CellLoad: non-positive rate");
    acc += request_bytes[i] * 8.0 / rates_bps[i];
  }
  return acc * slot_length / static_cast<double>(rates_bps.size());
}

Environment::Environment(EnvConfig config) : config_(std::move(config)) {
  ValidateEnvConfig(config_);
  layout_ = BuildLayout(config_.scenario);
  neighbors_ = BuildMeasurementNeighbors(layout_, config_.observation.grid_length_m,
                                         config_.observation.kappa);
  graph_ = BuildGraph(layout_, config_.chi_m, config_.lazy_consensus);
}

std::vector<Observation> Environment::Reset(uint64_t episode_seed) {
  return Reset(episode_seed,
               GenerateTrajectories(config_.scenario, episode_seed));
}

std::vector<Observation> Environment::Reset(uint64_t episode_seed,
                                            const MobilityDraw& draw) {
  return Reset(episode_seed,
               GenerateTrajectories(config_.scenario, draw, episode_seed));
}

std::vector<Observation> Environment::Reset(
    uint64_t episode_seed, std::vector<UeTrajectory> trajectories) {
  ResetCommon(episode_seed, std::move(trajectories));
  return CurrentObservations();
}

void Environment::ResetCommon(uint64_t episode_seed,
                              std::vector<UeTrajectory> trajectories) {
  const int T = config_.scenario.num_slots;
  for (const auto& tr : trajectories) {
    if (static_cast<int>(tr.positions.size()) < T) {
      throw ConfigError("trajectory shorter than the episode");
    }
  }
  if (config_.rerandomize_frequencies) {
    Rng rng(DeriveSeed(episode_seed, {kFrequencyStream}));
    const auto plan = RandomFrequencyPlan(config_.scenario.num_cells(), rng);
    layout_ = BuildLayout(config_.scenario, plan);
  }
  trajectories_ = std::move(trajectories);
  requests_.resize(trajectories_.size());
  for (std::size_t k = 0; k < trajectories_.size(); ++k) {
    requests_[k] = trajectories_[k].request_bytes;
  }
  fading_seed_ = DeriveSeed(episode_seed, {kFadingStream});
  aborted_ = false;
  slot_ = 1;
  params_.assign(num_cells(), HandoverParams{});
  window_.clear();
  log_ = EpisodeLog{};
  log_.request_bytes = requests_;
  log_.slot_length = config_.scenario.slot_length;
  log_.num_cells = num_cells();
  log_.num_ues = num_ues();
  log_.average_ue_speed = AverageUeSpeed(trajectories_, config_.scenario.slot_length);
  const double ratio = config_.scenario.map_size_m / config_.observation.grid_length_m;
  if (std::abs(ratio - std::round(ratio)) < 1e-9) {
    log_.ue_distribution_std =
        UeDistributionStd(trajectories_, config_.observation.grid_length_m,
                          config_.scenario.map_size_m, T);
  }

  const auto pos = PositionsAt(1);
  links_ = ComputeLinks(layout_, pos, config_.radio, fading_seed_, 1);
  serving_ = InitialAssociation(links_);
  states_.clear();
  states_.reserve(serving_.size());
  for (int s : serving_) states_.emplace_back(num_cells(), s);

  // Slot-1 loads and consensus initialisation.
  const int M = num_cells();
  std::vector<std::vector<double>> d(M), r(M);
  std::vector<int> count(M, 0);
  for (int s : serving_) ++count[s];
  std::vector<double> rates(serving_.size());
  for (std::size_t k = 0; k < serving_.size(); ++k) {
    const int m = serving_[k];
    rates[k] = Rate(true, layout_.cells[m].bandwidth_hz,
                    links_.sinr_at(m, static_cast<int>(k)), count[m]);
    d[m].push_back(requests_[k]);
    r[m].push_back(rates[k]);
  }
  loads_.assign(M, 0.0);
  for (int m = 0; m < M; ++m) {
    loads_[m] = CellLoad(d[m], r[m], config_.scenario.slot_length);
  }
  consensus_ = InitConsensus(loads_);
  window_.push_back(Snapshot(pos));
}

std::vector<Vec2> Environment::PositionsAt(int t) const {
  std::vector<Vec2> out(trajectories_.size());
  for (std::size_t k = 0; k < trajectories_.size(); ++k) {
    out[k] = trajectories_[k].positions[t - 1];
  }
  return out;
}

GridSnapshot Environment::Snapshot(std::span<const Vec2> positions) const {
  const double nu = config_.observation.grid_length_m;
  const int per_side = GridsPerSide(layout_.map_size_m, nu);
  GridSnapshot s;
  s.grid_x.resize(positions.size());
  s.grid_y.resize(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    s.grid_x[k] = GridIndex(positions[k].x, nu, per_side);
    s.grid_y[k] = GridIndex(positions[k].y, nu, per_side);
  }
  s.serving = serving_;
  return s;
}

std::vector<Observation> Environment::CurrentObservations() const {
  std::vector<GridSnapshot> window(window_.begin(), window_.end());
  std::vector<Observation> out;
  out.reserve(num_cells());
  for (int m = 0; m < num_cells(); ++m) {
    out.push_back(BuildObservation(m, layout_, config_.observation, window));
  }
  return out;
}

StepResult Environment::Step(std::span<const ActionVector> actions) {
  if (trajectories_.empty() && slot_ == 0) {
    throw std::logic_error("Step called before Reset");
  }
  if (aborted_) throw std::logic_error("Step called on an aborted episode");
  if (slot_ > config_.scenario.num_slots) {
    throw std::logic_error("Step called after the episode ended");
  }
  const int M = num_cells();
  const int K = num_ues();
  if (static_cast<int>(actions.size()) != M) {
    throw std::invalid_argument("Step: expected one action per cell");
  }
  const int t = slot_;

  // (1) parameters
  if (IsDecisionSlot(t)) {
    std::vector<HandoverParams> next(M);
    try {
      for (int m = 0; m < M; ++m) next[m] = DecodeChecked(actions[m], m);
    } catch (const ActionError&) {
      aborted_ = true;
      throw;
    }
    params_ = std::move(next);
  }

  // (2) positions; (3) radio. Slot 1 links come from Reset.
  const auto pos = PositionsAt(t);
  if (t > 1) links_ = ComputeLinks(layout_, pos, config_.radio, fading_seed_, t);

  // (4) measurements against the serving cell's parameters
  std::vector<double> row;
  for (int k = 0; k < K; ++k) {
    MeasurementState& s = states_[k];
    if (s.pending) continue;
    StepMeasurements(s, links_.RsrpRowOfUe(k, row), params_[s.serving],
                     config_.timing, layout_, neighbors_, t);
  }

  // (5) execute reports from earlier slots
  for (int k = 0; k < K; ++k) {
    if (auto ev = ExecutePending(states_[k], serving_, k, t, M)) {
      log_.events.push_back(*ev);
    }
  }

  // (6) loads, consensus, rewards
  std::vector<int> count(M, 0);
  for (int s : serving_) ++count[s];
  std::vector<std::vector<double>> d(M), r(M);
  std::vector<double> rates(K);
  for (int k = 0; k < K; ++k) {
    const int m = serving_[k];
    rates[k] = Rate(true, layout_.cells[m].bandwidth_hz, links_.sinr_at(m, k),
                    count[m]);
    d[m].push_back(requests_[k]);
    r[m].push_back(rates[k]);
  }
  for (int m = 0; m < M; ++m) {
    loads_[m] = CellLoad(d[m], r[m], config_.scenario.slot_length);
  }
  if (t == 1) {
    consensus_ = InitConsensus(loads_);
  } else {
    ConsensusStep(consensus_, loads_, *graph_);
  }
  const double avg = ExactAverage(loads_);
  SlotRecord rec;
  rec.slot = t;
  rec.load = loads_;
  rec.estimate = consensus_.estimate;
  rec.reward.resize(M);
  rec.exact_reward.resize(M);
  for (int m = 0; m < M; ++m) {
    rec.exact_reward[m] = -std::abs(loads_[m] - avg);
    rec.reward[m] = config_.exact_average_reward
                        ? rec.exact_reward[m]
                        : -std::abs(loads_[m] - consensus_.estimate[m]);
  }
  rec.gamma = LoadStd(loads_);
  rec.serving = serving_;
  rec.rate_bps = rates;
  rec.params = params_;

  // (7) observations
  if (t > 1) window_.push_back(Snapshot(pos));
  else window_.back() = Snapshot(pos);
  while (static_cast<int>(window_.size()) > config_.observation.eta) {
    window_.pop_front();
  }

  StepResult out;
  out.rewards = rec.reward;
  log_.slots.push_back(std::move(rec));
  out.observations = CurrentObservations();
  // (8)
  out.done = (t == config_.scenario.num_slots);
  ++slot_;
  return out;
}

}  // namespace hexcell
