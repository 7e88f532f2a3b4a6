#include "hexcell/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hexcell {

void ValidatePpo(const PpoConfig& c) {
  if (c.gamma < 0.0 || c.gamma > 1.0) throw ConfigError("ppo: gamma must be in [0, 1]");
  if (c.xi < 0.0 || c.xi > 1.0) throw ConfigError("ppo: xi must be in [0, 1]");
  if (!(c.clip > 0.0)) throw ConfigError("ppo: clip must be > 0");
  if (c.lr_policy < 0.0 || c.lr_value < 0.0) {
    throw ConfigError("ppo: learning rates must be >= 0");
  }
  if (c.epochs < 1 || c.minibatch < 1) {
    throw ConfigError("ppo: epochs and minibatch must be >= 1");
  }
  if (c.d_model < 2 || c.d_model % 2 != 0 || c.d_key < 1 || c.hidden < 1) {
    throw ConfigError("ppo: bad network sizes (d_model must be even)");
  }
}

double ClipFn(double eps, double a) { return a >= 0.0 ? (1.0 + eps) * a : (1.0 - eps) * a; }

GaeResult Gae(std::span<const double> rewards, std::span<const double> values,
              double gamma, double xi) {
  const std::size_t n = rewards.size();
  if (values.size() != n) throw std::invalid_argument("Gae: size mismatch");
  GaeResult r;
  r.advantages.assign(n, 0.0);
  r.returns.assign(n, 0.0);
  double acc = 0.0;
  double ret = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double next_v = (i + 1 < n) ? values[i + 1] : 0.0;
    const double delta = rewards[i] + gamma * next_v - values[i];
    acc = delta + gamma * xi * acc;
    ret = rewards[i] + gamma * ret;
    r.advantages[i] = acc;
    r.returns[i] = ret;
  }
  return r;
}

double SurrogateObjective(std::span<const double> new_logp,
                          std::span<const double> old_logp,
                          std::span<const double> adv, double eps) {
  if (new_logp.empty()) throw std::invalid_argument("SurrogateObjective: empty batch");
  double s = 0.0;
  for (std::size_t i = 0; i < new_logp.size(); ++i) {
    const double ratio = std::exp(new_logp[i] - old_logp[i]);
    s += std::min(ratio * adv[i], ClipFn(eps, adv[i]));
  }
  return s / static_cast<double>(new_logp.size());
}

double ValueLoss(std::span<const double> values, std::span<const double> returns) {
  if (values.empty()) throw std::invalid_argument("ValueLoss: empty batch");
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - returns[i];
    s += d * d;
  }
  return 0.5 * s / static_cast<double>(values.size());
}

HeadDistributions HeadDistributions::FromLogits(const RowVec& logits) {
  if (logits.size() != kNumHeads * kActionsPerHead) {
    throw std::invalid_argument("HeadDistributions: expected 5 x 97 logits");
  }
  HeadDistributions d;
  for (int h = 0; h < kNumHeads; ++h) {
    Eigen::VectorXd z = logits.segment(h * kActionsPerHead, kActionsPerHead).transpose();
    const double mx = z.maxCoeff();
    const double lse = mx + std::log((z.array() - mx).exp().sum());
    d.log_probs[h] = z.array() - lse;
    d.probs[h] = d.log_probs[h].array().exp();
  }
  return d;
}

double HeadDistributions::LogProb(const ActionVector& a) const {
  double s = 0.0;
  for (int h = 0; h < kNumHeads; ++h) s += log_probs[h](a[h]);
  return s;
}

double HeadDistributions::Entropy() const {
  double s = 0.0;
  for (int h = 0; h < kNumHeads; ++h) s -= (probs[h].array() * log_probs[h].array()).sum();
  return s;
}

ActionVector SampleAction(const HeadDistributions& d, Rng& rng, bool greedy,
                          double* logp) {
  ActionVector a{};
  for (int h = 0; h < kNumHeads; ++h) {
    if (greedy) {
      Eigen::Index best = 0;
      d.probs[h].maxCoeff(&best);
      a[h] = static_cast<int>(best);
    } else {
      a[h] = static_cast<int>(rng.Categorical(
          std::span<const double>(d.probs[h].data(), d.probs[h].size())));
    }
  }
  if (logp) *logp = d.LogProb(a);
  return a;
}

Mat ObservationToInput(const Observation& obs) {
  Mat x(obs.tokens(), obs.channels());
  for (int t = 0; t < obs.tokens(); ++t) {
    for (int c = 0; c < obs.channels(); ++c) {
      x(t, c) = std::log1p(static_cast<double>(obs.at(t, c)));
    }
  }
  return x;
}

NetShape PolicyShape(const ObservationConfig& obs, const PpoConfig& ppo) {
  return {obs.side(), 2 * obs.eta, ppo.d_model, ppo.d_key, ppo.hidden,
          kNumHeads * kActionsPerHead};
}

NetShape ValueShape(const ObservationConfig& obs, const PpoConfig& ppo) {
  return {obs.side(), 2 * obs.eta, ppo.d_model, ppo.d_key, ppo.hidden, 1};
}

double PolicyLossAndGrad(const Network& policy, std::span<const Transition> batch,
                         std::span<const double> adv, double eps,
                         double entropy_coef, NetParams* grad,
                         UpdateStats* stats) {
  if (batch.empty()) throw std::invalid_argument("PolicyLossAndGrad: empty batch");
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  double ratio_sum = 0.0;
  double entropy_sum = 0.0;
  int clipped = 0;
  ForwardCache cache;
  RowVec d_logits(kNumHeads * kActionsPerHead);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& tr = batch[i];
    const RowVec logits = policy.Forward(tr.input, &cache);
    const HeadDistributions d = HeadDistributions::FromLogits(logits);
    const double logp = d.LogProb(tr.action);
    const double ratio = std::exp(logp - tr.logp);
    const double unclipped = ratio * adv[i];
    const double clipped_term = ClipFn(eps, adv[i]);
    const bool active = unclipped <= clipped_term;
    const double entropy = d.Entropy();
    loss -= (std::min(unclipped, clipped_term) + entropy_coef * entropy) * inv_b;
    ratio_sum += ratio;
    entropy_sum += entropy;
    if (!active) ++clipped;
    if (!grad) continue;
    for (int h = 0; h < kNumHeads; ++h) {
      const auto& p = d.probs[h];
      const auto& lp = d.log_probs[h];
      const double head_entropy = -(p.array() * lp.array()).sum();
      // d(-H)/dz_j = p_j (log p_j + H)
      Eigen::VectorXd g = entropy_coef * (p.array() * (lp.array() + head_entropy)).matrix();
      if (active) {
        // d(-ratio A)/dz = -ratio A (onehot - p)
        g += ratio * adv[i] * p;
        g(tr.action[h]) -= ratio * adv[i];
      }
      d_logits.segment(h * kActionsPerHead, kActionsPerHead) = (g * inv_b).transpose();
    }
    policy.Backward(cache, d_logits, *grad);
  }
  if (stats) {
    stats->mean_ratio = ratio_sum * inv_b;
    stats->clip_fraction = clipped * inv_b;
    stats->entropy = entropy_sum * inv_b;
    stats->policy_loss = loss;
  }
  return loss;
}

double ValueLossAndGrad(const Network& value, std::span<const Transition> batch,
                        std::span<const double> returns, NetParams* grad) {
  if (batch.empty()) throw std::invalid_argument("ValueLossAndGrad: empty batch");
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  ForwardCache cache;
  RowVec d_out(1);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double v = value.Forward(batch[i].input, &cache)(0);
    const double diff = v - returns[i];
    loss += 0.5 * diff * diff * inv_b;
    if (!grad) continue;
    d_out(0) = diff * inv_b;
    value.Backward(cache, d_out, *grad);
  }
  return loss;
}

Agent::Agent(const NetShape& policy_shape, const NetShape& value_shape,
             const PpoConfig& config, uint64_t init_seed)
    : Agent(InitParams(policy_shape, DeriveSeed(init_seed, {kInitStream, 0}),
                       config.head_init_scale),
            InitParams(value_shape, DeriveSeed(init_seed, {kInitStream, 1}), 0.0),
            config) {}

Agent::Agent(NetParams policy, NetParams value, const PpoConfig& config)
    : config_(config), policy_(std::move(policy)), value_(std::move(value)) {
  policy_adam_ = {NetParams::Zeros(policy_.shape()), NetParams::Zeros(policy_.shape()), 0};
  value_adam_ = {NetParams::Zeros(value_.shape()), NetParams::Zeros(value_.shape()), 0};
}

ActResult Agent::Act(const Observation& obs, Rng& rng, bool greedy) const {
  return Act(ObservationToInput(obs), rng, greedy);
}

ActResult Agent::Act(const Mat& input, Rng& rng, bool greedy) const {
  ActResult r;
  const auto d = HeadDistributions::FromLogits(policy_.Forward(input));
  r.action = SampleAction(d, rng, greedy, &r.logp);
  r.value = Value(input);
  return r;
}

double Agent::Value(const Mat& input) const { return value_.Forward(input)(0); }

void Agent::Apply(Network& net, const NetParams& g, double lr, AdamState& adam) {
  auto& p = net.mutable_params().blocks;
  if (config_.optimizer == OptimizerKind::kSgd) {
    for (int b = 0; b < kNumBlocks; ++b) p[b] -= lr * g.blocks[b];
    return;
  }
  ++adam.step;
  const double b1 = config_.adam_beta1;
  const double b2 = config_.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(adam.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(adam.step));
  for (int b = 0; b < kNumBlocks; ++b) {
    adam.m.blocks[b] = b1 * adam.m.blocks[b] + (1.0 - b1) * g.blocks[b];
    adam.v.blocks[b] = b2 * adam.v.blocks[b] + (1.0 - b2) * g.blocks[b].cwiseProduct(g.blocks[b]);
    p[b].array() -= lr * (adam.m.blocks[b].array() / c1) /
                    ((adam.v.blocks[b].array() / c2).sqrt() + config_.adam_eps);
  }
}

UpdateStats Agent::Update(std::span<const Transition> traj, Rng& shuffle_rng) {
  UpdateStats stats;
  if (traj.empty()) return stats;
  std::vector<double> rewards(traj.size()), values(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    rewards[i] = traj[i].reward;
    values[i] = traj[i].value;
  }
  GaeResult gae = Gae(rewards, values, config_.gamma, config_.xi);
  if (config_.normalize_advantages && traj.size() > 1) {
    const double n = static_cast<double>(traj.size());
    const double mean = std::accumulate(gae.advantages.begin(), gae.advantages.end(), 0.0) / n;
    double var = 0.0;
    for (double a : gae.advantages) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / n);
    for (double& a : gae.advantages) a = (a - mean) / (sd + 1e-8);
  }

  const Network policy_backup = policy_;
  const Network value_backup = value_;
  const AdamState policy_adam_backup = policy_adam_;
  const AdamState value_adam_backup = value_adam_;

  std::vector<std::size_t> order(traj.size());
  std::iota(order.begin(), order.end(), 0);
  NetParams pg = NetParams::Zeros(policy_.shape());
  NetParams vg = NetParams::Zeros(value_.shape());
  std::vector<Transition> mb;
  std::vector<double> mb_adv, mb_ret;
  double ratio_acc = 0.0, clip_acc = 0.0, ploss = 0.0, vloss = 0.0, ent = 0.0;
  for (int epoch = 0; epoch < config_.epochs; ++epoch) {
    shuffle_rng.Shuffle(order.begin(), order.end());
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config_.minibatch)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config_.minibatch));
      mb.clear();
      mb_adv.clear();
      mb_ret.clear();
      for (std::size_t i = start; i < end; ++i) {
        mb.push_back(traj[order[i]]);
        mb_adv.push_back(gae.advantages[order[i]]);
        mb_ret.push_back(gae.returns[order[i]]);
      }
      pg.SetZero();
      vg.SetZero();
      UpdateStats mbs;
      ploss += PolicyLossAndGrad(policy_, mb, mb_adv, config_.clip,
                                 config_.entropy_coef, &pg, &mbs);
      vloss += ValueLossAndGrad(value_, mb, mb_ret, &vg);
      for (const NetParams* g : {&pg, &vg}) {
        const int bad = g->FirstNonFinite();
        if (bad >= 0) {
          policy_ = policy_backup;
          value_ = value_backup;
          policy_adam_ = policy_adam_backup;
          value_adam_ = value_adam_backup;
          const std::string name = std::string(g == &pg ? "policy." : "value.") + BlockName(bad);
          throw NonFiniteGradient("non-finite gradient in " + name, name);
        }
      }
      Apply(policy_, pg, config_.lr_policy, policy_adam_);
      Apply(value_, vg, config_.lr_value, value_adam_);
      ratio_acc += mbs.mean_ratio;
      clip_acc += mbs.clip_fraction;
      ent += mbs.entropy;
      ++stats.minibatches;
    }
  }
  const double k = static_cast<double>(stats.minibatches);
  stats.mean_ratio = ratio_acc / k;
  stats.clip_fraction = clip_acc / k;
  stats.policy_loss = ploss / k;
  stats.value_loss = vloss / k;
  stats.entropy = ent / k;
  return stats;
}

}  // namespace hexcell
