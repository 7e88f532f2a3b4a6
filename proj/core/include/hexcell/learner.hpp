#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hexcell/env.hpp"
#include "hexcell/network.hpp"
#include "hexcell/rng.hpp"

namespace hexcell {

enum class OptimizerKind { kSgd, kAdam };

struct PpoConfig {
  double gamma = 0.99;
  double xi = 0.95;       // GAE parameter
  double clip = 0.1;      // epsilon
  double lr_policy = 1e-3;
  double lr_value = 1e-3;
  int epochs = 4;
  int minibatch = 256;
  double entropy_coef = 0.01;
  OptimizerKind optimizer = OptimizerKind::kSgd;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  // Standardise advantages over each agent's batch before the update.
  bool normalize_advantages = true;
  // Network sizes.
  int d_model = 32;
  int d_key = 16;
  int hidden = 64;
  double head_init_scale = 0.01;
};

// Throws ConfigError.
void ValidatePpo(const PpoConfig& config);

// (1 + eps) A for A >= 0, (1 - eps) A otherwise.
double ClipFn(double eps, double advantage);

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// values[t] = V(o_t) for t = 0..T-1; the state after the last slot is
// terminal (bootstrap 0).
GaeResult Gae(std::span<const double> rewards, std::span<const double> values,
              double gamma, double xi);

// Mean over samples of min(ratio A, ClipFn(eps, A)). The objective, not the
// loss.
double SurrogateObjective(std::span<const double> new_logp,
                          std::span<const double> old_logp,
                          std::span<const double> advantages, double eps);

// 1/2 mean (V - g)^2. Throws std::invalid_argument on an empty batch.
double ValueLoss(std::span<const double> values, std::span<const double> returns);

// Five softmax heads over the concatenated logits.
struct HeadDistributions {
  std::array<Eigen::VectorXd, kNumHeads> probs;
  std::array<Eigen::VectorXd, kNumHeads> log_probs;

  static HeadDistributions FromLogits(const RowVec& logits);
  double LogProb(const ActionVector& a) const;
  double Entropy() const;  // sum over heads
};

// Independent draw per head, or per-head argmax (lowest index on ties) when
// greedy. Returns the joint log-probability through logp.
ActionVector SampleAction(const HeadDistributions& dist, Rng& rng, bool greedy,
                          double* logp = nullptr);

// log1p of the counts, tokens x 2 eta.
Mat ObservationToInput(const Observation& obs);

NetShape PolicyShape(const ObservationConfig& obs, const PpoConfig& ppo);
NetShape ValueShape(const ObservationConfig& obs, const PpoConfig& ppo);

// One stored step of an agent's own trajectory.
struct Transition {
  Mat input;
  ActionVector action{};
  double logp = 0.0;
  double reward = 0.0;
  double value = 0.0;
};

struct AdamState {
  NetParams m;
  NetParams v;
  int64_t step = 0;
};

struct UpdateStats {
  double mean_ratio = 1.0;
  double clip_fraction = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  int minibatches = 0;
};

class NonFiniteGradient : public std::runtime_error {
 public:
  NonFiniteGradient(const std::string& what, std::string block)
      : std::runtime_error(what), block_(std::move(block)) {}
  const std::string& block() const { return block_; }

 private:
  std::string block_;
};

// Gradients of the clipped policy loss (negated objective minus the entropy
// bonus) and of the value loss over a batch, accumulated into grad. Exposed
// for gradient checks. Returns the loss.
double PolicyLossAndGrad(const Network& policy, std::span<const Transition> batch,
                         std::span<const double> advantages, double eps,
                         double entropy_coef, NetParams* grad,
                         UpdateStats* stats = nullptr);
double ValueLossAndGrad(const Network& value, std::span<const Transition> batch,
                        std::span<const double> returns, NetParams* grad);

struct ActResult {
  ActionVector action{};
  double logp = 0.0;
  double value = 0.0;
};

// One cell's learner: its own policy and value networks and optimiser state.
// Nothing here reaches another agent's data.
class Agent {
 public:
  Agent(const NetShape& policy_shape, const NetShape& value_shape,
        const PpoConfig& config, uint64_t init_seed);
  Agent(NetParams policy, NetParams value, const PpoConfig& config);

  ActResult Act(const Observation& obs, Rng& rng, bool greedy) const;
  ActResult Act(const Mat& input, Rng& rng, bool greedy) const;
  double Value(const Mat& input) const;

  // PPO update on this agent's trajectory TS_m. On a non-finite gradient the
  // parameters are restored and NonFiniteGradient is thrown.
  UpdateStats Update(std::span<const Transition> trajectory, Rng& shuffle_rng);

  const Network& policy() const { return policy_; }
  const Network& value() const { return value_; }
  Network& mutable_policy() { return policy_; }
  Network& mutable_value() { return value_; }
  const PpoConfig& config() const { return config_; }
  AdamState& policy_adam() { return policy_adam_; }
  AdamState& value_adam() { return value_adam_; }
  const AdamState& policy_adam() const { return policy_adam_; }
  const AdamState& value_adam() const { return value_adam_; }

 private:
  void Apply(Network& net, const NetParams& grad, double lr, AdamState& adam);

  PpoConfig config_;
  Network policy_;
  Network value_;
  AdamState policy_adam_;
  AdamState value_adam_;
};

}  // namespace hexcell
