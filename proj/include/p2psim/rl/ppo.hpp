#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "p2psim/rl/dqn.hpp"
#include "p2psim/rl/mlp.hpp"
#include "p2psim/rl/vec_env.hpp"

namespace p2psim::rl {

struct PpoConfig {
  // Counted per agent-step.
  long total_timesteps = 120000;
  double learning_rate = 3e-4;
  // Vector steps per rollout.
  int n_steps = 240;
  std::size_t batch_size = 64;
  int n_epochs = 10;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_range = 0.2;
  bool normalize_advantage = true;
  double ent_coef = 0.0;
  double vf_coef = 0.5;
  double max_grad_norm = 0.5;
  std::vector<int> hidden{64, 64};
  std::uint64_t seed = 0;
};

// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A).
double clipped_surrogate(double ratio, double advantage, double clip_range);

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Generalised advantage estimation over one environment's rollout.
// dones[t] is true when the episode ended after step t; last_value is the
// value estimate of the state following the final step.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values, const std::vector<bool>& dones,
                      double last_value, double gamma, double lambda);

std::vector<double> softmax(std::span<const double> logits);

class PpoAgent {
public:
  PpoAgent(int observation_size, int action_count, std::vector<double> observation_scale, const PpoConfig& config);

  std::vector<double> probabilities(std::span<const double> observation) const;
  double value(std::span<const double> observation) const;
  double log_prob(std::span<const double> observation, int action) const;
  int sample(std::span<const double> observation, util::Rng& rng) const;
  int greedy_action(std::span<const double> observation) const { return argmax(actor_.forward(observation)); }

  ScaledNetwork& actor() { return actor_; }
  ScaledNetwork& critic() { return critic_; }
  const ScaledNetwork& actor() const { return actor_; }
  const ScaledNetwork& critic() const { return critic_; }

private:
  ScaledNetwork actor_;
  ScaledNetwork critic_;
};

struct PpoResult {
  ScaledNetwork actor;
  ScaledNetwork critic;
  LearningCurve curve;
  int updates = 0;
  // Largest |ratio - 1| seen in the first minibatch of each update, before
  // any parameter change in that update. Should be rounding noise.
  double first_minibatch_ratio_deviation = 0.0;
};

PpoResult ppo_train(VecEnvironment& env, const PpoConfig& config);

class ActorPolicy : public Policy {
public:
  explicit ActorPolicy(ScaledNetwork actor, std::optional<ScaledNetwork> critic = std::nullopt)
      : actor_(std::move(actor)), critic_(std::move(critic)) {}
  int act(std::span<const double> observation) const override { return argmax(actor_.forward(observation)); }
  std::string algo() const override { return "ppo"; }
  const ScaledNetwork& actor() const { return actor_; }
  const std::optional<ScaledNetwork>& critic() const { return critic_; }

private:
  ScaledNetwork actor_;
  std::optional<ScaledNetwork> critic_;
};

} // namespace p2psim::rl
