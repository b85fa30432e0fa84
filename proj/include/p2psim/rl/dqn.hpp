#pragma once

#include <cstdint>
#include <vector>

#include "p2psim/rl/adam.hpp"
#include "p2psim/rl/mlp.hpp"
#include "p2psim/rl/replay_buffer.hpp"
#include "p2psim/rl/vec_env.hpp"

namespace p2psim::rl {

// Network plus the input scaling it was trained with.
struct ScaledNetwork {
  Mlp net;
  std::vector<double> scale;

  std::vector<double> input(std::span<const double> observation) const;
  std::vector<double> forward(std::span<const double> observation) const { return net.forward(input(observation)); }
};

struct DqnConfig {
  // Counted per agent-step.
  long total_timesteps = 120000;
  double learning_rate = 1e-4;
  std::size_t buffer_size = 10000;
  long learning_starts = 1000;
  std::size_t batch_size = 32;
  double gamma = 0.99;
  // Vector steps between training phases.
  int train_freq = 4;
  int gradient_steps = 1;
  // Gradient steps between target-network syncs.
  int target_update_interval = 250;
  double exploration_fraction = 0.1;
  double eps_initial = 1.0;
  double eps_final = 0.05;
  double max_grad_norm = 10.0;
  std::vector<int> hidden{64, 64};
  std::uint64_t seed = 0;
};

// Huber loss (delta 1) and its derivative with respect to the prediction.
double huber(double prediction, double target, double* grad = nullptr);

class DqnAgent {
public:
  DqnAgent(int observation_size, int action_count, std::vector<double> observation_scale, const DqnConfig& config);

  std::vector<double> q_values(std::span<const double> observation) const { return online_.forward(observation); }
  // Lowest index among equal maxima.
  int greedy_action(std::span<const double> observation) const;
  // Epsilon-greedy; ties among the maxima are broken at random.
  int act(std::span<const double> observation, double epsilon, util::Rng& rng) const;

  // One gradient step on a sampled minibatch; returns the mean loss.
  double train_step(const ReplayBuffer& buffer, util::Rng& rng);
  void sync_target() { target_.net.params() = online_.net.params(); }

  const ScaledNetwork& online() const { return online_; }
  const ScaledNetwork& target() const { return target_; }
  long gradient_steps() const { return gradient_steps_; }
  int target_syncs() const { return target_syncs_; }

private:
  DqnConfig config_;
  ScaledNetwork online_;
  ScaledNetwork target_;
  Adam optimizer_;
  long gradient_steps_ = 0;
  int target_syncs_ = 0;
};

struct DqnResult {
  ScaledNetwork network;
  LearningCurve curve;
  long gradient_steps = 0;
  int target_syncs = 0;
};

DqnResult dqn_train(VecEnvironment& env, const DqnConfig& config);

class QNetworkPolicy : public Policy {
public:
  explicit QNetworkPolicy(ScaledNetwork network) : network_(std::move(network)) {}
  int act(std::span<const double> observation) const override { return argmax(network_.forward(observation)); }
  std::string algo() const override { return "dqn"; }
  const ScaledNetwork& network() const { return network_; }

private:
  ScaledNetwork network_;
};

} // namespace p2psim::rl
