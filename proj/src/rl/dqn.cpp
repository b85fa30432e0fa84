#include "p2psim/rl/dqn.hpp"

#include <cmath>
#include <string>

#include "p2psim/error.hpp"

namespace p2psim::rl {

std::vector<double> ScaledNetwork::input(std::span<const double> observation) const {
  if (observation.size() != scale.size()) throw ValidationError("observation size does not match network scaling");
  std::vector<double> x(observation.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = observation[i] / scale[i];
  return x;
}

double huber(double prediction, double target, double* grad) {
  const double d = prediction - target;
  if (std::abs(d) <= 1.0) {
    if (grad) *grad = d;
    return 0.5 * d * d;
  }
  if (grad) *grad = d > 0.0 ? 1.0 : -1.0;
  return std::abs(d) - 0.5;
}

namespace {

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

} // namespace

DqnAgent::DqnAgent(int observation_size, int action_count, std::vector<double> observation_scale,
                   const DqnConfig& config)
    : config_(config) {
  if (static_cast<int>(observation_scale.size()) != observation_size)
    throw ValidationError("dqn: observation scale has the wrong length");
  util::Rng init(util::mix_seed(config.seed, 21));
  online_ = ScaledNetwork{Mlp(layer_sizes(observation_size, config.hidden, action_count), Activation::Relu, init),
                          std::move(observation_scale)};
  target_ = online_;
  optimizer_ = Adam(online_.net.param_count(), AdamConfig{config.learning_rate});
}

int DqnAgent::greedy_action(std::span<const double> observation) const { return argmax(q_values(observation)); }

int DqnAgent::act(std::span<const double> observation, double epsilon, util::Rng& rng) const {
  const int n = online_.net.output_size();
  if (rng.uniform() < epsilon) return static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  return argmax_random_tie(q_values(observation), rng);
}

double DqnAgent::train_step(const ReplayBuffer& buffer, util::Rng& rng) {
  const auto batch = buffer.sample_indices(config_.batch_size, rng);
  std::vector<double> grad(online_.net.param_count(), 0.0);
  std::vector<double> grad_out(static_cast<std::size_t>(online_.net.output_size()));
  Mlp::Tape tape;
  double loss = 0.0;
  for (auto idx : batch) {
    const auto& tr = buffer.at(idx);
    double target = tr.reward;
    if (!tr.done) {
      const auto next = target_.forward(tr.next_obs);
      target += config_.gamma * next[static_cast<std::size_t>(argmax(next))];
    }
    const auto& q = online_.net.forward(online_.input(tr.obs), tape);
    double g = 0.0;
    loss += huber(q[static_cast<std::size_t>(tr.action)], target, &g);
    std::fill(grad_out.begin(), grad_out.end(), 0.0);
    grad_out[static_cast<std::size_t>(tr.action)] = g / static_cast<double>(batch.size());
    online_.net.backward(tape, grad_out, grad);
  }
  loss /= static_cast<double>(batch.size());
  if (!std::isfinite(loss))
    throw RuntimeFailure("dqn: non-finite loss at gradient step " + std::to_string(gradient_steps_));
  clip_grad_norm(grad, config_.max_grad_norm);
  optimizer_.step(online_.net.params(), grad);
  ++gradient_steps_;
  if (config_.target_update_interval > 0 && gradient_steps_ % config_.target_update_interval == 0) {
    sync_target();
    ++target_syncs_;
  }
  return loss;
}

DqnResult dqn_train(VecEnvironment& env, const DqnConfig& config) {
  if (config.total_timesteps <= 0) throw ValidationError("dqn: total_timesteps must be positive");
  if (config.train_freq <= 0 || config.batch_size == 0) throw ValidationError("dqn: bad training schedule");
  DqnAgent agent(env.observation_size(), env.action_count(), env.observation_scale(), config);
  ReplayBuffer buffer(config.buffer_size);
  util::Rng rng(util::mix_seed(config.seed, 22));
  DqnResult result;

  const int n = env.num_envs();
  auto obs = env.reset();
  std::vector<int> actions(static_cast<std::size_t>(n));
  long timesteps = 0;
  long vec_steps = 0;
  double episode_total = 0.0;
  int episode = 0;
  while (timesteps < config.total_timesteps) {
    const double eps = linear_schedule(config.eps_initial, config.eps_final, config.exploration_fraction,
                                       static_cast<double>(timesteps) / static_cast<double>(config.total_timesteps));
    for (int i = 0; i < n; ++i) actions[static_cast<std::size_t>(i)] = agent.act(obs[static_cast<std::size_t>(i)], eps, rng);
    auto step = env.step(actions);
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      buffer.add(Transition{obs[k], actions[k], step.rewards[k], step.next_obs[k], step.done});
      episode_total += step.rewards[k];
    }
    timesteps += n;
    ++vec_steps;
    if (timesteps > config.learning_starts && vec_steps % config.train_freq == 0) {
      for (int g = 0; g < config.gradient_steps; ++g) agent.train_step(buffer, rng);
    }
    if (step.done) {
      result.curve.push_back({episode++, episode_total / n});
      episode_total = 0.0;
      obs = env.reset();
    } else {
      obs = std::move(step.next_obs);
    }
  }
  result.network = agent.online();
  result.gradient_steps = agent.gradient_steps();
  result.target_syncs = agent.target_syncs();
  return result;
}

} // namespace p2psim::rl
