#include "p2psim/rl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "p2psim/error.hpp"
#include "p2psim/rl/adam.hpp"

namespace p2psim::rl {

double clipped_surrogate(double ratio, double advantage, double clip_range) {
  const double clipped = std::clamp(ratio, 1.0 - clip_range, 1.0 + clip_range);
  return std::min(ratio * advantage, clipped * advantage);
}

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values, const std::vector<bool>& dones,
                      double last_value, double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) throw ValidationError("gae: input lengths differ");
  GaeResult out{std::vector<double>(n), std::vector<double>(n)};
  double gae = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const double next_value = t + 1 == n ? last_value : values[t + 1];
    const double live = dones[t] ? 0.0 : 1.0;
    const double delta = rewards[t] + gamma * next_value * live - values[t];
    gae = delta + gamma * lambda * live * gae;
    out.advantages[t] = gae;
    out.returns[t] = gae + values[t];
  }
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

namespace {

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

double log_softmax_at(std::span<const double> logits, int action) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - m);
  return logits[static_cast<std::size_t>(action)] - m - std::log(sum);
}

} // namespace

PpoAgent::PpoAgent(int observation_size, int action_count, std::vector<double> scale, const PpoConfig& config) {
  if (static_cast<int>(scale.size()) != observation_size) throw ValidationError("ppo: observation scale has the wrong length");
  util::Rng init(util::mix_seed(config.seed, 31));
  actor_ = ScaledNetwork{Mlp(layer_sizes(observation_size, config.hidden, action_count), Activation::Tanh, init), scale};
  critic_ = ScaledNetwork{Mlp(layer_sizes(observation_size, config.hidden, 1), Activation::Tanh, init), scale};
  // Near-uniform initial policy.
  const std::size_t last_layer =
      static_cast<std::size_t>(config.hidden.empty() ? observation_size : config.hidden.back()) *
          static_cast<std::size_t>(action_count) + static_cast<std::size_t>(action_count);
  auto& p = actor_.net.params();
  for (std::size_t i = p.size() - last_layer; i < p.size(); ++i) p[i] *= 0.01;
}

std::vector<double> PpoAgent::probabilities(std::span<const double> observation) const {
  return softmax(actor_.forward(observation));
}

double PpoAgent::value(std::span<const double> observation) const { return critic_.forward(observation)[0]; }

double PpoAgent::log_prob(std::span<const double> observation, int action) const {
  return log_softmax_at(actor_.forward(observation), action);
}

int PpoAgent::sample(std::span<const double> observation, util::Rng& rng) const {
  const auto p = probabilities(observation);
  double u = rng.uniform();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (u < p[i]) return static_cast<int>(i);
    u -= p[i];
  }
  return static_cast<int>(p.size()) - 1;
}

PpoResult ppo_train(VecEnvironment& env, const PpoConfig& config) {
  if (config.total_timesteps <= 0 || config.n_steps <= 0 || config.batch_size == 0 || config.n_epochs <= 0)
    throw ValidationError("ppo: bad training schedule");
  const int n = env.num_envs();
  const int n_actions = env.action_count();
  PpoAgent agent(env.observation_size(), n_actions, env.observation_scale(), config);
  Adam actor_opt(agent.actor().net.param_count(), AdamConfig{config.learning_rate});
  Adam critic_opt(agent.critic().net.param_count(), AdamConfig{config.learning_rate});
  util::Rng rng(util::mix_seed(config.seed, 32));
  PpoResult result;

  auto obs = env.reset();
  long timesteps = 0;
  double episode_total = 0.0;
  int episode = 0;
  const auto steps = static_cast<std::size_t>(config.n_steps);
  const auto envs = static_cast<std::size_t>(n);

  while (timesteps < config.total_timesteps) {
    // Rollout, stored env-major: index = e * steps + t.
    const std::size_t total = steps * envs;
    std::vector<std::vector<double>> b_obs(total);
    std::vector<int> b_act(total);
    std::vector<double> b_logp(total), b_val(total), b_rew(total);
    std::vector<bool> b_done(total);
    std::vector<int> actions(envs);
    for (std::size_t t = 0; t < steps; ++t) {
      for (std::size_t e = 0; e < envs; ++e) {
        const std::size_t k = e * steps + t;
        actions[e] = agent.sample(obs[e], rng);
        b_obs[k] = obs[e];
        b_act[k] = actions[e];
        b_logp[k] = agent.log_prob(obs[e], actions[e]);
        b_val[k] = agent.value(obs[e]);
      }
      auto step = env.step(actions);
      for (std::size_t e = 0; e < envs; ++e) {
        b_rew[e * steps + t] = step.rewards[e];
        b_done[e * steps + t] = step.done;
        episode_total += step.rewards[e];
      }
      timesteps += n;
      if (step.done) {
        result.curve.push_back({episode++, episode_total / n});
        episode_total = 0.0;
        obs = env.reset();
      } else {
        obs = std::move(step.next_obs);
      }
    }

    std::vector<double> b_adv(total), b_ret(total);
    for (std::size_t e = 0; e < envs; ++e) {
      const auto begin = static_cast<std::ptrdiff_t>(e * steps);
      std::vector<bool> dones(b_done.begin() + begin, b_done.begin() + begin + static_cast<std::ptrdiff_t>(steps));
      const auto gae = compute_gae(std::span(b_rew).subspan(e * steps, steps), std::span(b_val).subspan(e * steps, steps),
                                   dones, agent.value(obs[e]), config.gamma, config.gae_lambda);
      std::copy(gae.advantages.begin(), gae.advantages.end(), b_adv.begin() + begin);
      std::copy(gae.returns.begin(), gae.returns.end(), b_ret.begin() + begin);
    }

    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> g_actor(agent.actor().net.param_count());
    std::vector<double> g_critic(agent.critic().net.param_count());
    Mlp::Tape tape;
    std::vector<double> grad_logits(static_cast<std::size_t>(n_actions));
    std::vector<double> grad_value(1);
    bool first_batch = true;

    for (int epoch = 0; epoch < config.n_epochs; ++epoch) {
      for (std::size_t i = total; i > 1; --i) std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
      for (std::size_t start = 0; start < total; start += config.batch_size) {
        const std::size_t end = std::min(total, start + config.batch_size);
        const double m = static_cast<double>(end - start);
        double adv_mean = 0.0, adv_sq = 0.0;
        for (std::size_t j = start; j < end; ++j) adv_mean += b_adv[order[j]];
        adv_mean /= m;
        for (std::size_t j = start; j < end; ++j) adv_sq += (b_adv[order[j]] - adv_mean) * (b_adv[order[j]] - adv_mean);
        const double adv_std = end - start > 1 ? std::sqrt(adv_sq / (m - 1.0)) : 0.0;

        std::fill(g_actor.begin(), g_actor.end(), 0.0);
        std::fill(g_critic.begin(), g_critic.end(), 0.0);
        double loss = 0.0;
        for (std::size_t j = start; j < end; ++j) {
          const std::size_t k = order[j];
          double adv = b_adv[k];
          if (config.normalize_advantage && end - start > 1) adv = (adv - adv_mean) / (adv_std + 1e-8);

          const auto x = agent.actor().input(b_obs[k]);
          const auto& logits = agent.actor().net.forward(x, tape);
          const auto p = softmax(logits);
          const double logp = log_softmax_at(logits, b_act[k]);
          const double ratio = std::exp(logp - b_logp[k]);
          if (first_batch) result.first_minibatch_ratio_deviation = std::max(result.first_minibatch_ratio_deviation, std::abs(ratio - 1.0));
          const double clipped = std::clamp(ratio, 1.0 - config.clip_range, 1.0 + config.clip_range);
          loss -= clipped_surrogate(ratio, adv, config.clip_range) / m;
          // Gradient flows only through the unclipped branch when it is the minimum.
          const double dratio = ratio * adv <= clipped * adv ? -adv / m : 0.0;
          const double dlogp = dratio * ratio;
          double entropy = 0.0;
          for (double pi : p) entropy -= pi > 0.0 ? pi * std::log(pi) : 0.0;
          loss -= config.ent_coef * entropy / m;
          for (int a = 0; a < n_actions; ++a) {
            const auto ai = static_cast<std::size_t>(a);
            const double onehot = a == b_act[k] ? 1.0 : 0.0;
            const double logpi = p[ai] > 0.0 ? std::log(p[ai]) : 0.0;
            grad_logits[ai] = dlogp * (onehot - p[ai]) + config.ent_coef / m * p[ai] * (logpi + entropy);
          }
          agent.actor().net.backward(tape, grad_logits, g_actor);

          const auto& v = agent.critic().net.forward(x, tape);
          const double diff = v[0] - b_ret[k];
          loss += config.vf_coef * diff * diff / m;
          grad_value[0] = config.vf_coef * 2.0 * diff / m;
          agent.critic().net.backward(tape, grad_value, g_critic);
        }
        first_batch = false;
        if (!std::isfinite(loss))
          throw RuntimeFailure("ppo: non-finite loss in update " + std::to_string(result.updates) + ", epoch " +
                               std::to_string(epoch));
        const double norm = std::hypot(global_norm(g_actor), global_norm(g_critic));
        if (config.max_grad_norm > 0.0 && norm > config.max_grad_norm) {
          const double scale = config.max_grad_norm / (norm + 1e-6);
          for (auto& g : g_actor) g *= scale;
          for (auto& g : g_critic) g *= scale;
        }
        actor_opt.step(agent.actor().net.params(), g_actor);
        critic_opt.step(agent.critic().net.params(), g_critic);
      }
    }
    ++result.updates;
  }
  result.actor = agent.actor();
  result.critic = agent.critic();
  return result;
}

} // namespace p2psim::rl
