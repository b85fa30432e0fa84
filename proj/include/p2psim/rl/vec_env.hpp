#pragma once

#include <span>
#include <string>
#include <vector>

#include "p2psim/util/random.hpp"

namespace p2psim::rl {

struct VecStep {
  std::vector<std::vector<double>> next_obs;
  std::vector<double> rewards;
  // All sub-environments end their episodes together.
  bool done = false;
};

// A batch of lock-stepped environments sharing one policy (one per agent
// in the community setting).
class VecEnvironment {
public:
  virtual ~VecEnvironment() = default;

  virtual int num_envs() const = 0;
  virtual int observation_size() const = 0;
  virtual int action_count() const = 0;
  // Per-component divisors applied before observations reach a network.
  virtual std::vector<double> observation_scale() const { return std::vector<double>(static_cast<std::size_t>(observation_size()), 1.0); }

  virtual std::vector<std::vector<double>> reset() = 0;
  virtual VecStep step(std::span<const int> actions) = 0;
};

// Deterministic action selection for evaluation and simulation.
class Policy {
public:
  virtual ~Policy() = default;
  virtual int act(std::span<const double> observation) const = 0;
  virtual std::string algo() const = 0;
};

struct EpisodeStat {
  int episode = 0;
  // Episode reward averaged over the sub-environments.
  double mean_reward = 0.0;
};

using LearningCurve = std::vector<EpisodeStat>;

// Mean of the last `n` episodes (all of them if fewer).
double tail_mean(const LearningCurve& curve, std::size_t n);

// Index of the largest value; ties broken uniformly at random.
int argmax_random_tie(std::span<const double> values, util::Rng& rng);
// Index of the largest value; ties go to the lowest index.
int argmax(std::span<const double> values);

// Linear decay from `initial` to `final` over the first `fraction` of training.
double linear_schedule(double initial, double final, double fraction, double progress);

} // namespace p2psim::rl
