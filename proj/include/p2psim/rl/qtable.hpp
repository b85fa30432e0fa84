#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "p2psim/env.hpp"
#include "p2psim/rl/vec_env.hpp"

namespace p2psim::rl {

using StateKey = std::uint64_t;

// Sparse action-value table; unseen entries read as zero.
class QTable {
public:
  explicit QTable(int action_count = env::kActionCount) : actions_(action_count) {}

  int action_count() const { return actions_; }
  double value(StateKey s, int a) const;
  double max_value(StateKey s) const;
  // Lowest index among the maxima.
  int greedy(StateKey s) const;
  void set(StateKey s, int a, double v);
  std::size_t state_count() const { return table_.size(); }
  const std::map<StateKey, std::vector<double>>& entries() const { return table_; }

private:
  int actions_;
  std::map<StateKey, std::vector<double>> table_;
};

// One tabular Q-learning update; returns the new Q(s, a).
double q_update(QTable& table, StateKey s, int a, double reward, StateKey s_next, double alpha, double gamma,
                bool terminal = false);

// Maps a raw community observation to a table state: log-spaced load and
// generation buckets, SoC decile, grid tag, and the sign of G - L.
class CommunityDiscretizer {
public:
  static constexpr int kEnergyBuckets = 8;

  CommunityDiscretizer() = default;
  CommunityDiscretizer(double max_energy_kwh, env::EnvOptions options);

  StateKey operator()(std::span<const double> observation) const;

  double max_energy_kwh() const { return max_energy_; }
  const env::EnvOptions& options() const { return options_; }

  int energy_bucket(double kwh) const;

private:
  double max_energy_ = 1.0;
  env::EnvOptions options_;
};

struct QLearningConfig {
  int episodes = 2000;
  double alpha = 0.2;
  // Short horizon: discretization aliases states, and long bootstraps
  // propagate that error.
  double gamma = 0.5;
  double eps_initial = 1.0;
  double eps_final = 0.05;
  double exploration_fraction = 0.5;
  std::uint64_t seed = 0;
};

struct QLearningResult {
  QTable table;
  LearningCurve curve;
};

using Discretize = std::function<StateKey(std::span<const double>)>;

QLearningResult q_learning_train(VecEnvironment& env, const Discretize& discretize, const QLearningConfig& config);

class QTablePolicy : public Policy {
public:
  QTablePolicy(QTable table, CommunityDiscretizer discretizer)
      : table_(std::move(table)), discretizer_(std::move(discretizer)) {}

  int act(std::span<const double> observation) const override { return table_.greedy(discretizer_(observation)); }
  std::string algo() const override { return "qtable"; }

  const QTable& table() const { return table_; }
  const CommunityDiscretizer& discretizer() const { return discretizer_; }

private:
  QTable table_;
  CommunityDiscretizer discretizer_;
};

} // namespace p2psim::rl
