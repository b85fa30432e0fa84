#include "p2psim/rl/qtable.hpp"

#include <algorithm>
#include <cmath>

#include "p2psim/error.hpp"
#include "p2psim/util/random.hpp"

namespace p2psim::rl {

double QTable::value(StateKey s, int a) const {
  auto it = table_.find(s);
  return it == table_.end() ? 0.0 : it->second[static_cast<std::size_t>(a)];
}

double QTable::max_value(StateKey s) const {
  auto it = table_.find(s);
  if (it == table_.end()) return 0.0;
  return *std::max_element(it->second.begin(), it->second.end());
}

int QTable::greedy(StateKey s) const {
  auto it = table_.find(s);
  if (it == table_.end()) return 0;
  return static_cast<int>(std::max_element(it->second.begin(), it->second.end()) - it->second.begin());
}

void QTable::set(StateKey s, int a, double v) {
  if (a < 0 || a >= actions_) throw ValidationError("q-table: action out of range");
  auto [it, inserted] = table_.try_emplace(s, static_cast<std::size_t>(actions_), 0.0);
  it->second[static_cast<std::size_t>(a)] = v;
}

double q_update(QTable& table, StateKey s, int a, double reward, StateKey s_next, double alpha, double gamma,
                bool terminal) {
  const double bootstrap = terminal ? 0.0 : table.max_value(s_next);
  const double old = table.value(s, a);
  const double updated = old + alpha * (reward + gamma * bootstrap - old);
  table.set(s, a, updated);
  return updated;
}

CommunityDiscretizer::CommunityDiscretizer(double max_energy_kwh, env::EnvOptions options)
    : max_energy_(max_energy_kwh), options_(std::move(options)) {
  if (!(max_energy_ > 0.0)) throw ValidationError("discretizer: max energy must be positive");
}

int CommunityDiscretizer::energy_bucket(double kwh) const {
  // Bucket 0 is below max/64; each further bucket doubles, the last is >= max.
  int bucket = 0;
  double edge = max_energy_ / 64.0;
  while (bucket < kEnergyBuckets - 1 && kwh >= edge) {
    ++bucket;
    edge *= 2.0;
  }
  return bucket;
}

StateKey CommunityDiscretizer::operator()(std::span<const double> raw) const {
  const auto obs = env::Observation::from_array(raw);
  const auto load = static_cast<StateKey>(energy_bucket(obs.load));
  const auto gen = static_cast<StateKey>(energy_bucket(obs.generation));
  const auto soc = static_cast<StateKey>(std::clamp(static_cast<int>(std::floor(obs.soc_pct / 10.0)), 0, 10));
  const auto tag = static_cast<StateKey>(env::grid_tag(obs.hour, options_));
  const double diff = obs.generation - obs.load;
  const StateKey balance = diff > options_.balance_tolerance_kwh ? 2 : (diff < -options_.balance_tolerance_kwh ? 0 : 1);
  return (((load * kEnergyBuckets + gen) * 11 + soc) * 4 + tag) * 3 + balance;
}

namespace {

int greedy_explore(const QTable& table, StateKey s, util::Rng& rng) {
  std::vector<double> row(static_cast<std::size_t>(table.action_count()));
  for (int a = 0; a < table.action_count(); ++a) row[static_cast<std::size_t>(a)] = table.value(s, a);
  return argmax_random_tie(row, rng);
}

} // namespace

QLearningResult q_learning_train(VecEnvironment& env, const Discretize& discretize, const QLearningConfig& config) {
  if (config.episodes <= 0) throw ValidationError("q-learning: episodes must be positive");
  QLearningResult result{QTable(env.action_count()), {}};
  util::Rng rng(util::mix_seed(config.seed, 11));
  const int n = env.num_envs();
  std::vector<int> actions(static_cast<std::size_t>(n));
  std::vector<StateKey> states(static_cast<std::size_t>(n));

  for (int ep = 0; ep < config.episodes; ++ep) {
    const double progress = static_cast<double>(ep) / config.episodes;
    const double eps = linear_schedule(config.eps_initial, config.eps_final, config.exploration_fraction, progress);
    auto obs = env.reset();
    double total = 0.0;
    bool done = false;
    while (!done) {
      for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        states[k] = discretize(obs[k]);
        actions[k] = rng.uniform() < eps ? static_cast<int>(rng.below(static_cast<std::uint64_t>(env.action_count())))
                                         : greedy_explore(result.table, states[k], rng);
      }
      auto step = env.step(actions);
      for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        q_update(result.table, states[k], actions[k], step.rewards[k], discretize(step.next_obs[k]), config.alpha,
                 config.gamma, step.done);
        total += step.rewards[k];
      }
      obs = std::move(step.next_obs);
      done = step.done;
    }
    result.curve.push_back({ep, total / n});
  }
  return result;
}

} // namespace p2psim::rl
