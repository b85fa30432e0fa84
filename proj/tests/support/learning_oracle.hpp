#pragma once

#include <cmath>
#include <map>
#include <utility>

#include "p2psim/env.hpp"
#include "p2psim/profiles.hpp"

namespace p2psim::testing {

// Best achievable episode reward for one agent over the first `hours` of the
// scenario, by dynamic programming over every reachable (hour, SoC) pair.
inline int best_episode_reward(const profiles::Scenario& s, profiles::AgentId id, int hours, const env::EnvOptions& opts,
                               double start_soc = 100.0) {
  std::map<std::pair<int, long long>, int> memo;
  const auto& load = s.loads.at(id);
  const auto& gen = s.generation.at(id);
  auto key = [](double soc) { return std::llround(soc * 1e9); };
  auto value = [&](auto&& self, int t, double soc) -> int {
    if (t == hours) return 0;
    const auto k = std::make_pair(t, key(soc));
    if (auto it = memo.find(k); it != memo.end()) return it->second;
    const auto idx = static_cast<std::size_t>(t);
    const env::Observation obs{load[idx], gen[idx], soc, t % 24, 0.0, 0.0};
    int best = 0;
    for (int a = 0; a < env::kActionCount; ++a) {
      const auto out = env::transition(obs, static_cast<env::Action>(a), opts);
      best = std::max(best, out.reward + self(self, t + 1, out.new_soc));
    }
    memo[k] = best;
    return best;
  };
  return value(value, 0, start_soc);
}

// Reward collected by always taking the lowest-index rewarding action.
inline int greedy_episode_reward(const profiles::Scenario& s, profiles::AgentId id, int hours,
                                 const env::EnvOptions& opts, double start_soc = 100.0) {
  const auto& load = s.loads.at(id);
  const auto& gen = s.generation.at(id);
  double soc = start_soc;
  int total = 0;
  for (int t = 0; t < hours; ++t) {
    const auto idx = static_cast<std::size_t>(t);
    const env::Observation obs{load[idx], gen[idx], soc, t % 24, 0.0, 0.0};
    const auto good = env::rewarding_actions(obs, opts);
    const auto a = good.empty() ? env::Action::SelfUse : good.front();
    const auto out = env::transition(obs, a, opts);
    total += out.reward;
    soc = out.new_soc;
  }
  return total;
}

} // namespace p2psim::testing
