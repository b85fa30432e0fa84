#include "p2psim/rl/training_env.hpp"

#include <algorithm>

#include "p2psim/error.hpp"

namespace p2psim::rl {

std::vector<std::vector<double>> to_rows(const std::vector<env::Observation>& observations) {
  std::vector<std::vector<double>> rows;
  rows.reserve(observations.size());
  for (const auto& o : observations) {
    const auto a = o.to_array();
    rows.emplace_back(a.begin(), a.end());
  }
  return rows;
}

std::vector<double> community_observation_scale(double max_energy_kwh, const pricing::TariffSchedule& tariff) {
  const double e = max_energy_kwh > 0.0 ? max_energy_kwh : 1.0;
  return {e, e, 100.0, 23.0, tariff.peak_price, tariff.peak_price};
}

double max_hourly_energy(const profiles::Scenario& scenario) {
  double m = 0.0;
  for (const auto& farm : scenario.fleet) {
    const auto& load = scenario.loads.at(farm.agent_id);
    const auto& gen = scenario.generation.at(farm.agent_id);
    for (std::size_t t = 0; t < load.length(); ++t) {
      m = std::max(m, load[t]);
      if (farm.has_re) m = std::max(m, gen[t] + scenario.wind_at(farm.agent_id, static_cast<int>(t)));
    }
  }
  return m > 0.0 ? m : 1.0;
}

CommunityTrainingEnv::CommunityTrainingEnv(profiles::Scenario scenario, TrainingEnvConfig config)
    : scenario_(std::make_unique<profiles::Scenario>(std::move(scenario))), config_(config),
      rng_(util::mix_seed(config.seed, 7)) {
  if (config_.episode_hours <= 0 || config_.episode_hours % 24 != 0)
    throw ValidationError("training env: episode length must be a positive multiple of 24 hours");
  if (config_.episode_hours > scenario_->horizon_hours)
    throw ValidationError("training env: episode longer than the scenario horizon");
  env_ = std::make_unique<env::CommunityEnv>(*scenario_, config_.priming, 0, config_.episode_hours);
  max_energy_ = max_hourly_energy(*scenario_);
}

std::vector<double> CommunityTrainingEnv::observation_scale() const {
  return community_observation_scale(max_energy_, scenario_->tariff);
}

std::vector<std::vector<double>> CommunityTrainingEnv::reset() {
  const int days = (scenario_->horizon_hours - config_.episode_hours) / 24 + 1;
  const int day = config_.random_start ? static_cast<int>(rng_.below(static_cast<std::uint64_t>(days))) : 0;
  env_->set_window(day * 24, config_.episode_hours);
  return to_rows(env_->reset());
}

VecStep CommunityTrainingEnv::step(std::span<const int> actions) {
  std::vector<env::Action> acts;
  acts.reserve(actions.size());
  for (int a : actions) acts.push_back(env::action_from_index(a));
  auto s = env_->step(acts);
  VecStep out;
  out.next_obs = to_rows(s.next);
  for (const auto& o : s.outcomes) out.rewards.push_back(o.reward);
  out.done = s.done;
  return out;
}

} // namespace p2psim::rl
