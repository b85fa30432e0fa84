#pragma once

#include <cstdint>
#include <memory>

#include "p2psim/env.hpp"
#include "p2psim/profiles.hpp"
#include "p2psim/rl/vec_env.hpp"

namespace p2psim::rl {

struct TrainingEnvConfig {
  // Episode length; episodes start at midnight.
  int episode_hours = 24;
  // Draw the starting day uniformly per episode; otherwise always day 0.
  bool random_start = true;
  bool priming = true;
  std::uint64_t seed = 0;
};

// Community environment exposed as one sub-environment per agent.
class CommunityTrainingEnv : public VecEnvironment {
public:
  CommunityTrainingEnv(profiles::Scenario scenario, TrainingEnvConfig config);
  CommunityTrainingEnv(const CommunityTrainingEnv&) = delete;
  CommunityTrainingEnv& operator=(const CommunityTrainingEnv&) = delete;

  int num_envs() const override { return env_->agent_count(); }
  int observation_size() const override { return env::kObservationSize; }
  int action_count() const override { return env::kActionCount; }
  std::vector<double> observation_scale() const override;

  std::vector<std::vector<double>> reset() override;
  VecStep step(std::span<const int> actions) override;

  const profiles::Scenario& scenario() const { return *scenario_; }
  // Largest hourly load or generation in the scenario.
  double max_energy_kwh() const { return max_energy_; }
  const env::EnvOptions& options() const { return env_->options_for(0); }

private:
  std::unique_ptr<profiles::Scenario> scenario_;
  TrainingEnvConfig config_;
  std::unique_ptr<env::CommunityEnv> env_;
  util::Rng rng_;
  double max_energy_ = 1.0;
};

std::vector<std::vector<double>> to_rows(const std::vector<env::Observation>& observations);

// Scale vector used for network inputs: energies by the largest hourly value,
// SoC by 100, hour by 23, prices by the peak tariff.
std::vector<double> community_observation_scale(double max_energy_kwh, const pricing::TariffSchedule& tariff);

double max_hourly_energy(const profiles::Scenario& scenario);

} // namespace p2psim::rl
