#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "p2psim/rl/dqn.hpp"
#include "p2psim/rl/ppo.hpp"
#include "p2psim/rl/qtable.hpp"

namespace p2psim::rl {

struct CheckpointMeta {
  std::uint64_t seed = 0;
  bool priming = true;
  long timesteps = 0;
};

void save_qtable(const std::filesystem::path& path, const QTablePolicy& policy, const CheckpointMeta& meta);
void save_dqn(const std::filesystem::path& path, const ScaledNetwork& network, const CheckpointMeta& meta);
// The critic is optional; acting only needs the actor.
void save_ppo(const std::filesystem::path& path, const ScaledNetwork& actor, const ScaledNetwork* critic,
              const CheckpointMeta& meta);

struct LoadedPolicy {
  std::unique_ptr<Policy> policy;
  CheckpointMeta meta;
};

// Throws ValidationError for unreadable files, unknown formats and
// architecture mismatches.
LoadedPolicy load_policy(const std::filesystem::path& path);

// episode,mean_reward
void write_learning_curve(const std::filesystem::path& path, const LearningCurve& curve);

} // namespace p2psim::rl
