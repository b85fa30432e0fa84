#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "learning_oracle.hpp"
#include "p2psim/rl/dqn.hpp"
#include "p2psim/rl/ppo.hpp"
#include "p2psim/rl/qtable.hpp"
#include "p2psim/rl/training_env.hpp"
#include "toy_envs.hpp"

using namespace p2psim;
using namespace p2psim::rl;
using p2psim::testing::MatchStateEnv;

namespace {

double decile_mean(const LearningCurve& curve, bool last) {
  const std::size_t n = std::max<std::size_t>(1, curve.size() / 10);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += curve[last ? curve.size() - 1 - i : i].mean_reward;
  return sum / static_cast<double>(n);
}

CommunityTrainingEnv fixture_env(std::uint64_t seed) {
  TrainingEnvConfig cfg;
  cfg.random_start = false;
  cfg.seed = seed;
  return CommunityTrainingEnv(p2psim::testing::learning_fixture(), cfg);
}

} // namespace

TEST(DqnLearner, SolvesTheTwoStateProblem) {
  MatchStateEnv env(1);
  DqnConfig cfg;
  cfg.total_timesteps = 4000;
  cfg.learning_starts = 200;
  cfg.learning_rate = 1e-3;
  cfg.hidden = {16};
  cfg.target_update_interval = 50;
  cfg.exploration_fraction = 0.3;
  cfg.seed = 1;
  const auto result = dqn_train(env, cfg);
  const QNetworkPolicy policy(result.network);
  EXPECT_EQ(policy.act(MatchStateEnv::one_hot(0)), 0);
  EXPECT_EQ(policy.act(MatchStateEnv::one_hot(1)), 1);
  EXPECT_GT(result.target_syncs, 0);
  EXPECT_GT(decile_mean(result.curve, true), decile_mean(result.curve, false));
}

TEST(DqnLearner, SameSeedSameNetwork) {
  DqnConfig cfg;
  cfg.total_timesteps = 1500;
  cfg.learning_starts = 100;
  cfg.hidden = {8};
  cfg.seed = 4;
  MatchStateEnv a(2), b(2);
  EXPECT_EQ(dqn_train(a, cfg).network.net.params(), dqn_train(b, cfg).network.net.params());
}

TEST(PpoLearner, SolvesTheTwoStateProblem) {
  MatchStateEnv env(2, 2);
  PpoConfig cfg;
  cfg.total_timesteps = 6000;
  cfg.n_steps = 100;
  cfg.learning_rate = 3e-3;
  cfg.hidden = {16};
  cfg.seed = 2;
  const auto result = ppo_train(env, cfg);
  const ActorPolicy policy(result.actor);
  EXPECT_EQ(policy.act(MatchStateEnv::one_hot(0)), 0);
  EXPECT_EQ(policy.act(MatchStateEnv::one_hot(1)), 1);
}

TEST(QLearner, CurveTrendsUpOnTheFixture) {
  auto env = fixture_env(1);
  CommunityDiscretizer disc(env.max_energy_kwh(), env.options());
  QLearningConfig cfg;
  cfg.episodes = 1000;
  cfg.seed = 1;
  const auto result = q_learning_train(env, disc, cfg);
  ASSERT_EQ(result.curve.size(), 1000u);
  EXPECT_GT(decile_mean(result.curve, true), decile_mean(result.curve, false));
}

TEST(QLearner, SameSeedSameTable) {
  auto a = fixture_env(3);
  auto b = fixture_env(3);
  CommunityDiscretizer disc(a.max_energy_kwh(), a.options());
  QLearningConfig cfg;
  cfg.episodes = 50;
  cfg.seed = 3;
  EXPECT_EQ(q_learning_train(a, disc, cfg).table.entries(), q_learning_train(b, disc, cfg).table.entries());
}

TEST(PpoLearner, CurveTrendsUpOnTheFixture) {
  auto env = fixture_env(2);
  PpoConfig cfg;
  cfg.total_timesteps = 24 * 600;
  cfg.seed = 2;
  const auto result = ppo_train(env, cfg);
  EXPECT_GT(decile_mean(result.curve, true), decile_mean(result.curve, false));
}

TEST(LearningOracle, FixtureOptimumIsEveryHour) {
  const auto fixture = p2psim::testing::learning_fixture();
  const env::EnvOptions opts;
  EXPECT_EQ(p2psim::testing::best_episode_reward(fixture, 1, 24, opts), 24);
  EXPECT_EQ(p2psim::testing::greedy_episode_reward(fixture, 1, 24, opts), 24);
}

TEST(LearningOracle, DynamicProgramBeatsOrMatchesGreedy) {
  const auto s = profiles::synthesize_scenario(1, 2, 17);
  for (double soc : {100.0, 55.0, 12.0}) {
    const env::EnvOptions opts;
    EXPECT_GE(p2psim::testing::best_episode_reward(s, 1, 24, opts, soc),
              p2psim::testing::greedy_episode_reward(s, 1, 24, opts, soc));
  }
}
