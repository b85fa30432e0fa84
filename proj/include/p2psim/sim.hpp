#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "p2psim/market.hpp"
#include "p2psim/profiles.hpp"
#include "p2psim/rl/vec_env.hpp"
#include "p2psim/rulebased.hpp"

namespace p2psim::sim {

enum class Mode { P2P, GridOnly };
enum class PolicyKind { RuleBased, QTable, Dqn, Ppo };

const char* to_string(Mode mode);
const char* to_string(PolicyKind kind);
Mode mode_from_string(const std::string& name);
PolicyKind policy_from_string(const std::string& name);

struct Ablations {
  // Off: P2P orders are priced at the grid tariff and trades settle at
  // lambda_buy / lambda_sell.
  bool advisor = true;
  // Off: the near-peak window is an ordinary day hour for the agents.
  bool priming = true;
  // Off: dairy load shapes are replaced by flat profiles of equal daily energy.
  bool dairy = true;

  bool operator==(const Ablations&) const = default;
};

struct RunConfig {
  Mode mode = Mode::P2P;
  PolicyKind policy = PolicyKind::RuleBased;
  Ablations ablations;
  // 0 runs the whole scenario.
  int horizon_hours = 0;
  std::uint64_t seed = 0;
  bool strict_paper_mode = false;
  // Ablated variants get a freshly trained policy instead of the supplied one.
  bool retrain = false;
  rulebased::RuleOptions rule_options;
};

struct Kpis {
  double cost_eur = 0.0;
  double revenue_eur = 0.0;
  // Grid purchases during the peak tariff window.
  double peak_grid_kwh = 0.0;
  double grid_buy_kwh = 0.0;
  double grid_sell_kwh = 0.0;
  double p2p_buy_kwh = 0.0;
  double p2p_sell_kwh = 0.0;

  bool operator==(const Kpis&) const = default;
};

struct AgentHour {
  int hour = 0;
  profiles::AgentId agent = 0;
  std::string action;
  double buy_kwh = 0.0;
  double sell_kwh = 0.0;
  double soc_pct = 0.0;
  // Average settlement price of the agent's flow this hour (buy side when
  // buying, sell side when selling, lambda_buy when idle).
  double price = 0.0;
};

struct HourSummary {
  int hour = 0;
  double load_kwh = 0.0;
  double generation_kwh = 0.0;
  double curtailed_kwh = 0.0;
  double charge_kwh = 0.0;
  double discharge_kwh = 0.0;
  // Grid plus P2P.
  double buy_kwh = 0.0;
  double sell_kwh = 0.0;
  double p2p_kwh = 0.0;
  pricing::PriceQuote quote;
};

struct KpiLedger {
  Kpis community;
  std::map<profiles::AgentId, Kpis> agents;
  // Cumulative community KPIs after each hour.
  std::vector<Kpis> cumulative;
  std::vector<HourSummary> hours;
  std::vector<AgentHour> trace;
  std::vector<market::TradeRecord> trades;
};

struct RunResult {
  RunConfig config;
  KpiLedger ledger;
  // Wall time spent building books and clearing; not part of any report.
  double clearing_seconds = 0.0;
};

// Runs the community hour by hour. `policy` is required for learned policies
// and ignored for the rule-based one.
RunResult run(const profiles::Scenario& scenario, const RunConfig& config, const rl::Policy* policy = nullptr);

// Scenario as seen under the config's ablations.
profiles::Scenario apply_ablations(const profiles::Scenario& scenario, const Ablations& ablations);

struct TrainSpec {
  PolicyKind algo = PolicyKind::Dqn;
  // Agent-steps of experience.
  long timesteps = 120000;
  int episode_hours = 24;
  bool priming = true;
  std::uint64_t seed = 0;
  // Optimizer step size (DQN, PPO) or update rate (Q-learning); unset keeps the learner default.
  std::optional<double> learning_rate;
};

struct TrainedPolicy {
  std::shared_ptr<const rl::Policy> policy;
  rl::LearningCurve curve;
};

TrainedPolicy train_policy(const profiles::Scenario& scenario, const TrainSpec& spec);

// Checkpoint for any policy produced by train_policy.
void save_policy(const std::filesystem::path& path, const rl::Policy& policy, std::uint64_t seed, bool priming,
                 long timesteps);

struct LabelledConfig {
  std::string label;
  RunConfig config;
};

// Supplies the policy for a config (may train). Called from worker threads.
using PolicyProvider = std::function<std::shared_ptr<const rl::Policy>(const RunConfig&)>;

struct Comparison {
  std::vector<LabelledConfig> configs;
  std::vector<RunResult> results;
};

// Runs every config (in parallel up to `jobs`) and returns results in input order.
Comparison compare(const profiles::Scenario& scenario, const std::vector<LabelledConfig>& configs, int jobs = 1,
                   const PolicyProvider& provider = {});

// (value - base) / |base| * 100; nullopt when base is zero and value is not.
std::optional<double> percent_delta(double value, double base);

} // namespace p2psim::sim
