#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "p2psim/battery.hpp"
#include "p2psim/pricing.hpp"
#include "p2psim/profiles.hpp"

namespace p2psim::env {

enum class Action : int {
  ChargeAndBuy = 0,
  Buy = 1,
  Sell = 2,
  DischargeAndSell = 3,
  DischargeAndBuy = 4,
  SelfUse = 5,
  SelfAndCharge = 6,
  SelfAndDischarge = 7,
};

inline constexpr int kActionCount = 8;
inline constexpr int kObservationSize = 6;

const char* to_string(Action action);
std::optional<Action> action_from_string(std::string_view name);
Action action_from_index(int index);

struct Observation {
  double load = 0.0;
  double generation = 0.0;
  double soc_pct = 0.0;
  int hour = 0;
  double isp = 0.0;
  double ibp = 0.0;

  // [load, generation, soc, hour, isp, ibp]
  std::array<double, kObservationSize> to_array() const;
  static Observation from_array(std::span<const double> values);
};

// Grid condition used by action guards and rewards. NearPeak is billed at the
// night price; it only exists while pre-peak priming is enabled.
enum class GridTag { Night, NearPeak, Day, Peak };

const char* to_string(GridTag tag);

struct EnvOptions {
  battery::BatterySpec battery;
  pricing::TariffSchedule tariff;
  bool priming = true;
  // |G - L| tolerance for self-sufficiency (rules 6 and 8).
  double balance_tolerance_kwh = 0.1;
};

GridTag grid_tag(int hour, const EnvOptions& options);

// Night and NearPeak share the "N/NP" guard class.
inline bool night_like(GridTag tag) { return tag == GridTag::Night || tag == GridTag::NearPeak; }

struct StepOutcome {
  int reward = 0;
  double buy_kwh = 0.0;
  double sell_kwh = 0.0;
  double new_soc = 0.0;
  pricing::Period period = pricing::Period::Day;
  GridTag tag = GridTag::Day;
  double charge_kwh = 0.0;
  double discharge_kwh = 0.0;
  // Bookkeeping outside the action's own flows: load the action left
  // uncovered (imported from the grid by the settlement layer) and
  // generation it left unused (curtailed).
  double unserved_kwh = 0.0;
  double curtailed_kwh = 0.0;

  double total_buy_kwh() const { return buy_kwh + unserved_kwh; }
};

// Pure state transition of one agent-hour. Actions whose guard fails leave
// SoC unchanged and move nothing (action 0 still buys the deficit).
StepOutcome transition(const Observation& obs, Action action, const EnvOptions& options);

// Binary reward of taking `action` in `obs`.
int reward(const Observation& obs, Action action, const EnvOptions& options);

std::vector<Action> rewarding_actions(const Observation& obs, const EnvOptions& options);

// Multi-agent environment over a scenario. All agents act once per hour;
// prices in the next observations come from this hour's advisor quote.
class CommunityEnv {
public:
  struct Step {
    std::vector<StepOutcome> outcomes;
    pricing::PriceQuote quote;
    pricing::TariffSlot slot;
    int hour_index = 0;
    std::vector<Observation> next;
    bool done = false;
  };

  // Runs hours [start_hour, start_hour + hours). hours <= 0 means to the end.
  CommunityEnv(const profiles::Scenario& scenario, bool priming = true, int start_hour = 0, int hours = 0);

  std::vector<Observation> reset();
  // Reposition the episode window; takes effect at the next reset().
  void set_window(int start_hour, int hours);
  Step step(std::span<const Action> actions);

  int agent_count() const { return static_cast<int>(agents_.size()); }
  int hour_index() const { return t_; }
  int window_start() const { return start_; }
  int window_end() const { return end_; }
  const std::vector<Observation>& observations() const { return current_; }
  const EnvOptions& options_for(int agent) const { return agents_[static_cast<std::size_t>(agent)].options; }
  profiles::AgentId agent_id(int agent) const { return agents_[static_cast<std::size_t>(agent)].id; }

private:
  struct Agent {
    profiles::AgentId id;
    const profiles::TimeSeries* load;
    const profiles::TimeSeries* generation;
    const profiles::TimeSeries* wind;
    EnvOptions options;
    double soc = 100.0;
  };

  Observation observe(const Agent& agent, int t) const;

  const profiles::Scenario* scenario_;
  std::vector<Agent> agents_;
  int start_;
  int end_;
  int t_;
  pricing::PriceQuote quote_;
  std::vector<Observation> current_;
};

} // namespace p2psim::env
