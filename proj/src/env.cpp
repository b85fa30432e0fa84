#include "p2psim/env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "p2psim/error.hpp"

namespace p2psim::env {

namespace {

constexpr const char* kActionNames[kActionCount] = {
    "charge_and_buy", "buy", "sell", "discharge_and_sell", "discharge_and_buy", "self", "self_and_charge",
    "self_and_discharge"};

// SoC guard thresholds (%) of the action table.
constexpr double kCritical = 10.0;
constexpr double kReserve = 20.0;
constexpr double kLow = 50.0;
constexpr double kSelfChargeMax = 80.0;
constexpr double kHigh = 90.0;

// Rounding noise below this is not a real energy imbalance.
constexpr double kBalanceEpsilon = 1e-12;

} // namespace

const char* to_string(Action action) { return kActionNames[static_cast<int>(action)]; }

std::optional<Action> action_from_string(std::string_view name) {
  for (int i = 0; i < kActionCount; ++i)
    if (name == kActionNames[i]) return static_cast<Action>(i);
  return std::nullopt;
}

Action action_from_index(int index) {
  if (index < 0 || index >= kActionCount) throw ValidationError("action index out of range: " + std::to_string(index));
  return static_cast<Action>(index);
}

std::array<double, kObservationSize> Observation::to_array() const {
  return {load, generation, soc_pct, static_cast<double>(hour), isp, ibp};
}

Observation Observation::from_array(std::span<const double> v) {
  if (v.size() != kObservationSize) throw ValidationError("observation must have 6 components");
  return Observation{v[0], v[1], v[2], static_cast<int>(std::lround(v[3])), v[4], v[5]};
}

const char* to_string(GridTag tag) {
  switch (tag) {
  case GridTag::Night: return "N";
  case GridTag::NearPeak: return "NP";
  case GridTag::Day: return "D";
  case GridTag::Peak: return "P";
  }
  return "?";
}

GridTag grid_tag(int hour, const EnvOptions& options) {
  const auto slot = options.tariff.slot(hour);
  switch (slot.period) {
  case pricing::Period::Peak: return GridTag::Peak;
  case pricing::Period::Day: return GridTag::Day;
  case pricing::Period::Night:
    if (!slot.near_peak) return GridTag::Night;
    return options.priming ? GridTag::NearPeak : GridTag::Day;
  }
  return GridTag::Day;
}

namespace {

double discharge_for(const Observation& obs, const battery::BatterySpec& spec, double need) {
  return std::min(need, battery::usable_energy(battery::BatteryState{obs.soc_pct}, spec));
}

} // namespace

StepOutcome transition(const Observation& obs, Action action, const EnvOptions& options) {
  const auto& spec = options.battery;
  const double L = obs.load;
  const double G = obs.generation;
  const double soc = std::clamp(obs.soc_pct, 0.0, 100.0);
  const battery::BatteryState state{soc};

  StepOutcome out;
  out.tag = grid_tag(obs.hour, options);
  out.period = options.tariff.slot(obs.hour).period;
  out.new_soc = soc;
  const bool peak = out.tag == GridTag::Peak;

  switch (action) {
  case Action::ChargeAndBuy:
    if ((soc <= kLow && G < L) || (soc <= kLow && night_like(out.tag))) {
      const auto move = battery::apply_charge(state, spec.max_rate_kwh_per_step, spec);
      out.new_soc = move.state.soc_pct;
      out.charge_kwh = move.energy_kwh;
      out.buy_kwh = std::max(L - G, 0.0) + move.energy_kwh;
    } else {
      out.buy_kwh = std::max(L - G, 0.0);
    }
    break;
  case Action::Buy:
    if (G < L && soc < kCritical && !night_like(out.tag)) out.buy_kwh = L - G;
    break;
  case Action::Sell:
    if (G > L && (soc >= kHigh || (soc >= kReserve && peak))) out.sell_kwh = G - L;
    break;
  case Action::DischargeAndSell:
    if (G >= L && ((soc >= kReserve && peak) || (soc >= kHigh && !peak))) {
      const auto move = battery::apply_discharge(state, spec.max_rate_kwh_per_step, spec);
      out.new_soc = move.state.soc_pct;
      out.discharge_kwh = move.energy_kwh;
      out.sell_kwh = (G - L) + move.energy_kwh;
    }
    break;
  case Action::DischargeAndBuy:
    if (G < L && soc >= kCritical) {
      const double deficit = L - G;
      const auto move = battery::apply_discharge(state, deficit, spec);
      out.new_soc = move.state.soc_pct;
      out.discharge_kwh = move.energy_kwh;
      out.buy_kwh = deficit - move.energy_kwh;
    }
    break;
  case Action::SelfUse:
    break;
  case Action::SelfAndCharge:
    if (G > L && soc <= kSelfChargeMax && !peak) {
      const auto move = battery::apply_charge(state, G - L, spec);
      out.new_soc = move.state.soc_pct;
      out.charge_kwh = move.energy_kwh;
    }
    break;
  case Action::SelfAndDischarge:
    if (G < L && soc >= kReserve) {
      const double need = L - G;
      const auto move = battery::apply_discharge(state, need, spec);
      out.new_soc = move.state.soc_pct;
      out.discharge_kwh = move.energy_kwh;
      out.buy_kwh = std::max(need - move.energy_kwh, 0.0);
    }
    break;
  }
  out.new_soc = std::clamp(out.new_soc, 0.0, 100.0);

  const double imbalance = (L + out.charge_kwh + out.sell_kwh) - (G + out.discharge_kwh + out.buy_kwh);
  if (imbalance > kBalanceEpsilon) out.unserved_kwh = imbalance;
  if (imbalance < -kBalanceEpsilon) out.curtailed_kwh = -imbalance;

  out.reward = reward(obs, action, options);
  return out;
}

int reward(const Observation& obs, Action action, const EnvOptions& options) {
  const auto& spec = options.battery;
  const double L = obs.load;
  const double G = obs.generation;
  const double soc = std::clamp(obs.soc_pct, 0.0, 100.0);
  const GridTag tag = grid_tag(obs.hour, options);
  const bool peak = tag == GridTag::Peak;
  const double rate = spec.max_rate_kwh_per_step;
  const double tol = options.balance_tolerance_kwh;

  bool ok = false;
  switch (action) {
  case Action::ChargeAndBuy:
    ok = (soc <= kLow && G < L) || (soc <= kLow && night_like(tag));
    break;
  case Action::Buy:
    ok = G < L && soc < kCritical && !night_like(tag);
    break;
  case Action::Sell:
    ok = G > L && (soc >= kHigh || (soc >= kReserve && peak));
    break;
  case Action::DischargeAndSell: {
    const double excess = (G - L) + battery::usable_energy(battery::BatteryState{soc}, spec);
    ok = G > L && ((soc >= kReserve && peak) || (soc >= kHigh && !peak)) && excess > 0.0;
    break;
  }
  case Action::DischargeAndBuy: {
    const double q = std::min(rate, L - G);
    ok = G < L && soc >= kCritical && q > 0.0;
    break;
  }
  case Action::SelfUse:
    ok = std::abs(G - L) <= tol;
    break;
  case Action::SelfAndCharge: {
    const double q = std::min(rate, G - L);
    ok = q > 0.0 && G > L && soc <= kSelfChargeMax && !peak;
    break;
  }
  case Action::SelfAndDischarge:
    ok = G < L && soc >= kReserve && std::abs(discharge_for(obs, spec, L - G) - (L - G)) <= tol;
    break;
  }
  return ok ? 1 : 0;
}

std::vector<Action> rewarding_actions(const Observation& obs, const EnvOptions& options) {
  std::vector<Action> out;
  for (int i = 0; i < kActionCount; ++i) {
    const auto a = static_cast<Action>(i);
    if (reward(obs, a, options) == 1) out.push_back(a);
  }
  return out;
}

// ---------------------------------------------------------------------------

CommunityEnv::CommunityEnv(const profiles::Scenario& scenario, bool priming, int start_hour, int hours)
    : scenario_(&scenario), start_(0), end_(0), t_(0) {
  scenario.validate();
  for (const auto& farm : scenario.fleet) {
    if (!farm.has_battery)
      throw ValidationError("learning environment requires a battery on every farm (agent " +
                            std::to_string(farm.agent_id) + ")");
    Agent a;
    a.id = farm.agent_id;
    a.load = &scenario.loads.at(farm.agent_id);
    a.generation = &scenario.generation.at(farm.agent_id);
    a.wind = scenario.wind.empty() ? nullptr : &scenario.wind.at(farm.agent_id);
    a.options.battery = scenario.battery_for(farm);
    a.options.tariff = scenario.tariff;
    a.options.priming = priming;
    if (!farm.has_re) {
      a.generation = nullptr;
      a.wind = nullptr;
    }
    agents_.push_back(a);
  }
  set_window(start_hour, hours);
  reset();
}

void CommunityEnv::set_window(int start_hour, int hours) {
  const int horizon = scenario_->horizon_hours;
  if (start_hour < 0 || start_hour >= horizon) throw ValidationError("env: start hour outside horizon");
  const int end = hours <= 0 ? horizon : start_hour + hours;
  if (end > horizon) throw ValidationError("env: window runs past the scenario horizon");
  start_ = start_hour;
  end_ = end;
}

Observation CommunityEnv::observe(const Agent& agent, int t) const {
  const auto idx = static_cast<std::size_t>(t % scenario_->horizon_hours);
  Observation o;
  o.load = (*agent.load)[idx];
  o.generation = (agent.generation ? (*agent.generation)[idx] : 0.0) + (agent.wind ? (*agent.wind)[idx] : 0.0);
  o.soc_pct = agent.soc;
  o.hour = t % 24;
  o.isp = quote_.isp;
  o.ibp = quote_.ibp;
  return o;
}

std::vector<Observation> CommunityEnv::reset() {
  t_ = start_;
  const auto slot = scenario_->tariff.slot(t_ % 24);
  quote_ = pricing::pass_through_quote(slot.lambda_buy, slot.lambda_sell);
  current_.clear();
  for (auto& a : agents_) {
    a.soc = 100.0;
    current_.push_back(observe(a, t_));
  }
  return current_;
}

CommunityEnv::Step CommunityEnv::step(std::span<const Action> actions) {
  if (t_ >= end_) throw RuntimeFailure("env: step beyond horizon (hour " + std::to_string(t_) + ")");
  if (actions.size() != agents_.size()) throw ValidationError("env: one action per agent required");

  Step s;
  s.hour_index = t_;
  s.slot = scenario_->tariff.slot(t_ % 24);
  double tsp = 0.0;
  double tbp = 0.0;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    auto outcome = transition(current_[i], actions[i], agents_[i].options);
    agents_[i].soc = outcome.new_soc;
    tsp += outcome.sell_kwh;
    tbp += outcome.total_buy_kwh();
    s.outcomes.push_back(outcome);
  }
  quote_ = pricing::advise(tsp, tbp, s.slot);
  s.quote = quote_;
  ++t_;
  s.done = t_ >= end_;
  current_.clear();
  for (const auto& a : agents_) current_.push_back(observe(a, t_));
  s.next = current_;
  return s;
}

} // namespace p2psim::env
