#include "p2psim/rulebased.hpp"

#include <algorithm>

#include "p2psim/error.hpp"

namespace p2psim::rulebased {

using battery::BatterySpec;
using battery::BatteryState;
using pricing::Period;

double total_generation(double e_pv, double e_w, double b_uc) {
  if (e_pv < 0.0 || e_w < 0.0 || b_uc < 0.0) throw ValidationError("total_generation: negative input");
  return e_pv + e_w + b_uc;
}

double rule_usable_energy(const BatteryState& state, const BatterySpec& spec) {
  const double above_reserve = std::max(0.0, state.soc_pct - spec.reserve_pct) * spec.kwh_per_pct();
  return std::min(above_reserve, spec.max_rate_kwh_per_step);
}

namespace {

// Charge that keeps the post-step SoC at or below the charge target, given
// what the battery hands out in the same step.
double charge_cap(const BatteryState& state, const BatterySpec& spec, double battery_out) {
  const double to_target = std::max(0.0, spec.charge_target_pct - state.soc_pct) * spec.kwh_per_pct();
  return std::min(spec.max_rate_kwh_per_step, battery_out + to_target);
}

RuleDecision no_battery(bool has_re, double generation, double load) {
  RuleDecision d;
  if (!has_re) {
    d.buy_kwh = load;
  } else if (generation > load) {
    d.sell_kwh = generation - load;
  } else {
    d.buy_kwh = load - generation;
  }
  return d;
}

RuleDecision battery_only(const BatteryState& state, Period period, double load, const BatterySpec& spec) {
  RuleDecision d;
  const double b_uc = rule_usable_energy(state, spec);
  if (state.soc_pct < spec.reserve_pct && period != Period::Peak) {
    d.charge = true;
    d.battery_in_kwh = charge_cap(state, spec, 0.0);
    d.buy_kwh = load + d.battery_in_kwh;
  } else if (period == Period::Night) {
    d.buy_kwh = load;
  } else {
    d.battery_out_kwh = std::min(b_uc, load);
    d.discharge = d.battery_out_kwh > 0.0;
    d.buy_kwh = load - d.battery_out_kwh;
  }
  return d;
}

} // namespace

RuleDecision decide(const profiles::FarmConfig& farm, double e_pv, double e_w, double load, const BatteryState& state,
                    Period period, const BatterySpec& spec, const RuleOptions& options) {
  if (e_pv < 0.0 || e_w < 0.0 || load < 0.0) throw ValidationError("decide: negative energy input");
  const double renewable = farm.has_re ? e_pv + e_w : 0.0;

  if (!farm.has_battery) return no_battery(farm.has_re, renewable, load);
  if (!farm.has_re) return battery_only(state, period, load, spec);

  RuleDecision d;
  const double b_uc = rule_usable_energy(state, spec);
  const double e_tot = total_generation(renewable, 0.0, b_uc);
  const double surplus = e_tot - load;

  if (surplus > 0.0) {
    d.battery_out_kwh = b_uc;
    if (state.soc_pct < spec.charge_target_pct) {
      d.charge = true;
      d.battery_in_kwh = std::min(surplus, charge_cap(state, spec, b_uc));
      d.sell_kwh = surplus - d.battery_in_kwh;
    } else {
      d.sell_kwh = surplus;
    }
    return d;
  }

  if (surplus == 0.0) {
    d.battery_out_kwh = b_uc;
    d.discharge = b_uc > 0.0;
    return d;
  }

  const bool night = period == Period::Night;
  bool charge_branch = (state.soc_pct < options.night_charge_below_pct && night) ||
                       (state.soc_pct < spec.reserve_pct && period != Period::Peak);
  const bool night_buy_branch = state.soc_pct > spec.reserve_pct && night;
  if (options.night_precedence == NightPrecedence::BuyFirst && night_buy_branch) charge_branch = false;

  if (charge_branch) {
    d.charge = true;
    d.battery_out_kwh = b_uc;
    d.battery_in_kwh = charge_cap(state, spec, b_uc);
    d.buy_kwh = (load - e_tot) + d.battery_in_kwh;
  } else if (night_buy_branch) {
    // Night-priced grid energy covers the load; the battery is kept for later.
    d.buy_kwh = load - renewable;
  } else {
    d.battery_out_kwh = b_uc;
    d.discharge = b_uc > 0.0;
    d.buy_kwh = load - e_tot;
  }
  return d;
}

BatteryState apply_decision(const BatteryState& state, const RuleDecision& decision, const BatterySpec& spec) {
  const double net = decision.net_battery_kwh();
  if (net > 0.0) return battery::apply_charge(state, net, spec).state;
  if (net < 0.0) return battery::apply_discharge(state, -net, spec).state;
  return state;
}

} // namespace p2psim::rulebased
