#pragma once

#include "p2psim/battery.hpp"
#include "p2psim/pricing.hpp"
#include "p2psim/profiles.hpp"

namespace p2psim::rulebased {

// Which deficit branch wins at night when SoC sits between the reserve and 50%.
enum class NightPrecedence { ChargeFirst, BuyFirst };

struct RuleOptions {
  NightPrecedence night_precedence = NightPrecedence::ChargeFirst;
  // Night charging threshold for RE farms in deficit.
  double night_charge_below_pct = 50.0;
};

// One farm-hour of the baseline policy.
//
// The battery contributes its usable energy (above the reserve) to the
// farm's total generation and is recharged by `battery_in_kwh` when the
// charge flag is set, so both gross legs can be positive. Per agent-hour:
//   pv + wind + battery_out + buy == load + battery_in + sell   (+ nothing else)
struct RuleDecision {
  bool charge = false;
  bool discharge = false;
  double buy_kwh = 0.0;
  double sell_kwh = 0.0;
  double battery_in_kwh = 0.0;
  double battery_out_kwh = 0.0;

  double net_battery_kwh() const { return battery_in_kwh - battery_out_kwh; }
};

double total_generation(double e_pv, double e_w, double b_uc);

// Battery energy the rule-based policy may draw this step (rate-capped, above reserve).
double rule_usable_energy(const battery::BatteryState& state, const battery::BatterySpec& spec);

RuleDecision decide(const profiles::FarmConfig& farm, double e_pv, double e_w, double load,
                    const battery::BatteryState& state, pricing::Period period, const battery::BatterySpec& spec,
                    const RuleOptions& options = {});

// Applies the net battery leg of a decision.
battery::BatteryState apply_decision(const battery::BatteryState& state, const RuleDecision& decision,
                                     const battery::BatterySpec& spec);

} // namespace p2psim::rulebased
