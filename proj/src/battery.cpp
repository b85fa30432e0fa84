#include "p2psim/battery.hpp"

#include <algorithm>
#include <cmath>

#include "p2psim/error.hpp"

namespace p2psim::battery {

void BatterySpec::validate() const {
  if (!(total_capacity_kwh > 0.0)) throw ValidationError("battery: capacity must be > 0");
  if (!(max_rate_kwh_per_step > 0.0)) throw ValidationError("battery: max rate must be > 0");
  if (!(soc_floor_pct >= 0.0 && soc_floor_pct < soc_ceiling_pct && soc_ceiling_pct <= 100.0))
    throw ValidationError("battery: require 0 <= floor < ceiling <= 100");
  if (!(reserve_pct >= soc_floor_pct && reserve_pct < charge_target_pct && charge_target_pct <= soc_ceiling_pct))
    throw ValidationError("battery: require floor <= reserve < charge target <= ceiling");
}

double stored_energy(const BatteryState& state, const BatterySpec& spec) {
  return std::max(0.0, state.soc_pct - spec.soc_floor_pct) * spec.kwh_per_pct();
}

double usable_energy(const BatteryState& state, const BatterySpec& spec) {
  return std::min(stored_energy(state, spec), spec.max_rate_kwh_per_step);
}

double headroom(const BatteryState& state, const BatterySpec& spec) {
  return std::max(0.0, spec.soc_ceiling_pct - state.soc_pct) * spec.kwh_per_pct();
}

EnergyMove apply_charge(const BatteryState& state, double energy_kwh, const BatterySpec& spec) {
  if (!(energy_kwh >= 0.0)) throw ValidationError("apply_charge: negative energy");
  const double room = headroom(state, spec);
  const double accepted = std::min({energy_kwh, spec.max_rate_kwh_per_step, room});
  EnergyMove move;
  move.energy_kwh = accepted;
  // Filling exactly to the ceiling lands on it without rounding drift.
  move.state.soc_pct = accepted == room ? std::max(state.soc_pct, spec.soc_ceiling_pct)
                                        : state.soc_pct + accepted * spec.pct_per_kwh();
  move.state.soc_pct = std::clamp(move.state.soc_pct, spec.soc_floor_pct, spec.soc_ceiling_pct);
  return move;
}

EnergyMove apply_discharge(const BatteryState& state, double energy_kwh, const BatterySpec& spec) {
  if (!(energy_kwh >= 0.0)) throw ValidationError("apply_discharge: negative energy");
  const double stored = stored_energy(state, spec);
  const double delivered = std::min(energy_kwh, usable_energy(state, spec));
  EnergyMove move;
  move.energy_kwh = delivered;
  move.state.soc_pct = delivered == stored ? std::min(state.soc_pct, spec.soc_floor_pct)
                                           : state.soc_pct - delivered * spec.pct_per_kwh();
  move.state.soc_pct = std::clamp(move.state.soc_pct, spec.soc_floor_pct, spec.soc_ceiling_pct);
  return move;
}

} // namespace p2psim::battery
