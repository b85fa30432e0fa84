#pragma once

namespace p2psim::battery {

// Usable capacity and per-step rate of one storage unit. Defaults are a
// 13.5 kWh usable / 5 kW home battery at hourly resolution.
struct BatterySpec {
  double total_capacity_kwh = 13.5;
  double max_rate_kwh_per_step = 5.0;
  double soc_floor_pct = 0.0;
  double soc_ceiling_pct = 100.0;
  // Rule-based policy limits: stop charging at the target, keep the reserve.
  double charge_target_pct = 90.0;
  double reserve_pct = 20.0;

  void validate() const;

  double pct_per_kwh() const { return 100.0 / total_capacity_kwh; }
  double kwh_per_pct() const { return total_capacity_kwh / 100.0; }
};

struct BatteryState {
  double soc_pct = 100.0;

  bool operator==(const BatteryState&) const = default;
};

// Energy held above the floor.
double stored_energy(const BatteryState& state, const BatterySpec& spec);

// Energy deliverable this step: stored energy capped by the rate limit.
double usable_energy(const BatteryState& state, const BatterySpec& spec);

// Energy that would still fit below the ceiling.
double headroom(const BatteryState& state, const BatterySpec& spec);

struct EnergyMove {
  BatteryState state;
  // Energy actually absorbed or delivered.
  double energy_kwh = 0.0;
};

// Lossless; accepted = min(energy, rate, headroom).
EnergyMove apply_charge(const BatteryState& state, double energy_kwh, const BatterySpec& spec);

// Lossless; delivered = min(energy, usable_energy).
EnergyMove apply_discharge(const BatteryState& state, double energy_kwh, const BatterySpec& spec);

} // namespace p2psim::battery
