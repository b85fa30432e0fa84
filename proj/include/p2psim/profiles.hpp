#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "p2psim/battery.hpp"
#include "p2psim/pricing.hpp"

namespace p2psim::profiles {

using AgentId = int;

struct FarmConfig {
  AgentId agent_id = 0;
  int herd_size = 0;
  double pv_capacity_kw = 0.0;
  bool has_battery = true;
  bool has_re = true;
  // Per-agent override of the fleet battery.
  std::optional<battery::BatterySpec> battery;
};

// Hourly energy in kWh per step. Length is a whole number of days.
class TimeSeries {
public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<double> values);

  std::size_t length() const { return values_.size(); }
  double operator[](std::size_t hour) const { return values_[hour]; }
  const std::vector<double>& values() const { return values_; }
  double total() const;

  bool operator==(const TimeSeries&) const = default;

private:
  std::vector<double> values_;
};

struct Scenario {
  std::vector<FarmConfig> fleet;
  std::map<AgentId, TimeSeries> loads;
  std::map<AgentId, TimeSeries> generation;
  // Wind; empty map means zero for everyone.
  std::map<AgentId, TimeSeries> wind;
  int horizon_hours = 0;
  std::uint64_t rng_seed = 0;
  battery::BatterySpec battery;
  pricing::TariffSchedule tariff;

  void validate() const;

  const FarmConfig& farm(AgentId id) const;
  const battery::BatterySpec& battery_for(const FarmConfig& farm) const {
    return farm.battery ? *farm.battery : battery;
  }
  double wind_at(AgentId id, int hour) const;
};

// Knobs of the synthetic dairy-farm generator.
struct ProfileShape {
  // Overnight base load per cow (kW).
  double base_kw_per_cow = 0.045;
  // Milking-parlour bumps per cow (kW), centred in the 06-09 and 16-19 windows.
  double morning_peak_kw_per_cow = 0.12;
  double evening_peak_kw_per_cow = 0.12;
  double morning_centre_h = 7.5;
  double evening_centre_h = 17.5;
  double peak_width_h = 1.0;
  // Relative multiplicative noise on load (uniform +/-).
  double load_noise = 0.10;
  // Hard floor on any hourly load value (kWh).
  double min_load_kwh = 0.0;
  // Seasonal swing of load (winter higher).
  double load_seasonal_amplitude = 0.10;

  // PV daylight window [sunrise, sunset) in hours.
  double sunrise_h = 7.0;
  double sunset_h = 19.0;
  double pv_seasonal_amplitude = 0.6;
  // Per-hour cloud attenuation factor drawn from [cloud_min, 1].
  double cloud_min = 0.4;
  // Target PV energy as a share of load energy, jittered per agent.
  double pv_to_load_ratio = 0.45;
  double ratio_jitter = 0.03;
};

// Ten farms mirroring the reference fleet: herds 30..70, PV 10/10/20/20/20 kW,
// repeated for larger fleets.
std::vector<FarmConfig> reference_fleet(int n_agents);

Scenario synthesize_scenario(int n_agents, int days, std::uint64_t seed, const ProfileShape& shape = {});

// Reads a scenario directory (scenario.json + CSVs) or an explicit scenario.json path.
Scenario load_scenario(const std::filesystem::path& path);

// Writes scenario.json, load.csv, generation.csv (and wind.csv if present) into `dir`.
void write_scenario(const Scenario& scenario, const std::filesystem::path& dir);

// Same daily energy per agent, spread evenly over the day's hours.
Scenario flatten_loads(const Scenario& scenario);

} // namespace p2psim::profiles
