#include "config_json.hpp"

#include "p2psim/error.hpp"

namespace p2psim::detail {

using nlohmann::json;

namespace {

template <class T>
void read_opt(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

pricing::HourRange range_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("tariff: hour window must be [begin, end]");
  return {j[0].get<int>(), j[1].get<int>()};
}

std::vector<pricing::HourRange> ranges_from_json(const json& j) {
  std::vector<pricing::HourRange> out;
  for (const auto& r : j) out.push_back(range_from_json(r));
  return out;
}

json ranges_to_json(const std::vector<pricing::HourRange>& rs) {
  json out = json::array();
  for (const auto& r : rs) out.push_back({r.begin, r.end});
  return out;
}

} // namespace

battery::BatterySpec battery_from_json(const json& j, battery::BatterySpec spec) {
  read_opt(j, "total_capacity_kwh", spec.total_capacity_kwh);
  read_opt(j, "max_rate_kwh_per_step", spec.max_rate_kwh_per_step);
  read_opt(j, "soc_floor_pct", spec.soc_floor_pct);
  read_opt(j, "soc_ceiling_pct", spec.soc_ceiling_pct);
  read_opt(j, "charge_target_pct", spec.charge_target_pct);
  read_opt(j, "reserve_pct", spec.reserve_pct);
  return spec;
}

json battery_to_json(const battery::BatterySpec& s) {
  return json{{"total_capacity_kwh", s.total_capacity_kwh}, {"max_rate_kwh_per_step", s.max_rate_kwh_per_step},
              {"soc_floor_pct", s.soc_floor_pct},           {"soc_ceiling_pct", s.soc_ceiling_pct},
              {"charge_target_pct", s.charge_target_pct},   {"reserve_pct", s.reserve_pct}};
}

pricing::TariffSchedule tariff_from_json(const json& t, pricing::TariffSchedule tariff) {
  read_opt(t, "peak_price", tariff.peak_price);
  read_opt(t, "day_price", tariff.day_price);
  read_opt(t, "night_price", tariff.night_price);
  read_opt(t, "fit_price", tariff.fit_price);
  if (t.contains("peak_hours")) tariff.peak_hours = range_from_json(t.at("peak_hours"));
  if (t.contains("night_hours")) tariff.night_hours = ranges_from_json(t.at("night_hours"));
  if (t.contains("near_peak_hours")) tariff.near_peak_hours = ranges_from_json(t.at("near_peak_hours"));
  return tariff;
}

json tariff_to_json(const pricing::TariffSchedule& t) {
  return json{{"peak_price", t.peak_price},
              {"day_price", t.day_price},
              {"night_price", t.night_price},
              {"fit_price", t.fit_price},
              {"peak_hours", {t.peak_hours.begin, t.peak_hours.end}},
              {"night_hours", ranges_to_json(t.night_hours)},
              {"near_peak_hours", ranges_to_json(t.near_peak_hours)}};
}

} // namespace p2psim::detail
