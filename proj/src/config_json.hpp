#pragma once

#include <json.hpp>

#include "p2psim/battery.hpp"
#include "p2psim/pricing.hpp"

namespace p2psim::detail {

// Missing keys keep the values already in `base`.
battery::BatterySpec battery_from_json(const nlohmann::json& j, battery::BatterySpec base);
nlohmann::json battery_to_json(const battery::BatterySpec& spec);

pricing::TariffSchedule tariff_from_json(const nlohmann::json& j, pricing::TariffSchedule base);
nlohmann::json tariff_to_json(const pricing::TariffSchedule& tariff);

} // namespace p2psim::detail
