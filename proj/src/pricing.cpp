#include "p2psim/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "p2psim/error.hpp"

namespace p2psim::pricing {

const char* to_string(Period period) {
  switch (period) {
  case Period::Night: return "night";
  case Period::Day: return "day";
  case Period::Peak: return "peak";
  }
  return "?";
}

namespace {

void check_range(const HourRange& range, const char* what) {
  if (range.begin < 0 || range.end > 24 || range.begin >= range.end)
    throw ValidationError(std::string("tariff: bad ") + what + " window [" + std::to_string(range.begin) +
                          "," + std::to_string(range.end) + ")");
}

bool overlaps(const HourRange& a, const HourRange& b) { return a.begin < b.end && b.begin < a.end; }

} // namespace

void TariffSchedule::validate() const {
  if (!(fit_price > 0.0 && fit_price < night_price && night_price < day_price && day_price < peak_price))
    throw ValidationError("tariff: require 0 < fit < night < day < peak");
  check_range(peak_hours, "peak");
  for (const auto& r : night_hours) {
    check_range(r, "night");
    if (overlaps(r, peak_hours)) throw ValidationError("tariff: night window overlaps peak");
  }
  for (const auto& r : near_peak_hours) {
    check_range(r, "near-peak");
    if (overlaps(r, peak_hours)) throw ValidationError("tariff: near-peak window overlaps peak");
  }
}

TariffSlot TariffSchedule::slot(int hour) const {
  if (hour < 0 || hour > 23) throw ValidationError("hour out of range: " + std::to_string(hour));
  TariffSlot s;
  s.lambda_sell = fit_price;
  if (peak_hours.contains(hour)) {
    s.period = Period::Peak;
    s.lambda_buy = peak_price;
    return s;
  }
  for (const auto& r : near_peak_hours) {
    if (r.contains(hour)) {
      s.period = Period::Night;
      s.near_peak = true;
      s.lambda_buy = night_price;
      return s;
    }
  }
  for (const auto& r : night_hours) {
    if (r.contains(hour)) {
      s.period = Period::Night;
      s.lambda_buy = night_price;
      return s;
    }
  }
  s.period = Period::Day;
  s.lambda_buy = day_price;
  return s;
}

Period tariff_period(int hour, const TariffSchedule& schedule) { return schedule.slot(hour).period; }

Sdr Sdr::ratio(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) throw ValidationError("SDR must be finite and >= 0");
  return Sdr(Kind::Ratio, value);
}

Sdr compute_sdr(double tsp, double tbp) {
  if (!(tsp >= 0.0) || !(tbp >= 0.0)) throw ValidationError("compute_sdr: negative power");
  if (tbp == 0.0) return tsp > 0.0 ? Sdr::surplus() : Sdr::idle();
  return Sdr::ratio(tsp / tbp);
}

PriceQuote internal_prices(Sdr sdr, double lambda_buy, double lambda_sell) {
  if (!(lambda_sell > 0.0 && lambda_sell < lambda_buy))
    throw ValidationError("internal_prices: require 0 < lambda_sell < lambda_buy");
  PriceQuote q;
  q.sdr = sdr;
  if (sdr.kind() == Sdr::Kind::Idle) return pass_through_quote(lambda_buy, lambda_sell);
  q.internal_market = true;
  if (sdr.exceeds_one()) {
    q.isp = lambda_sell;
    q.ibp = lambda_buy;
    return q;
  }
  const double r = sdr.value();
  const double isp = lambda_sell * lambda_buy / ((lambda_buy - lambda_sell) * r + lambda_sell);
  // The exact values satisfy both bounds; clamping only absorbs rounding.
  q.isp = std::clamp(isp, lambda_sell, lambda_buy);
  q.ibp = std::clamp(q.isp * r + lambda_buy * (1.0 - r), q.isp, lambda_buy);
  return q;
}

PriceQuote pass_through_quote(double lambda_buy, double lambda_sell) {
  PriceQuote q;
  q.isp = lambda_sell;
  q.ibp = lambda_buy;
  q.sdr = Sdr::idle();
  q.internal_market = false;
  return q;
}

PriceQuote advise(double tsp, double tbp, const TariffSlot& slot) {
  return internal_prices(compute_sdr(tsp, tbp), slot.lambda_buy, slot.lambda_sell);
}

} // namespace p2psim::pricing
