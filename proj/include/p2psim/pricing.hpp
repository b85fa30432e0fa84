#pragma once

#include <vector>

namespace p2psim::pricing {

enum class Period { Night, Day, Peak };

const char* to_string(Period period);

// Half-open hour window [begin, end) within a single day.
struct HourRange {
  int begin = 0;
  int end = 0;

  bool contains(int hour) const { return hour >= begin && hour < end; }
};

// Grid billing for one hour. `near_peak` marks the night-priced pre-peak
// window that the learning environment treats as a priming opportunity; it
// never changes what the grid charges.
struct TariffSlot {
  Period period = Period::Day;
  bool near_peak = false;
  double lambda_buy = 0.0;
  double lambda_sell = 0.0;
};

struct TariffSchedule {
  double peak_price = 0.66;
  double day_price = 0.44;
  double night_price = 0.22;
  double fit_price = 0.135;
  HourRange peak_hours{17, 19};
  std::vector<HourRange> night_hours{{0, 8}, {23, 24}};
  std::vector<HourRange> near_peak_hours{{15, 17}};

  // Throws ValidationError on bad price ordering or overlapping windows.
  void validate() const;

  TariffSlot slot(int hour) const;
  double buy_price(int hour) const { return slot(hour).lambda_buy; }
};

Period tariff_period(int hour, const TariffSchedule& schedule = {});

// Supply-demand ratio of an hour. Division by zero is kept symbolic so that
// "all supply, no demand" and "nothing at all" stay distinguishable.
class Sdr {
public:
  enum class Kind { Ratio, Surplus, Idle };

  static Sdr ratio(double value);
  static Sdr surplus() { return Sdr(Kind::Surplus, 0.0); }
  static Sdr idle() { return Sdr(Kind::Idle, 0.0); }

  Kind kind() const { return kind_; }
  // Only meaningful for Kind::Ratio.
  double value() const { return value_; }
  // Surplus and ratios above one both mean sellers outnumber buyers.
  bool exceeds_one() const { return kind_ == Kind::Surplus || (kind_ == Kind::Ratio && value_ > 1.0); }

  bool operator==(const Sdr&) const = default;

private:
  Sdr(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_;
};

Sdr compute_sdr(double total_selling_kwh, double total_buying_kwh);

struct PriceQuote {
  double isp = 0.0;
  double ibp = 0.0;
  Sdr sdr = Sdr::idle();
  // False when the hour has no internal market (idle SDR).
  bool internal_market = false;
};

PriceQuote internal_prices(Sdr sdr, double lambda_buy, double lambda_sell);

// Grid prices passed straight through; what agents see before any clearing.
PriceQuote pass_through_quote(double lambda_buy, double lambda_sell);

// compute_sdr + internal_prices for the hour's tariff slot.
PriceQuote advise(double total_selling_kwh, double total_buying_kwh, const TariffSlot& slot);

} // namespace p2psim::pricing
