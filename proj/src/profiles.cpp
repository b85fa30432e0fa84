#include "p2psim/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "config_json.hpp"
#include "p2psim/error.hpp"
#include "p2psim/util/csv.hpp"
#include "p2psim/util/numfmt.hpp"
#include "p2psim/util/random.hpp"

namespace p2psim::profiles {

using nlohmann::json;

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() % 24 != 0)
    throw ValidationError("time series length " + std::to_string(values_.size()) + " is not a whole number of days");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0)
      throw ValidationError("time series value at hour " + std::to_string(i) + " must be finite and >= 0");
  }
}

double TimeSeries::total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

void Scenario::validate() const {
  if (fleet.empty()) throw ValidationError("scenario: empty fleet");
  if (horizon_hours <= 0 || horizon_hours % 24 != 0)
    throw ValidationError("scenario: horizon_hours must be a positive multiple of 24");
  battery.validate();
  tariff.validate();
  std::set<AgentId> seen;
  for (const auto& farm : fleet) {
    const std::string who = "agent " + std::to_string(farm.agent_id);
    if (!seen.insert(farm.agent_id).second) throw ValidationError("scenario: duplicate agent_id " + std::to_string(farm.agent_id));
    if (farm.herd_size <= 0) throw ValidationError("scenario: " + who + " herd_size must be > 0");
    if (!(farm.pv_capacity_kw >= 0.0)) throw ValidationError("scenario: " + who + " pv_capacity_kw must be >= 0");
    if (farm.battery) farm.battery->validate();
    auto check = [&](const std::map<AgentId, TimeSeries>& series, const char* what, bool required) {
      auto it = series.find(farm.agent_id);
      if (it == series.end()) {
        if (required) throw ValidationError("scenario: " + who + " has no " + what + " series");
        return;
      }
      if (static_cast<int>(it->second.length()) != horizon_hours)
        throw ValidationError("scenario: " + who + " " + what + " length " + std::to_string(it->second.length()) +
                              " != horizon " + std::to_string(horizon_hours));
    };
    check(loads, "load", true);
    check(generation, "generation", true);
    check(wind, "wind", !wind.empty());
  }
}

const FarmConfig& Scenario::farm(AgentId id) const {
  for (const auto& f : fleet)
    if (f.agent_id == id) return f;
  throw ValidationError("unknown agent_id " + std::to_string(id));
}

double Scenario::wind_at(AgentId id, int hour) const {
  if (wind.empty()) return 0.0;
  return wind.at(id)[static_cast<std::size_t>(hour)];
}

std::vector<FarmConfig> reference_fleet(int n_agents) {
  static constexpr int kHerd[5] = {30, 40, 50, 60, 70};
  static constexpr double kPv[5] = {10.0, 10.0, 20.0, 20.0, 20.0};
  std::vector<FarmConfig> fleet;
  for (int i = 0; i < n_agents; ++i) {
    FarmConfig f;
    f.agent_id = i + 1;
    f.herd_size = kHerd[(i / 2) % 5];
    f.pv_capacity_kw = kPv[(i / 2) % 5];
    fleet.push_back(f);
  }
  return fleet;
}

namespace {

using util::Rng;
using util::mix_seed;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double bump(double hour_mid, double centre, double width) {
  const double d = hour_mid - centre;
  return std::exp(-d * d / (2.0 * width * width));
}

double load_shape(const ProfileShape& s, int hour) {
  const double mid = hour + 0.5;
  return s.base_kw_per_cow + s.morning_peak_kw_per_cow * bump(mid, s.morning_centre_h, s.peak_width_h) +
         s.evening_peak_kw_per_cow * bump(mid, s.evening_centre_h, s.peak_width_h);
}

double load_season(const ProfileShape& s, int day) {
  const int doy = day % 365;
  return 1.0 + s.load_seasonal_amplitude * std::cos(kTwoPi * (doy - 15) / 365.0);
}

double pv_shape(const ProfileShape& s, int hour) {
  const double mid = hour + 0.5;
  if (mid <= s.sunrise_h || mid >= s.sunset_h) return 0.0;
  return std::sin(std::numbers::pi * (mid - s.sunrise_h) / (s.sunset_h - s.sunrise_h));
}

double pv_season(const ProfileShape& s, int day) {
  const int doy = day % 365;
  return 1.0 + s.pv_seasonal_amplitude * std::cos(kTwoPi * (doy - 172) / 365.0);
}

} // namespace

Scenario synthesize_scenario(int n_agents, int days, std::uint64_t seed, const ProfileShape& shape) {
  if (n_agents < 1) throw ValidationError("synthesize_scenario: n_agents must be >= 1");
  if (days < 1) throw ValidationError("synthesize_scenario: days must be >= 1");
  if (!(shape.cloud_min >= 0.0 && shape.cloud_min <= 1.0) || !(shape.sunrise_h < shape.sunset_h) ||
      !(shape.pv_to_load_ratio >= 0.0) || !(shape.load_noise >= 0.0 && shape.load_noise < 1.0))
    throw ValidationError("synthesize_scenario: invalid profile shape");

  Scenario sc;
  sc.fleet = reference_fleet(n_agents);
  sc.horizon_hours = days * 24;
  sc.rng_seed = seed;

  // Noise-free annual energies per unit herd / unit PV; the PV scale is
  // calibrated on a full year so short horizons keep their seasonality.
  double annual_load_per_cow = 0.0;
  double annual_pv_raw = 0.0;
  const double mean_cloud = 0.5 * (1.0 + shape.cloud_min);
  for (int d = 0; d < 365; ++d) {
    for (int h = 0; h < 24; ++h) {
      annual_load_per_cow += load_shape(shape, h) * load_season(shape, d);
      annual_pv_raw += pv_shape(shape, h) * pv_season(shape, d) * mean_cloud;
    }
  }

  for (const auto& farm : sc.fleet) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(farm.agent_id)));
    const double ratio = shape.pv_to_load_ratio + shape.ratio_jitter * rng.uniform(-1.0, 1.0);
    const double pv_scale =
        annual_pv_raw > 0.0 ? ratio * annual_load_per_cow * farm.herd_size / annual_pv_raw : 0.0;

    std::vector<double> load(static_cast<std::size_t>(sc.horizon_hours));
    std::vector<double> pv(static_cast<std::size_t>(sc.horizon_hours));
    for (int d = 0; d < days; ++d) {
      for (int h = 0; h < 24; ++h) {
        const auto t = static_cast<std::size_t>(d * 24 + h);
        const double noise = 1.0 + shape.load_noise * rng.uniform(-1.0, 1.0);
        load[t] = std::max(shape.min_load_kwh, farm.herd_size * load_shape(shape, h) * load_season(shape, d) * noise);
        const double cloud = rng.uniform(shape.cloud_min, 1.0);
        const double raw = pv_shape(shape, h) * pv_season(shape, d) * cloud;
        pv[t] = farm.has_re ? std::min(farm.pv_capacity_kw, pv_scale * raw) : 0.0;
      }
    }
    sc.loads.emplace(farm.agent_id, TimeSeries(std::move(load)));
    sc.generation.emplace(farm.agent_id, TimeSeries(std::move(pv)));
  }
  sc.validate();
  return sc;
}

Scenario flatten_loads(const Scenario& scenario) {
  Scenario out = scenario;
  for (auto& [id, series] : out.loads) {
    std::vector<double> flat(series.length());
    for (std::size_t day = 0; day * 24 < series.length(); ++day) {
      double sum = 0.0;
      for (std::size_t h = 0; h < 24; ++h) sum += series[day * 24 + h];
      std::fill_n(flat.begin() + static_cast<std::ptrdiff_t>(day * 24), 24, sum / 24.0);
    }
    series = TimeSeries(std::move(flat));
  }
  return out;
}

// ---------------------------------------------------------------------------
// File formats

namespace {

constexpr const char* kFormatTag = "p2psim-scenario";
constexpr int kFormatVersion = 1;

std::map<AgentId, TimeSeries> read_profile_csv(const std::filesystem::path& path) {
  const auto table = util::read_csv(path);
  const std::string file = path.filename().string();
  if (table.header.empty() || table.header[0] != "hour")
    throw ValidationError(file + ": header must start with 'hour'");

  std::vector<AgentId> ids;
  std::set<AgentId> seen;
  for (std::size_t c = 1; c < table.header.size(); ++c) {
    const auto& name = table.header[c];
    if (name.rfind("agent_", 0) != 0) throw ValidationError(file + ": column " + std::to_string(c + 1) + " '" + name + "' is not agent_<id>");
    AgentId id = 0;
    try {
      id = static_cast<AgentId>(util::parse_integer(name.substr(6)));
    } catch (const ValidationError&) {
      throw ValidationError(file + ": bad agent column '" + name + "'");
    }
    if (!seen.insert(id).second) throw ValidationError(file + ": duplicate column " + name);
    ids.push_back(id);
  }

  std::vector<std::vector<double>> columns(ids.size());
  std::vector<bool> ended(ids.size(), false);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = file + ": row " + std::to_string(r);
    if (row.size() > table.header.size()) throw ValidationError(where + ": too many fields");
    long long hour = 0;
    try {
      hour = util::parse_integer(row.at(0));
    } catch (const std::exception&) {
      throw ValidationError(where + ", column hour: not an integer");
    }
    if (hour != static_cast<long long>(r))
      throw ValidationError(where + ", column hour: expected " + std::to_string(r) + ", found " + std::to_string(hour));
    for (std::size_t c = 0; c < ids.size(); ++c) {
      const std::string col = table.header[c + 1];
      const bool missing = c + 1 >= row.size() || row[c + 1].find_first_not_of(" \t") == std::string::npos;
      if (missing) {
        ended[c] = true;
        continue;
      }
      if (ended[c]) throw ValidationError(where + ", column " + col + ": value after missing entry");
      double v = 0.0;
      try {
        v = util::parse_double(row[c + 1]);
      } catch (const ValidationError&) {
        throw ValidationError(where + ", column " + col + ": not a number '" + row[c + 1] + "'");
      }
      if (!std::isfinite(v)) throw ValidationError(where + ", column " + col + ": non-finite value");
      if (v < 0.0) throw ValidationError(where + ", column " + col + ": negative value " + row[c + 1]);
      columns[c].push_back(v);
    }
  }

  const std::size_t rows = table.rows.size();
  std::map<AgentId, TimeSeries> out;
  for (std::size_t c = 0; c < ids.size(); ++c) {
    if (columns[c].size() != rows)
      throw ValidationError(file + ": length mismatch, column " + table.header[c + 1] + " has " +
                            std::to_string(columns[c].size()) + " rows, expected " + std::to_string(rows));
    if (rows % 24 != 0)
      throw ValidationError(file + ": " + std::to_string(rows) + " rows is not a whole number of days");
    out.emplace(ids[c], TimeSeries(std::move(columns[c])));
  }
  return out;
}

std::string profile_csv(const Scenario& sc, const std::map<AgentId, TimeSeries>& series) {
  std::ostringstream out;
  out << "hour";
  for (const auto& farm : sc.fleet) out << ",agent_" << farm.agent_id;
  out << '\n';
  for (int t = 0; t < sc.horizon_hours; ++t) {
    out << t;
    for (const auto& farm : sc.fleet) out << ',' << util::format_double(series.at(farm.agent_id)[static_cast<std::size_t>(t)]);
    out << '\n';
  }
  return out.str();
}

} // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  const fs::path config = fs::is_directory(path) ? path / "scenario.json" : path;
  if (!fs::exists(config)) throw ValidationError("scenario not found: " + config.string());
  const fs::path base = config.parent_path();

  Scenario sc;
  try {
    const json j = json::parse(util::read_text(config));
    if (j.value("format", std::string{}) != kFormatTag) throw ValidationError("scenario.json: missing format tag '" + std::string(kFormatTag) + "'");
    if (j.value("version", 0) != kFormatVersion) throw ValidationError("scenario.json: unsupported version");
    sc.horizon_hours = j.at("horizon_hours").get<int>();
    sc.rng_seed = j.value("rng_seed", std::uint64_t{0});
    if (j.contains("battery")) sc.battery = detail::battery_from_json(j.at("battery"), sc.battery);
    if (j.contains("tariff")) sc.tariff = detail::tariff_from_json(j.at("tariff"), sc.tariff);
    for (const auto& f : j.at("fleet")) {
      FarmConfig farm;
      farm.agent_id = f.at("agent_id").get<int>();
      farm.herd_size = f.at("herd_size").get<int>();
      farm.pv_capacity_kw = f.at("pv_capacity_kw").get<double>();
      farm.has_battery = f.value("has_battery", true);
      farm.has_re = f.value("has_re", true);
      if (f.contains("battery")) farm.battery = detail::battery_from_json(f.at("battery"), sc.battery);
      sc.fleet.push_back(farm);
    }
    const auto& p = j.at("profiles");
    sc.loads = read_profile_csv(base / p.at("load").get<std::string>());
    sc.generation = read_profile_csv(base / p.at("generation").get<std::string>());
    if (p.contains("wind")) sc.wind = read_profile_csv(base / p.at("wind").get<std::string>());
  } catch (const json::exception& e) {
    throw ValidationError(config.filename().string() + ": " + e.what());
  }
  sc.validate();
  return sc;
}

void write_scenario(const Scenario& sc, const std::filesystem::path& dir) {
  sc.validate();
  std::filesystem::create_directories(dir);
  json j;
  j["format"] = kFormatTag;
  j["version"] = kFormatVersion;
  j["horizon_hours"] = sc.horizon_hours;
  j["rng_seed"] = sc.rng_seed;
  j["battery"] = detail::battery_to_json(sc.battery);
  j["tariff"] = detail::tariff_to_json(sc.tariff);
  json fleet = json::array();
  for (const auto& f : sc.fleet) {
    json e{{"agent_id", f.agent_id}, {"herd_size", f.herd_size}, {"pv_capacity_kw", f.pv_capacity_kw},
           {"has_battery", f.has_battery}, {"has_re", f.has_re}};
    if (f.battery) e["battery"] = detail::battery_to_json(*f.battery);
    fleet.push_back(e);
  }
  j["fleet"] = fleet;
  j["profiles"] = json{{"load", "load.csv"}, {"generation", "generation.csv"}};
  if (!sc.wind.empty()) j["profiles"]["wind"] = "wind.csv";

  util::write_text_atomic(dir / "load.csv", profile_csv(sc, sc.loads));
  util::write_text_atomic(dir / "generation.csv", profile_csv(sc, sc.generation));
  if (!sc.wind.empty()) util::write_text_atomic(dir / "wind.csv", profile_csv(sc, sc.wind));
  util::write_text_atomic(dir / "scenario.json", j.dump(2) + "\n");
}

} // namespace p2psim::profiles
