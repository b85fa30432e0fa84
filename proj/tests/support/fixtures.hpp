#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "p2psim/profiles.hpp"

namespace p2psim::testing {

// One farm, one day: overnight base load, two milking peaks, a PV bell.
inline profiles::Scenario learning_fixture() {
  const std::vector<double> load{2, 2, 2, 2, 2, 2, 4, 6, 5, 3, 3, 3, 3, 3, 3, 3.5, 5, 6, 5, 3, 2.5, 2.5, 2, 2};
  const std::vector<double> pv{0, 0, 0, 0, 0, 0, 0.5, 1.5, 3, 5, 6.5, 7.5, 8, 7.5, 6.5, 5, 3.5, 2, 0.8, 0, 0, 0, 0, 0};
  profiles::Scenario s;
  profiles::FarmConfig farm;
  farm.agent_id = 1;
  farm.herd_size = 50;
  farm.pv_capacity_kw = 10;
  s.fleet = {farm};
  s.loads[1] = profiles::TimeSeries(load);
  s.generation[1] = profiles::TimeSeries(pv);
  s.horizon_hours = 24;
  return s;
}

// Constant per-hour profiles for every listed agent.
inline profiles::Scenario constant_scenario(std::vector<profiles::FarmConfig> fleet, int hours, double load,
                                            double generation) {
  profiles::Scenario s;
  s.fleet = std::move(fleet);
  s.horizon_hours = hours;
  for (const auto& f : s.fleet) {
    s.loads[f.agent_id] = profiles::TimeSeries(std::vector<double>(static_cast<std::size_t>(hours), load));
    s.generation[f.agent_id] = profiles::TimeSeries(std::vector<double>(static_cast<std::size_t>(hours), generation));
  }
  return s;
}

inline profiles::FarmConfig farm(int id, bool battery = true, bool re = true) {
  profiles::FarmConfig f;
  f.agent_id = id;
  f.herd_size = 40;
  f.pv_capacity_kw = 10;
  f.has_battery = battery;
  f.has_re = re;
  return f;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("p2psim_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

} // namespace p2psim::testing
