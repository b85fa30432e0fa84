#include <gtest/gtest.h>

#include <fstream>

#include "fixtures.hpp"
#include "p2psim/error.hpp"
#include "p2psim/profiles.hpp"

using namespace p2psim;
using namespace p2psim::profiles;
using p2psim::testing::TempDir;

namespace {

Scenario two_farms_two_days() {
  Scenario s = synthesize_scenario(2, 2, 9);
  return s;
}

std::string expect_validation_error(const std::filesystem::path& p) {
  try {
    load_scenario(p);
  } catch (const ValidationError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ValidationError";
  return {};
}

void rewrite_load_csv(const std::filesystem::path& dir, int rows, int bad_row = -1) {
  std::ofstream out(dir / "load.csv");
  out << "hour,agent_1,agent_2\n";
  for (int h = 0; h < rows; ++h) out << h << ",1.5," << (h == bad_row ? "-0.1" : "2.0") << "\n";
}

} // namespace

TEST(Profiles, WriteThenLoadRoundTrips) {
  TempDir dir("roundtrip");
  const Scenario s = two_farms_two_days();
  ASSERT_EQ(s.horizon_hours, 48);
  write_scenario(s, dir.path());
  const Scenario back = load_scenario(dir.path());
  EXPECT_EQ(back.horizon_hours, 48);
  ASSERT_EQ(back.fleet.size(), 2u);
  EXPECT_EQ(back.fleet[1].herd_size, s.fleet[1].herd_size);
  EXPECT_EQ(back.rng_seed, 9u);
  for (AgentId id : {1, 2}) {
    EXPECT_EQ(back.loads.at(id), s.loads.at(id));
    EXPECT_EQ(back.generation.at(id), s.generation.at(id));
  }
  EXPECT_DOUBLE_EQ(back.tariff.peak_price, 0.66);
  EXPECT_DOUBLE_EQ(back.battery.total_capacity_kwh, 13.5);
}

TEST(Profiles, NegativeValueNamesRowAndColumn) {
  TempDir dir("negative");
  write_scenario(two_farms_two_days(), dir.path());
  rewrite_load_csv(dir.path(), 48, 7);
  const std::string msg = expect_validation_error(dir.path());
  EXPECT_NE(msg.find("row 7"), std::string::npos) << msg;
  EXPECT_NE(msg.find("agent_2"), std::string::npos) << msg;
}

TEST(Profiles, ShortSeriesIsALengthMismatch) {
  TempDir dir("short");
  write_scenario(two_farms_two_days(), dir.path());
  rewrite_load_csv(dir.path(), 47);
  const std::string msg = expect_validation_error(dir.path());
  EXPECT_FALSE(msg.empty());
}

TEST(Profiles, MissingScenarioIsReported) {
  TempDir dir("missing");
  EXPECT_THROW(load_scenario(dir.path() / "nope"), ValidationError);
}

TEST(Profiles, DuplicateAgentIsRejected) {
  Scenario s = two_farms_two_days();
  s.fleet[1].agent_id = 1;
  EXPECT_THROW(s.validate(), ValidationError);
}

TEST(Profiles, HorizonMismatchIsRejected) {
  Scenario s = two_farms_two_days();
  s.horizon_hours = 24;
  EXPECT_THROW(s.validate(), ValidationError);
}

TEST(Profiles, SynthIsDeterministicPerSeed) {
  const Scenario a = synthesize_scenario(3, 7, 42);
  const Scenario b = synthesize_scenario(3, 7, 42);
  const Scenario c = synthesize_scenario(3, 7, 43);
  EXPECT_EQ(a.loads, b.loads);
  EXPECT_EQ(a.generation, b.generation);
  EXPECT_NE(a.loads, c.loads);
}

TEST(Profiles, SynthYearMatchesDairyShape) {
  const Scenario s = synthesize_scenario(10, 365, 1);
  ASSERT_EQ(s.horizon_hours, 8760);
  for (const auto& f : s.fleet) {
    const double ratio = s.generation.at(f.agent_id).total() / s.loads.at(f.agent_id).total();
    EXPECT_GE(ratio, 0.35) << "agent " << f.agent_id;
    EXPECT_LE(ratio, 0.55) << "agent " << f.agent_id;
    const auto& pv = s.generation.at(f.agent_id);
    const auto& load = s.loads.at(f.agent_id);
    for (int d = 0; d < 365; ++d) {
      EXPECT_EQ(pv[static_cast<std::size_t>(d * 24)], 0.0);
      // Milking peak above the overnight base.
      EXPECT_GT(load[static_cast<std::size_t>(d * 24 + 7)], load[static_cast<std::size_t>(d * 24 + 2)]);
    }
    for (double v : load.values()) EXPECT_GE(v, 0.0);
  }
}

TEST(Profiles, ReferenceFleetRepeatsHerdsAndPv) {
  const auto fleet = reference_fleet(12);
  ASSERT_EQ(fleet.size(), 12u);
  EXPECT_EQ(fleet[0].herd_size, 30);
  EXPECT_EQ(fleet[9].herd_size, 70);
  EXPECT_DOUBLE_EQ(fleet[9].pv_capacity_kw, 20.0);
  EXPECT_EQ(fleet[10].herd_size, 30);
}

TEST(Profiles, FlattenKeepsDailyEnergy) {
  const Scenario s = synthesize_scenario(2, 3, 5);
  const Scenario flat = flatten_loads(s);
  for (const auto& [id, series] : s.loads) {
    for (int d = 0; d < 3; ++d) {
      double a = 0.0, b = 0.0;
      for (int h = 0; h < 24; ++h) {
        a += series[static_cast<std::size_t>(d * 24 + h)];
        b += flat.loads.at(id)[static_cast<std::size_t>(d * 24 + h)];
      }
      EXPECT_NEAR(a, b, 1e-9);
      EXPECT_DOUBLE_EQ(flat.loads.at(id)[static_cast<std::size_t>(d * 24)],
                       flat.loads.at(id)[static_cast<std::size_t>(d * 24 + 18)]);
    }
  }
}
