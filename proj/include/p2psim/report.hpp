#pragma once

#include <cstdint>
#include <string>

#include "p2psim/sim.hpp"

namespace p2psim::report {

// Reproducibility header shared by every artifact.
struct Provenance {
  std::string scenario_path;
  int agents = 0;
  int scenario_hours = 0;
  std::uint64_t scenario_seed = 0;
  // Checkpoint the learned policy came from, if any.
  std::string checkpoint;
};

Provenance describe(const profiles::Scenario& scenario, std::string scenario_path, std::string checkpoint = {});

std::string run_json(const sim::RunResult& result, const Provenance& provenance);
// hour,agent,action,buy,sell,soc,price
std::string trace_csv(const sim::KpiLedger& ledger);
// hour,buyer,seller,price,quantity
std::string trades_csv(const sim::KpiLedger& ledger);
std::string run_markdown(const sim::RunResult& result);

std::string compare_json(const sim::Comparison& comparison, const Provenance& provenance);
std::string compare_markdown(const sim::Comparison& comparison);

} // namespace p2psim::report
