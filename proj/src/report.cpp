#include "p2psim/report.hpp"

#include <sstream>

#include <json.hpp>

#include "p2psim/util/numfmt.hpp"

namespace p2psim::report {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kVersion = 1;

ordered_json provenance_json(const Provenance& p) {
  ordered_json j{{"path", p.scenario_path}, {"agents", p.agents}, {"hours", p.scenario_hours},
                 {"rng_seed", p.scenario_seed}};
  if (!p.checkpoint.empty()) j["checkpoint"] = p.checkpoint;
  return j;
}

ordered_json config_json(const sim::RunConfig& c) {
  return ordered_json{
      {"mode", sim::to_string(c.mode)},
      {"policy", sim::to_string(c.policy)},
      {"ablations", {{"advisor", c.ablations.advisor}, {"priming", c.ablations.priming}, {"dairy", c.ablations.dairy}}},
      {"horizon_hours", c.horizon_hours},
      {"seed", c.seed},
      {"strict_paper_mode", c.strict_paper_mode},
      {"retrain", c.retrain},
      {"night_precedence",
       c.rule_options.night_precedence == rulebased::NightPrecedence::ChargeFirst ? "charge_first" : "buy_first"}};
}

ordered_json kpi_json(const sim::Kpis& k) {
  return ordered_json{{"cost_eur", k.cost_eur},           {"revenue_eur", k.revenue_eur},
                      {"peak_grid_kwh", k.peak_grid_kwh}, {"grid_buy_kwh", k.grid_buy_kwh},
                      {"grid_sell_kwh", k.grid_sell_kwh}, {"p2p_buy_kwh", k.p2p_buy_kwh},
                      {"p2p_sell_kwh", k.p2p_sell_kwh}};
}

json delta_value(double value, double base) {
  const auto d = sim::percent_delta(value, base);
  return d ? json(*d) : json(nullptr);
}

std::string md_delta(double value, double base) {
  const auto d = sim::percent_delta(value, base);
  if (!d) return "n/a";
  return (*d > 0.0 ? "+" : "") + util::format_fixed(*d, 1) + "%";
}

bool same_except_mode(const sim::RunConfig& a, const sim::RunConfig& b) {
  return a.policy == b.policy && a.ablations == b.ablations && a.horizon_hours == b.horizon_hours &&
         a.seed == b.seed && a.strict_paper_mode == b.strict_paper_mode && a.retrain == b.retrain;
}

struct Pair {
  std::size_t p2p;
  std::size_t grid;
};

std::vector<Pair> mode_pairs(const sim::Comparison& c) {
  std::vector<Pair> out;
  for (std::size_t i = 0; i < c.configs.size(); ++i) {
    if (c.configs[i].config.mode != sim::Mode::P2P) continue;
    for (std::size_t j = 0; j < c.configs.size(); ++j) {
      if (c.configs[j].config.mode == sim::Mode::GridOnly && same_except_mode(c.configs[i].config, c.configs[j].config)) {
        out.push_back({i, j});
        break;
      }
    }
  }
  return out;
}

} // namespace

Provenance describe(const profiles::Scenario& scenario, std::string scenario_path, std::string checkpoint) {
  return Provenance{std::move(scenario_path), static_cast<int>(scenario.fleet.size()), scenario.horizon_hours,
                    scenario.rng_seed, std::move(checkpoint)};
}

std::string run_json(const sim::RunResult& r, const Provenance& p) {
  ordered_json j;
  j["format"] = "p2psim-run";
  j["version"] = kVersion;
  j["scenario"] = provenance_json(p);
  j["config"] = config_json(r.config);
  j["seed"] = r.config.seed;
  j["hours"] = r.ledger.hours.size();
  j["kpis"] = kpi_json(r.ledger.community);
  ordered_json agents = ordered_json::array();
  for (const auto& [id, k] : r.ledger.agents) {
    auto a = kpi_json(k);
    a["agent"] = id;
    agents.push_back(a);
  }
  j["agents"] = agents;
  j["trades"] = r.ledger.trades.size();
  return j.dump(2) + "\n";
}

std::string trace_csv(const sim::KpiLedger& ledger) {
  std::ostringstream out;
  out << "hour,agent,action,buy,sell,soc,price\n";
  for (const auto& h : ledger.trace) {
    out << h.hour << ',' << h.agent << ',' << h.action << ',' << util::format_double(h.buy_kwh) << ','
        << util::format_double(h.sell_kwh) << ',' << util::format_double(h.soc_pct) << ','
        << util::format_double(h.price) << '\n';
  }
  return out.str();
}

std::string trades_csv(const sim::KpiLedger& ledger) {
  std::ostringstream out;
  out << "hour,buyer,seller,price,quantity\n";
  for (const auto& t : ledger.trades) {
    out << t.hour << ',' << t.buyer_id << ',' << t.seller_id << ',' << util::format_double(t.price) << ','
        << util::format_double(t.quantity) << '\n';
  }
  return out.str();
}

std::string run_markdown(const sim::RunResult& r) {
  const auto& k = r.ledger.community;
  std::ostringstream out;
  out << "| KPI | " << sim::to_string(r.config.mode) << " |\n|---|---:|\n";
  out << "| Cost of buying (EUR) | " << util::format_fixed(k.cost_eur, 2) << " |\n";
  out << "| Revenue from selling (EUR) | " << util::format_fixed(k.revenue_eur, 2) << " |\n";
  out << "| Peak hour grid demand (kWh) | " << util::format_fixed(k.peak_grid_kwh, 2) << " |\n";
  return out.str();
}

std::string compare_json(const sim::Comparison& c, const Provenance& p) {
  ordered_json j;
  j["format"] = "p2psim-compare";
  j["version"] = kVersion;
  j["scenario"] = provenance_json(p);
  j["seed"] = c.configs.front().config.seed;
  ordered_json runs = ordered_json::array();
  for (std::size_t i = 0; i < c.configs.size(); ++i) {
    runs.push_back(ordered_json{{"label", c.configs[i].label},
                                {"config", config_json(c.configs[i].config)},
                                {"kpis", kpi_json(c.results[i].ledger.community)}});
  }
  j["runs"] = runs;

  const auto& base = c.results.front().ledger.community;
  ordered_json deltas = ordered_json::array();
  for (std::size_t i = 0; i < c.configs.size(); ++i) {
    const auto& k = c.results[i].ledger.community;
    deltas.push_back(ordered_json{{"label", c.configs[i].label},
                                  {"baseline", c.configs.front().label},
                                  {"cost_pct", delta_value(k.cost_eur, base.cost_eur)},
                                  {"revenue_pct", delta_value(k.revenue_eur, base.revenue_eur)},
                                  {"peak_pct", delta_value(k.peak_grid_kwh, base.peak_grid_kwh)}});
  }
  j["deltas"] = deltas;

  ordered_json pairs = ordered_json::array();
  for (const auto& pr : mode_pairs(c)) {
    const auto& a = c.results[pr.p2p].ledger.community;
    const auto& g = c.results[pr.grid].ledger.community;
    pairs.push_back(ordered_json{{"p2p", c.configs[pr.p2p].label},
                                 {"gridonly", c.configs[pr.grid].label},
                                 {"cost_pct", delta_value(a.cost_eur, g.cost_eur)},
                                 {"revenue_pct", delta_value(a.revenue_eur, g.revenue_eur)},
                                 {"peak_pct", delta_value(a.peak_grid_kwh, g.peak_grid_kwh)}});
  }
  j["p2p_vs_gridonly"] = pairs;
  return j.dump(2) + "\n";
}

std::string compare_markdown(const sim::Comparison& c) {
  std::ostringstream out;
  const auto pairs = mode_pairs(c);
  for (const auto& pr : pairs) {
    const auto& a = c.results[pr.p2p].ledger.community;
    const auto& g = c.results[pr.grid].ledger.community;
    out << "### " << c.configs[pr.p2p].label << " vs " << c.configs[pr.grid].label << "\n\n";
    out << "| KPI | With P2P | Without P2P | Difference |\n|---|---:|---:|---:|\n";
    out << "| Cost of buying (EUR) | " << util::format_fixed(a.cost_eur, 2) << " | " << util::format_fixed(g.cost_eur, 2)
        << " | " << md_delta(a.cost_eur, g.cost_eur) << " |\n";
    out << "| Revenue from selling (EUR) | " << util::format_fixed(a.revenue_eur, 2) << " | "
        << util::format_fixed(g.revenue_eur, 2) << " | " << md_delta(a.revenue_eur, g.revenue_eur) << " |\n";
    out << "| Peak hour grid demand (kWh) | " << util::format_fixed(a.peak_grid_kwh, 2) << " | "
        << util::format_fixed(g.peak_grid_kwh, 2) << " | " << md_delta(a.peak_grid_kwh, g.peak_grid_kwh) << " |\n\n";
  }

  const auto& base = c.results.front().ledger.community;
  out << "### All runs (difference vs " << c.configs.front().label << ")\n\n";
  out << "| Run | Cost (EUR) | Revenue (EUR) | Peak grid (kWh) | Cost diff | Revenue diff | Peak diff |\n";
  out << "|---|---:|---:|---:|---:|---:|---:|\n";
  for (std::size_t i = 0; i < c.configs.size(); ++i) {
    const auto& k = c.results[i].ledger.community;
    out << "| " << c.configs[i].label << " | " << util::format_fixed(k.cost_eur, 2) << " | "
        << util::format_fixed(k.revenue_eur, 2) << " | " << util::format_fixed(k.peak_grid_kwh, 2) << " | "
        << md_delta(k.cost_eur, base.cost_eur) << " | " << md_delta(k.revenue_eur, base.revenue_eur) << " | "
        << md_delta(k.peak_grid_kwh, base.peak_grid_kwh) << " |\n";
  }
  return out.str();
}

} // namespace p2psim::report
