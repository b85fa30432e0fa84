#include "p2psim/sim.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "p2psim/env.hpp"
#include "p2psim/error.hpp"
#include "p2psim/rl/checkpoint.hpp"
#include "p2psim/rl/dqn.hpp"
#include "p2psim/rl/ppo.hpp"
#include "p2psim/rl/qtable.hpp"
#include "p2psim/rl/training_env.hpp"

namespace p2psim::sim {

const char* to_string(Mode mode) { return mode == Mode::P2P ? "p2p" : "gridonly"; }

const char* to_string(PolicyKind kind) {
  switch (kind) {
  case PolicyKind::RuleBased: return "rulebased";
  case PolicyKind::QTable: return "qtable";
  case PolicyKind::Dqn: return "dqn";
  case PolicyKind::Ppo: return "ppo";
  }
  return "?";
}

Mode mode_from_string(const std::string& name) {
  if (name == "p2p") return Mode::P2P;
  if (name == "gridonly") return Mode::GridOnly;
  throw ValidationError("unknown mode '" + name + "' (expected p2p or gridonly)");
}

PolicyKind policy_from_string(const std::string& name) {
  if (name == "rulebased") return PolicyKind::RuleBased;
  if (name == "qtable") return PolicyKind::QTable;
  if (name == "dqn") return PolicyKind::Dqn;
  if (name == "ppo") return PolicyKind::Ppo;
  throw ValidationError("unknown policy '" + name + "' (expected rulebased, qtable, dqn or ppo)");
}

profiles::Scenario apply_ablations(const profiles::Scenario& scenario, const Ablations& ablations) {
  return ablations.dairy ? scenario : profiles::flatten_loads(scenario);
}

namespace {

struct AgentFlow {
  std::string action;
  double buy = 0.0;
  double sell = 0.0;
  double charge = 0.0;
  double discharge = 0.0;
  double curtailed = 0.0;
  double generation = 0.0;
  double load = 0.0;
};

std::string rule_label(const rulebased::RuleDecision& d) {
  if (d.battery_in_kwh > 0.0 && d.battery_out_kwh > 0.0) return "rule_cycle";
  if (d.battery_in_kwh > 0.0) return "rule_charge";
  if (d.battery_out_kwh > 0.0) return "rule_discharge";
  return "rule_idle";
}

void add(Kpis& into, const Kpis& k) {
  into.cost_eur += k.cost_eur;
  into.revenue_eur += k.revenue_eur;
  into.peak_grid_kwh += k.peak_grid_kwh;
  into.grid_buy_kwh += k.grid_buy_kwh;
  into.grid_sell_kwh += k.grid_sell_kwh;
  into.p2p_buy_kwh += k.p2p_buy_kwh;
  into.p2p_sell_kwh += k.p2p_sell_kwh;
}

} // namespace

RunResult run(const profiles::Scenario& base_scenario, const RunConfig& config, const rl::Policy* policy) {
  const auto scenario = apply_ablations(base_scenario, config.ablations);
  scenario.validate();
  const int horizon = config.horizon_hours <= 0 ? scenario.horizon_hours : config.horizon_hours;
  if (horizon > scenario.horizon_hours)
    throw ValidationError("run: horizon of " + std::to_string(horizon) + " hours exceeds the scenario's " +
                          std::to_string(scenario.horizon_hours));
  const bool learned = config.policy != PolicyKind::RuleBased;
  if (learned && policy == nullptr)
    throw ValidationError(std::string("run: policy '") + to_string(config.policy) + "' needs a trained checkpoint");

  const std::size_t n = scenario.fleet.size();
  std::vector<battery::BatteryState> states(n);
  std::vector<env::EnvOptions> options(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& farm = scenario.fleet[i];
    if (learned && !farm.has_battery)
      throw ValidationError("run: learned policies need a battery on every farm (agent " +
                            std::to_string(farm.agent_id) + ")");
    options[i].battery = scenario.battery_for(farm);
    options[i].tariff = scenario.tariff;
    options[i].priming = config.ablations.priming;
  }

  RunResult result;
  result.config = config;
  auto& ledger = result.ledger;
  for (const auto& farm : scenario.fleet) ledger.agents[farm.agent_id] = Kpis{};
  ledger.cumulative.reserve(static_cast<std::size_t>(horizon));
  ledger.hours.reserve(static_cast<std::size_t>(horizon));
  ledger.trace.reserve(static_cast<std::size_t>(horizon) * n);

  const auto first = scenario.tariff.slot(0);
  pricing::PriceQuote previous = pricing::pass_through_quote(first.lambda_buy, first.lambda_sell);
  std::vector<AgentFlow> flows(n);
  std::vector<Kpis> hour_kpis(n);
  const market::ClearingOptions clearing{config.strict_paper_mode};

  for (int t = 0; t < horizon; ++t) {
    const int hour = t % 24;
    const auto slot = scenario.tariff.slot(hour);
    HourSummary summary;
    summary.hour = t;

    // (1) agent decisions
    for (std::size_t i = 0; i < n; ++i) {
      const auto& farm = scenario.fleet[i];
      const auto& spec = options[i].battery;
      const double load = scenario.loads.at(farm.agent_id)[static_cast<std::size_t>(t)];
      const double pv = farm.has_re ? scenario.generation.at(farm.agent_id)[static_cast<std::size_t>(t)] : 0.0;
      const double wind = farm.has_re ? scenario.wind_at(farm.agent_id, t) : 0.0;
      AgentFlow f;
      f.load = load;
      f.generation = pv + wind;
      if (!learned) {
        const auto d = rulebased::decide(farm, pv, wind, load, states[i], slot.period, spec, config.rule_options);
        if (farm.has_battery) states[i] = rulebased::apply_decision(states[i], d, spec);
        f.action = rule_label(d);
        f.buy = d.buy_kwh;
        f.sell = d.sell_kwh;
        f.charge = d.battery_in_kwh;
        f.discharge = d.battery_out_kwh;
      } else {
        const env::Observation obs{load, pv + wind, states[i].soc_pct, hour, previous.isp, previous.ibp};
        const auto raw = obs.to_array();
        const auto action = env::action_from_index(policy->act(raw));
        const auto outcome = env::transition(obs, action, options[i]);
        states[i].soc_pct = outcome.new_soc;
        f.action = env::to_string(action);
        f.buy = outcome.total_buy_kwh();
        f.sell = outcome.sell_kwh;
        f.charge = outcome.charge_kwh;
        f.discharge = outcome.discharge_kwh;
        f.curtailed = outcome.curtailed_kwh;
      }
      flows[i] = std::move(f);
    }

    // (2) advisor quote from intended flows
    double tsp = 0.0;
    double tbp = 0.0;
    for (const auto& f : flows) {
      tsp += f.sell;
      tbp += f.buy;
    }
    const auto quote = pricing::advise(tsp, tbp, slot);
    summary.quote = quote;

    // (3)-(4) orders and clearing, or straight grid settlement
    for (auto& k : hour_kpis) k = Kpis{};
    if (config.mode == Mode::P2P) {
      const auto t0 = std::chrono::steady_clock::now();
      std::vector<market::Position> positions(n);
      for (std::size_t i = 0; i < n; ++i) positions[i] = {scenario.fleet[i].agent_id, flows[i].buy, flows[i].sell};
      const auto orders = config.ablations.advisor ? market::default_orders(positions, quote)
                                                   : market::grid_priced_orders(positions, slot);
      market::OrderBook book(slot);
      book.add(orders);
      auto settlement = market::clear(book, t, clearing);
      result.clearing_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      std::map<profiles::AgentId, std::size_t> index;
      for (std::size_t i = 0; i < n; ++i) index[scenario.fleet[i].agent_id] = i;
      for (const auto& [id, q] : settlement.grid_buys) {
        auto& k = hour_kpis[index.at(id)];
        k.grid_buy_kwh += q;
        k.cost_eur += q * slot.lambda_buy;
      }
      for (const auto& [id, q] : settlement.grid_sells) {
        auto& k = hour_kpis[index.at(id)];
        k.grid_sell_kwh += q;
        k.revenue_eur += q * slot.lambda_sell;
      }
      for (const auto& tr : settlement.trades) {
        auto& b = hour_kpis[index.at(tr.buyer_id)];
        auto& s = hour_kpis[index.at(tr.seller_id)];
        b.p2p_buy_kwh += tr.quantity;
        s.p2p_sell_kwh += tr.quantity;
        b.cost_eur += tr.quantity * (config.ablations.advisor ? tr.price : slot.lambda_buy);
        s.revenue_eur += tr.quantity * (config.ablations.advisor ? tr.price : slot.lambda_sell);
        summary.p2p_kwh += tr.quantity;
      }
      ledger.trades.insert(ledger.trades.end(), settlement.trades.begin(), settlement.trades.end());
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        auto& k = hour_kpis[i];
        k.grid_buy_kwh = flows[i].buy;
        k.grid_sell_kwh = flows[i].sell;
        k.cost_eur = flows[i].buy * slot.lambda_buy;
        k.revenue_eur = flows[i].sell * slot.lambda_sell;
      }
    }

    // (5) ledger
    for (std::size_t i = 0; i < n; ++i) {
      auto& k = hour_kpis[i];
      if (slot.period == pricing::Period::Peak) k.peak_grid_kwh = k.grid_buy_kwh;
      const auto& f = flows[i];
      add(ledger.agents[scenario.fleet[i].agent_id], k);
      add(ledger.community, k);
      double price = slot.lambda_buy;
      if (f.buy > 0.0) price = k.cost_eur / f.buy;
      else if (f.sell > 0.0) price = k.revenue_eur / f.sell;
      ledger.trace.push_back({t, scenario.fleet[i].agent_id, f.action, f.buy, f.sell, states[i].soc_pct, price});
      summary.load_kwh += f.load;
      summary.generation_kwh += f.generation;
      summary.curtailed_kwh += f.curtailed;
      summary.charge_kwh += f.charge;
      summary.discharge_kwh += f.discharge;
      summary.buy_kwh += f.buy;
      summary.sell_kwh += f.sell;
    }
    ledger.cumulative.push_back(ledger.community);
    ledger.hours.push_back(summary);
    previous = quote;
  }
  return result;
}

TrainedPolicy train_policy(const profiles::Scenario& scenario, const TrainSpec& spec) {
  if (spec.timesteps <= 0) throw ValidationError("train: timesteps must be positive");
  rl::TrainingEnvConfig env_config;
  env_config.episode_hours = spec.episode_hours;
  env_config.priming = spec.priming;
  env_config.seed = spec.seed;
  rl::CommunityTrainingEnv env(scenario, env_config);
  TrainedPolicy out;
  switch (spec.algo) {
  case PolicyKind::QTable: {
    rl::QLearningConfig cfg;
    cfg.seed = spec.seed;
    const long per_episode = static_cast<long>(spec.episode_hours) * env.num_envs();
    cfg.episodes = static_cast<int>(std::max(1L, spec.timesteps / per_episode));
    if (spec.learning_rate) cfg.alpha = *spec.learning_rate;
    rl::CommunityDiscretizer discretizer(env.max_energy_kwh(), env.options());
    auto r = rl::q_learning_train(env, discretizer, cfg);
    out.policy = std::make_shared<rl::QTablePolicy>(std::move(r.table), discretizer);
    out.curve = std::move(r.curve);
    break;
  }
  case PolicyKind::Dqn: {
    rl::DqnConfig cfg;
    cfg.total_timesteps = spec.timesteps;
    cfg.seed = spec.seed;
    if (spec.learning_rate) cfg.learning_rate = *spec.learning_rate;
    auto r = rl::dqn_train(env, cfg);
    out.policy = std::make_shared<rl::QNetworkPolicy>(std::move(r.network));
    out.curve = std::move(r.curve);
    break;
  }
  case PolicyKind::Ppo: {
    rl::PpoConfig cfg;
    cfg.total_timesteps = spec.timesteps;
    cfg.seed = spec.seed;
    if (spec.learning_rate) cfg.learning_rate = *spec.learning_rate;
    auto r = rl::ppo_train(env, cfg);
    out.policy = std::make_shared<rl::ActorPolicy>(std::move(r.actor), std::move(r.critic));
    out.curve = std::move(r.curve);
    break;
  }
  case PolicyKind::RuleBased:
    throw ValidationError("train: the rule-based policy is not trainable");
  }
  return out;
}

void save_policy(const std::filesystem::path& path, const rl::Policy& policy, std::uint64_t seed, bool priming,
                 long timesteps) {
  const rl::CheckpointMeta meta{seed, priming, timesteps};
  if (const auto* q = dynamic_cast<const rl::QTablePolicy*>(&policy)) return rl::save_qtable(path, *q, meta);
  if (const auto* d = dynamic_cast<const rl::QNetworkPolicy*>(&policy)) return rl::save_dqn(path, d->network(), meta);
  if (const auto* p = dynamic_cast<const rl::ActorPolicy*>(&policy)) {
    const auto& critic = p->critic();
    return rl::save_ppo(path, p->actor(), critic ? &*critic : nullptr, meta);
  }
  throw ValidationError("save_policy: unsupported policy type");
}

Comparison compare(const profiles::Scenario& scenario, const std::vector<LabelledConfig>& configs, int jobs,
                   const PolicyProvider& provider) {
  if (configs.empty()) throw ValidationError("compare: no configurations");
  Comparison out;
  out.configs = configs;
  out.results.resize(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        const auto& cfg = configs[i].config;
        std::shared_ptr<const rl::Policy> policy;
        if (cfg.policy != PolicyKind::RuleBased) {
          if (!provider) throw ValidationError("compare: learned policy requested without a policy source");
          policy = provider(cfg);
        }
        out.results[i] = run(scenario, cfg, policy.get());
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::optional<double> percent_delta(double value, double base) {
  if (base == 0.0) {
    if (value == 0.0) return 0.0;
    return std::nullopt;
  }
  return (value - base) / std::abs(base) * 100.0;
}

} // namespace p2psim::sim
