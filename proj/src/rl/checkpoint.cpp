#include "p2psim/rl/checkpoint.hpp"

#include <sstream>

#include <json.hpp>

#include "../config_json.hpp"
#include "p2psim/error.hpp"
#include "p2psim/util/csv.hpp"
#include "p2psim/util/numfmt.hpp"

namespace p2psim::rl {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "p2psim-policy";
constexpr int kVersion = 1;

json header(const std::string& algo, const CheckpointMeta& meta) {
  return json{{"format", kFormat}, {"version", kVersion}, {"algo", algo},
              {"seed", meta.seed}, {"priming", meta.priming}, {"timesteps", meta.timesteps}};
}

json network_to_json(const ScaledNetwork& n) {
  return json{{"sizes", n.net.sizes()}, {"activation", to_string(n.net.activation())},
              {"scale", n.scale}, {"params", n.net.params()}};
}

ScaledNetwork network_from_json(const json& j) {
  ScaledNetwork n{Mlp::zeros(j.at("sizes").get<std::vector<int>>(),
                             activation_from_string(j.at("activation").get<std::string>())),
                  j.at("scale").get<std::vector<double>>()};
  const auto params = j.at("params").get<std::vector<double>>();
  if (params.size() != n.net.param_count())
    throw ValidationError("checkpoint: parameter count " + std::to_string(params.size()) + " does not match architecture (" +
                          std::to_string(n.net.param_count()) + ")");
  if (static_cast<int>(n.scale.size()) != n.net.input_size()) throw ValidationError("checkpoint: scale length mismatch");
  n.net.params() = params;
  return n;
}

void write(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  util::write_text_atomic(path, j.dump() + "\n");
}

} // namespace

void save_qtable(const std::filesystem::path& path, const QTablePolicy& policy, const CheckpointMeta& meta) {
  json j = header("qtable", meta);
  const auto& d = policy.discretizer();
  j["discretizer"] = json{{"max_energy_kwh", d.max_energy_kwh()},
                          {"balance_tolerance_kwh", d.options().balance_tolerance_kwh},
                          {"priming", d.options().priming},
                          {"battery", detail::battery_to_json(d.options().battery)},
                          {"tariff", detail::tariff_to_json(d.options().tariff)}};
  j["action_count"] = policy.table().action_count();
  json entries = json::array();
  for (const auto& [key, values] : policy.table().entries()) entries.push_back(json{{"state", key}, {"q", values}});
  j["table"] = entries;
  write(path, j);
}

void save_dqn(const std::filesystem::path& path, const ScaledNetwork& network, const CheckpointMeta& meta) {
  json j = header("dqn", meta);
  j["q_network"] = network_to_json(network);
  write(path, j);
}

void save_ppo(const std::filesystem::path& path, const ScaledNetwork& actor, const ScaledNetwork* critic,
              const CheckpointMeta& meta) {
  json j = header("ppo", meta);
  j["actor"] = network_to_json(actor);
  if (critic) j["critic"] = network_to_json(*critic);
  write(path, j);
}

LoadedPolicy load_policy(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ValidationError("checkpoint not found: " + path.string());
  LoadedPolicy out;
  try {
    const json j = json::parse(util::read_text(path));
    if (j.value("format", std::string{}) != kFormat) throw ValidationError("not a policy checkpoint");
    if (j.value("version", 0) != kVersion) throw ValidationError("unsupported checkpoint version");
    out.meta.seed = j.value("seed", std::uint64_t{0});
    out.meta.priming = j.value("priming", true);
    out.meta.timesteps = j.value("timesteps", 0L);
    const auto algo = j.at("algo").get<std::string>();
    if (algo == "qtable") {
      const auto& d = j.at("discretizer");
      env::EnvOptions opts;
      opts.battery = detail::battery_from_json(d.at("battery"), opts.battery);
      opts.tariff = detail::tariff_from_json(d.at("tariff"), opts.tariff);
      opts.priming = d.at("priming").get<bool>();
      opts.balance_tolerance_kwh = d.at("balance_tolerance_kwh").get<double>();
      QTable table(j.at("action_count").get<int>());
      for (const auto& e : j.at("table")) {
        const auto key = e.at("state").get<StateKey>();
        const auto q = e.at("q").get<std::vector<double>>();
        if (static_cast<int>(q.size()) != table.action_count()) throw ValidationError("q-table row has the wrong width");
        for (int a = 0; a < table.action_count(); ++a) table.set(key, a, q[static_cast<std::size_t>(a)]);
      }
      out.policy = std::make_unique<QTablePolicy>(std::move(table),
                                                  CommunityDiscretizer(d.at("max_energy_kwh").get<double>(), opts));
    } else if (algo == "dqn") {
      out.policy = std::make_unique<QNetworkPolicy>(network_from_json(j.at("q_network")));
    } else if (algo == "ppo") {
      std::optional<ScaledNetwork> critic;
      if (j.contains("critic")) critic = network_from_json(j.at("critic"));
      out.policy = std::make_unique<ActorPolicy>(network_from_json(j.at("actor")), std::move(critic));
    } else {
      throw ValidationError("unknown algo '" + algo + "'");
    }
  } catch (const json::exception& e) {
    throw ValidationError(path.filename().string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.filename().string() + ": " + e.what());
  }
  return out;
}

void write_learning_curve(const std::filesystem::path& path, const LearningCurve& curve) {
  std::ostringstream out;
  out << "episode,mean_reward\n";
  for (const auto& e : curve) out << e.episode << ',' << util::format_double(e.mean_reward) << '\n';
  util::write_text_atomic(path, out.str());
}

} // namespace p2psim::rl
