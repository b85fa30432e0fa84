#include <CLI11.hpp>
#include <json.hpp>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "p2psim/error.hpp"
#include "p2psim/profiles.hpp"
#include "p2psim/report.hpp"
#include "p2psim/rl/checkpoint.hpp"
#include "p2psim/sim.hpp"

namespace fs = std::filesystem;
using namespace p2psim;

namespace {

enum ExitCode { kOk = 0, kRuntime = 1, kUsage = 2, kValidation = 3 };

enum class Level { Error, Warn, Info, Debug };

Level log_level() {
  const char* v = std::getenv("P2PSIM_LOG_LEVEL");
  const std::string s = v ? v : "warn";
  if (s == "error") return Level::Error;
  if (s == "info") return Level::Info;
  if (s == "debug") return Level::Debug;
  return Level::Warn;
}

void log(Level level, const std::string& msg) {
  static const Level threshold = log_level();
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (level <= threshold) std::cerr << "p2psim: " << names[static_cast<int>(level)] << ": " << msg << "\n";
}

// Collects a command's artifacts in a hidden sibling directory and moves them
// into place only once everything has been written.
class Staging {
public:
  explicit Staging(fs::path out) : out_(std::move(out)) {
    if (out_.empty()) throw ValidationError("--out must not be empty");
    const fs::path parent = out_.has_parent_path() ? out_.parent_path() : fs::path(".");
    tmp_ = parent / ("." + out_.filename().string() + ".partial-" + std::to_string(::getpid()));
    fs::remove_all(tmp_);
    fs::create_directories(tmp_);
  }
  ~Staging() {
    std::error_code ec;
    fs::remove_all(tmp_, ec);
  }
  Staging(const Staging&) = delete;
  Staging& operator=(const Staging&) = delete;

  const fs::path& dir() const { return tmp_; }

  void write(const std::string& name, const std::string& contents) {
    std::ofstream f(tmp_ / name, std::ios::binary);
    f << contents;
    if (!f) throw RuntimeFailure("cannot write " + (tmp_ / name).string());
  }

  void commit() {
    fs::create_directories(out_);
    for (const auto& entry : fs::directory_iterator(tmp_)) fs::rename(entry.path(), out_ / entry.path().filename());
    fs::remove_all(tmp_);
  }

private:
  fs::path out_;
  fs::path tmp_;
};

sim::Ablations parse_ablations(const std::vector<std::string>& names) {
  sim::Ablations a;
  for (const auto& n : names) {
    if (n == "advisor") a.advisor = false;
    else if (n == "priming") a.priming = false;
    else if (n == "dairy") a.dairy = false;
    else throw ValidationError("unknown ablation '" + n + "'");
  }
  return a;
}

std::string ablation_suffix(const sim::Ablations& a) {
  std::string s;
  if (!a.advisor) s += "/no_advisor";
  if (!a.priming) s += "/no_priming";
  if (!a.dairy) s += "/no_dairy";
  return s;
}

profiles::Scenario load(const std::string& path) {
  log(Level::Info, "loading scenario " + path);
  return profiles::load_scenario(path);
}

struct SynthArgs {
  int agents = 10;
  int days = 365;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_synth(const SynthArgs& a) {
  const auto scenario = profiles::synthesize_scenario(a.agents, a.days, a.seed);
  Staging stage(a.out);
  profiles::write_scenario(scenario, stage.dir());
  stage.commit();
  log(Level::Info, "wrote scenario to " + a.out);
  return kOk;
}

int cmd_validate(const std::string& path) {
  const auto s = load(path);
  std::cout << "ok: " << s.fleet.size() << " agents, " << s.horizon_hours << " hours\n";
  return kOk;
}

struct TrainArgs {
  std::string scenario;
  std::string algo;
  std::uint64_t seed = 0;
  long timesteps = 120000;
  int episode_hours = 24;
  std::optional<double> learning_rate;
  std::vector<std::string> ablate;
  std::string out;
};

int cmd_train(const TrainArgs& a) {
  const auto ablations = parse_ablations(a.ablate);
  if (!ablations.advisor) log(Level::Warn, "the advisor ablation does not change training; ignored");
  const auto scenario = sim::apply_ablations(load(a.scenario), ablations);
  sim::TrainSpec spec;
  spec.algo = sim::policy_from_string(a.algo);
  spec.timesteps = a.timesteps;
  spec.episode_hours = a.episode_hours;
  spec.priming = ablations.priming;
  spec.seed = a.seed;
  spec.learning_rate = a.learning_rate;
  Staging stage(a.out);
  log(Level::Info, "training " + a.algo + " for " + std::to_string(a.timesteps) + " agent-steps");
  const auto trained = sim::train_policy(scenario, spec);
  sim::save_policy(stage.dir() / "policy.json", *trained.policy, a.seed, spec.priming, a.timesteps);
  rl::write_learning_curve(stage.dir() / "curve.csv", trained.curve);

  nlohmann::ordered_json manifest;
  manifest["format"] = "p2psim-train";
  manifest["version"] = 1;
  manifest["scenario"] = a.scenario;
  manifest["algo"] = a.algo;
  manifest["seed"] = a.seed;
  manifest["timesteps"] = a.timesteps;
  manifest["episode_hours"] = a.episode_hours;
  manifest["priming"] = spec.priming;
  manifest["dairy"] = ablations.dairy;
  manifest["learning_rate"] = a.learning_rate ? nlohmann::json(*a.learning_rate) : nlohmann::json(nullptr);
  manifest["episodes"] = trained.curve.size();
  manifest["last_100_mean_reward"] = rl::tail_mean(trained.curve, 100);
  stage.write("train.json", manifest.dump(2) + "\n");
  stage.commit();
  return kOk;
}

struct RunArgs {
  std::string scenario;
  std::string policy = "rulebased";
  std::string checkpoint;
  std::string mode = "p2p";
  std::vector<std::string> modes{"p2p", "gridonly"};
  std::uint64_t seed = 0;
  int hours = 0;
  int jobs = 1;
  std::vector<std::string> ablate;
  bool strict = false;
  bool markdown = false;
  bool retrain = false;
  long timesteps = 120000;
  std::optional<double> learning_rate;
  std::string out;
};

sim::RunConfig base_config(const RunArgs& a) {
  sim::RunConfig c;
  c.mode = sim::mode_from_string(a.mode);
  c.policy = sim::policy_from_string(a.policy);
  c.ablations = parse_ablations(a.ablate);
  c.horizon_hours = a.hours;
  c.seed = a.seed;
  c.strict_paper_mode = a.strict;
  c.retrain = a.retrain;
  return c;
}

std::shared_ptr<const rl::Policy> load_checkpoint(const RunArgs& a, sim::PolicyKind kind) {
  auto loaded = rl::load_policy(a.checkpoint);
  if (loaded.policy->algo() != sim::to_string(kind))
    throw ValidationError(a.checkpoint + ": holds a " + loaded.policy->algo() + " policy, not " + sim::to_string(kind));
  return std::shared_ptr<const rl::Policy>(std::move(loaded.policy));
}

int cmd_run(const RunArgs& a) {
  const auto cfg = base_config(a);
  const auto scenario = load(a.scenario);
  std::shared_ptr<const rl::Policy> policy;
  if (cfg.policy != sim::PolicyKind::RuleBased) {
    if (a.checkpoint.empty()) throw ValidationError("run: --checkpoint is required for a learned policy");
    policy = load_checkpoint(a, cfg.policy);
  }
  Staging stage(a.out);
  const auto result = sim::run(scenario, cfg, policy.get());
  const auto prov = report::describe(scenario, a.scenario, a.checkpoint);
  stage.write("run.json", report::run_json(result, prov));
  stage.write("trace.csv", report::trace_csv(result.ledger));
  stage.write("trades.csv", report::trades_csv(result.ledger));
  if (a.markdown) stage.write("run.md", report::run_markdown(result));
  stage.commit();
  return kOk;
}

int cmd_compare(const RunArgs& a) {
  const auto base = base_config(a);
  const auto scenario = load(a.scenario);

  std::vector<sim::Ablations> variants{sim::Ablations{}};
  for (const auto& name : a.ablate) {
    const auto v = parse_ablations({name});
    if (std::find(variants.begin(), variants.end(), v) == variants.end()) variants.push_back(v);
  }
  std::vector<sim::LabelledConfig> configs;
  for (const auto& v : variants)
    for (const auto& m : a.modes) {
      auto c = base;
      c.mode = sim::mode_from_string(m);
      c.ablations = v;
      configs.push_back({m + ablation_suffix(v), c});
    }

  sim::PolicyProvider provider;
  if (base.policy != sim::PolicyKind::RuleBased) {
    auto loaded = a.checkpoint.empty() ? nullptr : load_checkpoint(a, base.policy);
    auto cache = std::make_shared<std::map<std::pair<bool, bool>, std::shared_ptr<const rl::Policy>>>();
    auto mutex = std::make_shared<std::mutex>();
    provider = [=, &scenario](const sim::RunConfig& c) -> std::shared_ptr<const rl::Policy> {
      const bool fresh = c.retrain && !(c.ablations == sim::Ablations{});
      if (loaded && !fresh) return loaded;
      const std::pair<bool, bool> key = fresh ? std::pair{c.ablations.priming, c.ablations.dairy} : std::pair{true, true};
      std::lock_guard lock(*mutex);
      auto& slot = (*cache)[key];
      if (!slot) {
        sim::TrainSpec spec;
        spec.algo = c.policy;
        spec.timesteps = a.timesteps;
        spec.priming = key.first;
        spec.seed = a.seed;
        spec.learning_rate = a.learning_rate;
        sim::Ablations train_ablations;
        train_ablations.dairy = key.second;
        log(Level::Info, std::string("training ") + sim::to_string(c.policy) + " for comparison");
        slot = sim::train_policy(sim::apply_ablations(scenario, train_ablations), spec).policy;
      }
      return slot;
    };
  }

  Staging stage(a.out);
  const auto cmp = sim::compare(scenario, configs, a.jobs, provider);
  const auto prov = report::describe(scenario, a.scenario, a.checkpoint);
  stage.write("compare.json", report::compare_json(cmp, prov));
  if (a.markdown) {
    const auto md = report::compare_markdown(cmp);
    stage.write("compare.md", md);
    std::cout << md;
  }
  stage.commit();
  return kOk;
}

void add_run_flags(CLI::App* cmd, RunArgs& a, bool compare) {
  cmd->add_option("--scenario", a.scenario, "Scenario directory or scenario.json")->required();
  cmd->add_option("--policy", a.policy, "Decision policy")
      ->check(CLI::IsMember({"rulebased", "qtable", "dqn", "ppo"}))
      ->capture_default_str();
  cmd->add_option("--checkpoint", a.checkpoint, "Trained policy file (learned policies)");
  if (compare) {
    cmd->add_option("--modes", a.modes, "Settlement modes to compare")
        ->delimiter(',')
        ->check(CLI::IsMember({"p2p", "gridonly"}))
        ->capture_default_str();
    cmd->add_option("--jobs", a.jobs, "Parallel runs")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_flag("--retrain", a.retrain, "Train a fresh policy for each ablated variant");
    cmd->add_option("--timesteps", a.timesteps, "Agent-steps when a policy must be trained")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--learning-rate", a.learning_rate, "Learner step size when a policy must be trained");
  } else {
    cmd->add_option("--mode", a.mode, "Settlement mode")->check(CLI::IsMember({"p2p", "gridonly"}))->capture_default_str();
  }
  cmd->add_option("--ablate", a.ablate, compare ? "Add a variant with this component off (repeatable)"
                                               : "Switch a component off (repeatable)")
      ->check(CLI::IsMember({"advisor", "priming", "dairy"}));
  cmd->add_option("--hours", a.hours, "Simulate only the first N hours (0 = whole scenario)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "Run seed")->capture_default_str();
  cmd->add_flag("--strict-paper-mode", a.strict, "Clear the book without the crossing check");
  cmd->add_flag("--markdown", a.markdown, "Also write human-readable tables");
  cmd->add_option("-o,--out", a.out, "Output directory")->required();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peer-to-peer energy trading simulator for dairy-farm communities.\n"
               "Set P2PSIM_LOG_LEVEL=error|warn|info|debug for diagnostics on stderr.",
               "p2psim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "p2psim 1.0");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic dairy-farm scenario");
  c_synth->add_option("--agents", synth.agents, "Number of farms")->check(CLI::PositiveNumber)->capture_default_str();
  c_synth->add_option("--days", synth.days, "Days of hourly data")->check(CLI::PositiveNumber)->capture_default_str();
  c_synth->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  c_synth->add_option("-o,--out", synth.out, "Output scenario directory")->required();

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train a learned policy and write a checkpoint");
  c_train->add_option("--scenario", train.scenario, "Scenario directory or scenario.json")->required();
  c_train->add_option("--algo", train.algo, "Learner")->required()->check(CLI::IsMember({"qtable", "dqn", "ppo"}));
  c_train->add_option("--timesteps", train.timesteps, "Agent-steps of experience")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_train->add_option("--episode-hours", train.episode_hours, "Episode length (whole days)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_train->add_option("--learning-rate", train.learning_rate, "Step size (DQN/PPO) or update rate (Q-learning)");
  c_train->add_option("--ablate", train.ablate, "Train with a component off (priming, dairy)")
      ->check(CLI::IsMember({"advisor", "priming", "dairy"}));
  c_train->add_option("--seed", train.seed, "Training seed")->capture_default_str();
  c_train->add_option("-o,--out", train.out, "Output directory")->required();

  RunArgs run;
  auto* c_run = app.add_subcommand("run", "Simulate one configuration and write the ledger");
  add_run_flags(c_run, run, false);

  RunArgs cmp;
  auto* c_cmp = app.add_subcommand("compare", "Run several configurations and report KPI differences");
  add_run_flags(c_cmp, cmp, true);

  std::string validate_path;
  auto* c_validate = app.add_subcommand("validate", "Check a scenario and exit");
  c_validate->add_option("--scenario", validate_path, "Scenario directory or scenario.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c_synth) return cmd_synth(synth);
    if (*c_train) return cmd_train(train);
    if (*c_run) return cmd_run(run);
    if (*c_cmp) return cmd_compare(cmp);
    if (*c_validate) return cmd_validate(validate_path);
  } catch (const ValidationError& e) {
    log(Level::Error, e.what());
    return kValidation;
  } catch (const std::exception& e) {
    log(Level::Error, e.what());
    return kRuntime;
  }
  return kUsage;
}
