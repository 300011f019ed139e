#include "proact/cli.hpp"

#include <omp.h>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "proact/advantage.hpp"
#include "proact/env_factory.hpp"
#include "proact/episode.hpp"
#include "proact/gateway.hpp"
#include "proact/glad.hpp"
#include "proact/mc_critic.hpp"
#include "proact/mcts.hpp"
#include "proact/trainer.hpp"

#ifndef PROACT_VERSION
#define PROACT_VERSION "dev"
#endif

namespace proact {
namespace {

using json = nlohmann::ordered_json;

struct Common {
  EnvSpec env;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;
};

void add_env_options(CLI::App* sub, Common& c) {
  sub->add_option("--env", c.env.env, "Environment: 2048, sokoban, chain");
  sub->add_option("--variant", c.env.variant, "2048: standard|3x3|3072; sokoban: standard|action|symbol; chain: delayed|noisy|two_state");
  sub->add_option("--max-steps", c.env.max_steps, "Episode cap (-1: environment default)");
  sub->add_option("--levels,--level", c.env.levels, "Sokoban levels: simplified, generated:<n>, or a level file");
  sub->add_option("--level-seed", c.env.level_seed, "Seed for generated Sokoban levels");
  sub->add_option("--deadlock-termination", c.env.deadlock_termination, "End Sokoban episodes on deadlock");
  sub->add_option("--escaped-newline", c.env.escaped_newline, "2048: literal \\n between board rows");
  sub->add_option("--spawn-high-prob", c.env.spawn_high_prob, "2048: probability of spawning 2*base");
  sub->add_option("--invalid-limit", c.env.invalid_limit, "Consecutive invalid actions that end an episode (-1: default)");
  sub->add_option("--seed", c.seed, "Base seed");
  sub->add_option("--workers", c.workers, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  sub->add_option("--out", c.out, "Output path (default: standard output)");
}

void add_gateway_options(CLI::App* sub, GatewayConfig& g) {
  sub->add_option("--endpoint", g.endpoint, "Chat-completions URL (http://...)");
  sub->add_option("--model", g.model, "Model name");
  sub->add_option("--temperature", g.temperature, "Sampling temperature");
  sub->add_option("--timeout", g.timeout_seconds, "Request timeout in seconds");
  sub->add_option("--retries", g.retries, "Retries per request");
  sub->add_option("--max-in-flight", g.max_in_flight, "Concurrent requests");
  sub->add_option("--api-key-env", g.api_key_env, "Environment variable holding a bearer token");
}

void add_mc_options(CLI::App* sub, McConfig& mc) {
  sub->add_option("--M", mc.M, "MC rollouts per estimate");
  sub->add_option("--T", mc.T, "MC rollout horizon");
  sub->add_option("--gamma", mc.gamma, "Discount for MC returns");
  sub->add_option("--K", mc.K, "Next-state samples for Q (stochastic environments)");
  sub->add_option("--mc-seed", mc.base_seed, "Base seed of the critic");
  sub->add_option("--legal-only", mc.legal_only, "Random rollouts use legal actions only");
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << text;
}

std::unique_ptr<Policy> make_policy(const std::string& name, const GatewayConfig& gateway) {
  if (name == "random") return std::make_unique<RandomPolicy>(true);
  if (name == "random_any") return std::make_unique<RandomPolicy>(false);
  if (name == "greedy") return std::make_unique<GreedyPolicy>();
  if (name == "gateway") return std::make_unique<GatewayPolicy>(std::make_shared<const GatewayClient>(gateway));
  throw ConfigError("unknown policy '" + name + "' (expected random, random_any, greedy, gateway)");
}

std::vector<std::string> split_actions(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!normalize_action_text(item).empty()) out.push_back(item);
  }
  return out;
}

// Reset with `seed`, then play the comma-separated action prefix.
void position(Environment& env, std::uint64_t seed, const std::string& actions) {
  env.reset(seed);
  for (const auto& a : split_actions(actions)) {
    const ActionId id = env.action_id(a);
    if (id == kInvalidAction) throw ConfigError("action '" + a + "' is not in the alphabet");
    env.step_action(id);
  }
}

StateSnapshot read_snapshot_file(const std::string& path, const Environment& env) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open snapshot file '" + path + "'");
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("snapshot")) throw FormatError("snapshot file must be JSON with a 'snapshot' key");
  if (j.contains("env") && j["env"] != env.name()) {
    throw ContractError("snapshot belongs to env '" + j["env"].get<std::string>() + "', not '" + std::string(env.name()) +
                        "'");
  }
  return {env.kind(), j.value("variant", std::string(env.variant())), from_hex(j.at("snapshot").get<std::string>())};
}

json metrics_json(const EvalMetrics& m) {
  return {{"runs", m.runs},
          {"mean_score", m.mean_score},
          {"mean_total_reward", m.mean_total_reward},
          {"solve_rate", m.solve_rate},
          {"mean_steps", m.mean_steps}};
}

struct TrainOpts {
  std::string algorithm = "mc_grpo";
  TrainConfig cfg;
  std::string log;
  std::string export_path;
  int eval_runs = 100;
};

void add_train_options(CLI::App* sub, TrainOpts& t) {
  sub->add_option("--algorithm", t.algorithm, "traj_grpo, step_grpo, mc_grpo, step_ppo, mc_ppo");
  sub->add_option("--G", t.cfg.G, "Group size");
  sub->add_option("--b", t.cfg.b, "States per update");
  sub->add_option("--updates", t.cfg.updates, "Policy updates");
  sub->add_option("--epochs", t.cfg.epochs, "Passes per sample");
  sub->add_option("--clip", t.cfg.clip, "Ratio clip epsilon");
  sub->add_option("--gae-gamma", t.cfg.gae.gamma, "GAE discount");
  sub->add_option("--lambda", t.cfg.gae.lambda, "GAE lambda");
  sub->add_option("--omega", t.cfg.omega, "MC-PPO weight of the MC value");
  sub->add_option("--lr", t.cfg.policy_lr, "Policy learning rate");
  sub->add_option("--value-lr", t.cfg.value_lr, "Value learning rate");
  sub->add_option("--pool-episodes", t.cfg.pool_episodes, "On-policy episodes feeding the state pool per update");
  sub->add_option("--eval-runs", t.eval_runs, "Evaluation runs after training");
  add_mc_options(sub, t.cfg.mc);
}

void finalize_train(TrainOpts& t, const Common& c) {
  t.cfg.algorithm = algorithm_from_string(t.algorithm);
  t.cfg.seed = c.seed;
  t.cfg.mc.workers = c.workers;
  t.cfg.validate();
}

// ---- subcommands ----

int cmd_rollout(const Common& c, const std::string& policy_name, const GatewayConfig& gw) {
  auto env = make_environment(c.env);
  auto policy = make_policy(policy_name, gw);
  Rng rng(derive_seed(c.seed, 1));
  const Trajectory traj = run_episode(*env, *policy, c.seed, rng);
  std::ostringstream out;
  write_transcript(out, traj);
  emit(c.out, out.str());
  return traj.terminal_reason == TerminalReason::aborted ? 3 : 0;
}

int cmd_eval(const Common& c, const std::string& policy_name, const GatewayConfig& gw, int runs) {
  if (runs < 0) throw ConfigError("runs must be >= 0");
  auto env = make_environment(c.env);
  auto policy = make_policy(policy_name, gw);
  const EvalMetrics m = evaluate(*env, *policy, runs, c.seed, c.workers);
  json j = {{"env", c.env.env}, {"variant", std::string(env->variant())}, {"policy", policy_name}, {"seed", c.seed}};
  j.update(metrics_json(m));
  emit(c.out, j.dump(2) + "\n");
  return 0;
}

int cmd_value(const Common& c, McConfig mc, const std::string& snapshot_file, const std::string& actions,
              const std::string& action) {
  auto env = make_environment(c.env);
  mc.workers = c.workers;
  mc.validate();
  StateSnapshot snap;
  if (!snapshot_file.empty()) {
    snap = read_snapshot_file(snapshot_file, *env);
  } else {
    position(*env, c.seed, actions);
    snap = env->snapshot();
  }
  if (mc.degenerate()) {
    emit(c.out, json{{"mean", 0.0}, {"degenerate", true}}.dump() + "\n");
    return 0;
  }
  json j;
  if (!action.empty()) {
    env->restore(snap);
    const ActionId a = env->action_id(action);
    if (a == kInvalidAction) throw ConfigError("action '" + action + "' is not in the alphabet");
    const QEstimate q = estimate_q(*env, snap, a, mc);
    j = {{"action", std::string(env->action_name(a))}, {"mean", q.mean}, {"std_error", q.std_error}};
    json comps = json::array();
    for (const auto& s : q.components) comps.push_back({{"reward", s.reward}, {"value", s.value}});
    j["components"] = comps;
  } else {
    const ValueEstimate v = estimate_v(*env, snap, mc);
    j = {{"mean", v.mean}, {"std_error", v.std_error}, {"sample_count", v.sample_count}};
  }
  j["M"] = mc.M;
  j["T"] = mc.T;
  j["gamma"] = mc.gamma;
  emit(c.out, j.dump() + "\n");
  return 0;
}

json probe_json(const Environment& env, const ProbeSet& set) {
  json stats = json::array();
  for (const auto& s : set.root_stats) {
    stats.push_back({{"action", std::string(env.action_name(s.action))},
                     {"visits", s.visits},
                     {"mean_return", s.mean_return},
                     {"best_return", s.best_return},
                     {"worst_return", s.worst_return},
                     {"immediate_reward", s.immediate_reward},
                     {"legal", s.legal}});
  }
  json trajs = json::array();
  for (const auto& t : set.trajectories) {
    json names = json::array();
    for (ActionId a : t.actions) names.push_back(std::string(env.action_name(a)));
    trajs.push_back({{"actions", names},
                     {"rewards", t.rewards},
                     {"step_seeds", t.step_seeds},
                     {"return", t.ret},
                     {"terminal_reason", std::string(to_string(t.terminal_reason))},
                     {"dead_end", t.dead_end}});
  }
  return {{"terminal", set.terminal}, {"root_stats", stats}, {"trajectories", trajs}};
}

int cmd_probe(const Common& c, ProbeConfig pc, const std::string& actions) {
  auto env = make_environment(c.env);
  position(*env, c.seed, actions);
  pc.seed = derive_seed(c.seed, 0x9b);
  const ProbeSet set = probe_environment(*env, env->snapshot(), pc);
  json j = probe_json(*env, set);
  j["env"] = std::string(env->name());
  j["variant"] = std::string(env->variant());
  j["state"] = env->observation();
  j["snapshot"] = to_hex(env->snapshot().bytes);
  j["best_action"] = set.best_action() == kInvalidAction ? "" : std::string(env->action_name(set.best_action()));
  emit(c.out, j.dump(2) + "\n");
  return 0;
}

struct GladOpts {
  int episodes = 10;
  int max_records = 0;
  std::string agent = "best";
  std::int64_t threshold = 0;
  std::string compressor = "template";
  GladConfig cfg;
};

int cmd_glad(const Common& c, const GladOpts& o, const GatewayConfig& gw) {
  if (o.episodes < 0) throw ConfigError("episodes must be >= 0");
  if (o.agent != "best" && o.agent != "threshold" && o.agent != "gateway") {
    throw ConfigError("unknown agent '" + o.agent + "' (expected best, threshold, gateway)");
  }
  if (o.compressor != "template" && o.compressor != "gateway") {
    throw ConfigError("unknown compressor '" + o.compressor + "' (expected template, gateway)");
  }
  if (c.out.empty()) throw ConfigError("glad-gen needs --out");
  auto proto = make_environment(c.env);
  o.cfg.probe.validate();
  std::shared_ptr<const GatewayClient> client;
  if (o.agent == "gateway" || o.compressor == "gateway") client = std::make_shared<const GatewayClient>(gw);

  std::vector<std::vector<GladRecord>> per_episode(static_cast<std::size_t>(o.episodes));
  std::vector<GladHistory> histories(per_episode.size());
  const int threads = c.workers > 0 ? c.workers : omp_get_max_threads();
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1) if (threads > 1)
  for (int e = 0; e < o.episodes; ++e) {
    auto env = proto->clone();
    std::unique_ptr<GladAgent> agent;
    if (o.agent == "best") {
      agent = std::make_unique<BestProbeAgent>();
    } else if (o.agent == "threshold") {
      agent = std::make_unique<ThresholdBacktrackAgent>(o.threshold);
    } else {
      agent = std::make_unique<GatewayGladAgent>(client);
    }
    const std::uint64_t seed = derive_seed(c.seed, static_cast<std::uint64_t>(e));
    const auto k = static_cast<std::size_t>(e);
    histories[k] = glad_episode(*env, *agent, o.cfg, seed);
    per_episode[k] = make_records(*proto, histories[k], "ep" + std::to_string(e), o.cfg,
                                  o.compressor == "gateway" ? client.get() : nullptr);
  }

  std::vector<GladRecord> records;
  for (auto& eps : per_episode) {
    for (auto& r : eps) records.push_back(std::move(r));
  }
  if (o.max_records > 0 && records.size() > static_cast<std::size_t>(o.max_records)) {
    records.resize(static_cast<std::size_t>(o.max_records));
  }
  write_dataset(c.out, records);

  const ReplayReport report = replay_check(records, *proto);
  std::map<std::string, int> reasons;
  int backtracks = 0;
  int refused = 0;
  std::vector<std::int64_t> best;
  for (const auto& h : histories) {
    ++reasons[std::string(to_string(h.terminal_reason))];
    backtracks += h.backtracks;
    refused += h.refused_backtracks;
  }
  for (const auto& r : records) best.push_back(r.best_probe_return);
  json dist = {{"count", best.size()}};
  if (!best.empty()) {
    std::sort(best.begin(), best.end());
    double sum = 0.0;
    for (auto v : best) sum += static_cast<double>(v);
    dist["min"] = best.front();
    dist["median"] = best[best.size() / 2];
    dist["max"] = best.back();
    dist["mean"] = sum / static_cast<double>(best.size());
  }
  json failures = json::array();
  for (const auto& f : report.failures) failures.push_back({{"index", f.index}, {"reason", f.reason}});
  const json stats = {{"episodes", o.episodes},
                      {"records", records.size()},
                      {"backtracks", backtracks},
                      {"refused_backtracks", refused},
                      {"terminal_reasons", reasons},
                      {"best_probe_return", dist},
                      {"replay_checked", report.checked},
                      {"replay_failures", failures}};
  emit(c.out + ".stats.json", stats.dump(2) + "\n");
  std::cerr << "glad-gen: " << records.size() << " records, " << report.failures.size() << " replay failures\n";
  return report.failures.empty() ? 0 : 3;
}

json start_probabilities(const Environment& proto, const TabularPolicy& policy, std::uint64_t seed) {
  auto env = proto.clone();
  env->reset(seed);
  json probs = json::object();
  const auto p = policy.probabilities(policy.key(*env));
  for (ActionId a = 0; a < env->action_count(); ++a) {
    probs[std::string(env->action_name(a))] = p[static_cast<std::size_t>(a)];
  }
  return probs;
}

int cmd_train(const Common& c, TrainOpts t) {
  auto env = make_environment(c.env);
  finalize_train(t, c);
  t.cfg.export_advantages = !t.export_path.empty();
  TabularPolicy policy(env->action_count(), t.cfg.policy_lr);
  TabularValue value(t.cfg.value_lr);
  std::unique_ptr<std::ofstream> log;
  if (!t.log.empty()) {
    log = std::make_unique<std::ofstream>(t.log);
    if (!*log) throw ConfigError("cannot open log file '" + t.log + "'");
  }
  const TrainResult res = train(t.cfg, *env, policy, &value, [&](const UpdateLog& u, const TabularPolicy&) {
    if (log) write_update_log(*log, u);
    return false;
  });
  if (!t.export_path.empty()) {
    std::ofstream out(t.export_path);
    if (!out) throw ConfigError("cannot open export file '" + t.export_path + "'");
    write_advantages(out, res.advantages);
  }
  const EvalMetrics m = evaluate(*env, policy, t.eval_runs, derive_seed(c.seed, 0xe7a1), c.workers);
  json j = {{"algorithm", t.algorithm},
            {"env", c.env.env},
            {"variant", std::string(env->variant())},
            {"updates_run", res.updates_run},
            {"policy_hash", policy_hash(policy)},
            {"final_mean_reward", res.log.empty() ? 0.0 : res.log.back().mean_reward},
            {"start_probabilities", start_probabilities(*env, policy, c.seed)}};
  j["eval"] = metrics_json(m);
  emit(c.out, j.dump(2) + "\n");
  return 0;
}

int cmd_sweep(const Common& c, TrainOpts t, const std::string& axis, const std::vector<int>& values) {
  if (axis != "M" && axis != "T") throw ConfigError("sweep axis must be M or T");
  auto env = make_environment(c.env);
  finalize_train(t, c);
  const auto rows = sweep(t.cfg, axis == "M" ? SweepAxis::M : SweepAxis::T, values, *env, t.eval_runs, c.workers);
  json table = json::array();
  for (const auto& r : rows) {
    json row = {{axis, r.value}};
    row.update(metrics_json(r.metrics));
    row["final_mean_reward"] = r.final_mean_reward;
    table.push_back(row);
  }
  emit(c.out, json{{"algorithm", t.algorithm}, {"axis", axis}, {"rows", table}}.dump(2) + "\n");
  return 0;
}

int cmd_bench(const Common& c, int count, int horizon, bool serial) {
  if (count < 0 || horizon < 0) throw ConfigError("count and horizon must be >= 0");
  auto env = make_environment(c.env);
  const BenchResult r =
      serial ? bench_rollouts_serial(*env, count, horizon, c.seed) : bench_rollouts(*env, count, horizon, c.seed, c.workers);
  const json j = {{"implementation", serial ? "serial" : "openmp"},
                  {"workers", serial ? 1 : c.workers},
                  {"rollouts", r.rollouts},
                  {"horizon", horizon},
                  {"steps", r.steps},
                  {"mean_return", r.mean_return},
                  {"wall_seconds", r.wall_seconds},
                  {"steps_per_second", r.wall_seconds > 0 ? static_cast<double>(r.steps) / r.wall_seconds : 0.0}};
  emit(c.out, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"ProAct harness: environments, MC critic, GLAD data generation and tabular training"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Configuration file (TOML/INI, one section per subcommand)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();
  std::string echo_path;
  app.add_option("--echo-config", echo_path, "Also write the resolved configuration to this file");
  app.set_version_flag("--version", std::string("proact ") + PROACT_VERSION + " (" + __DATE__ + ", " +
                                        (std::string("g++ ") + __VERSION__) + ", OpenMP " +
                                        std::to_string(_OPENMP) + ")");

  Common c;
  GatewayConfig gw;
  std::string policy_name = "random";
  int runs = 100;

  auto* rollout = app.add_subcommand("rollout", "Play one episode and write its JSONL transcript");
  add_env_options(rollout, c);
  rollout->add_option("--policy", policy_name, "random, random_any, greedy, gateway");
  add_gateway_options(rollout, gw);

  auto* eval = app.add_subcommand("eval", "Evaluate a policy over several seeded runs");
  add_env_options(eval, c);
  eval->add_option("--policy", policy_name, "random, random_any, greedy, gateway");
  eval->add_option("--runs", runs, "Number of runs");
  add_gateway_options(eval, gw);

  McConfig mc;
  std::string snapshot_file;
  std::string actions;
  std::string action;
  auto* value = app.add_subcommand("value", "Monte-Carlo value (or Q with --action) of a state");
  add_env_options(value, c);
  add_mc_options(value, mc);
  value->add_option("--snapshot", snapshot_file, "JSON file with a hex 'snapshot' (as written by probe)");
  value->add_option("--actions", actions, "Comma-separated action prefix played after reset");
  value->add_option("--action", action, "Estimate Q for this action instead of V");

  ProbeConfig pc;
  auto* probe = app.add_subcommand("probe", "MCTS lookahead from a state");
  add_env_options(probe, c);
  probe->add_option("--actions", actions, "Comma-separated action prefix played after reset");
  probe->add_option("--k", pc.k, "Trajectories to return");
  probe->add_option("--d", pc.depth, "Probe depth");
  probe->add_option("--budget", pc.budget, "MCTS iterations");
  probe->add_option("--uct-c", pc.uct_c, "UCT exploration constant");

  GladOpts glad;
  auto* gladgen = app.add_subcommand("glad-gen", "Generate a GLAD SFT dataset");
  add_env_options(gladgen, c);
  gladgen->add_option("--episodes", glad.episodes, "Episodes to run");
  gladgen->add_option("--max-records", glad.max_records, "Truncate the dataset to this many records (0: all)");
  gladgen->add_option("--k", glad.cfg.probe.k, "Probe trajectories per decision");
  gladgen->add_option("--d", glad.cfg.probe.depth, "Probe depth");
  gladgen->add_option("--budget", glad.cfg.probe.budget, "MCTS iterations per decision");
  gladgen->add_option("--uct-c", glad.cfg.probe.uct_c, "UCT exploration constant");
  gladgen->add_option("--rounds", glad.cfg.rounds, "Probe rounds merged per decision");
  gladgen->add_option("--backtrack-budget", glad.cfg.backtrack_budget, "Backtracks allowed per episode");
  gladgen->add_option("--agent", glad.agent, "best, threshold, gateway");
  gladgen->add_option("--threshold", glad.threshold, "Backtrack when no probe return reaches this (threshold agent)");
  gladgen->add_option("--compressor", glad.compressor, "template or gateway");
  add_gateway_options(gladgen, gw);

  TrainOpts tr;
  auto* trainc = app.add_subcommand("train", "Train a tabular policy");
  add_env_options(trainc, c);
  add_train_options(trainc, tr);
  trainc->add_option("--log", tr.log, "Training log (JSONL, one line per update)");
  trainc->add_option("--export-advantages", tr.export_path, "Advantage export (JSONL, one line per decision unit)");

  std::string axis = "M";
  std::vector<int> values;
  auto* sweepc = app.add_subcommand("sweep", "Train one policy per M or T value and evaluate each");
  add_env_options(sweepc, c);
  add_train_options(sweepc, tr);
  sweepc->add_option("--axis", axis, "M or T");
  sweepc->add_option("--values", values, "Axis values")->delimiter(',');

  int count = 1000;
  int horizon = 1000;
  bool serial = false;
  auto* bench = app.add_subcommand("bench", "Random-policy rollout throughput");
  add_env_options(bench, c);
  bench->add_option("--count", count, "Rollouts");
  bench->add_option("--horizon", horizon, "Steps per rollout cap");
  bench->add_flag("--serial", serial, "Use the serial reference implementation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string echo = "[" + sub->get_name() + "]\n" + sub->config_to_str(true, false);
  std::cerr << "# resolved configuration\n" << echo;
  try {
    if (!echo_path.empty()) {
      std::ofstream(echo_path) << echo;
    }
    if (sub == rollout) return cmd_rollout(c, policy_name, gw);
    if (sub == eval) return cmd_eval(c, policy_name, gw, runs);
    if (sub == value) return cmd_value(c, mc, snapshot_file, actions, action);
    if (sub == probe) return cmd_probe(c, pc, actions);
    if (sub == gladgen) return cmd_glad(c, glad, gw);
    if (sub == trainc) return cmd_train(c, tr);
    if (sub == sweepc) return cmd_sweep(c, tr, axis, values);
    if (sub == bench) return cmd_bench(c, count, horizon, serial);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 3;
  } catch (const ContractError& e) {
    std::cerr << "contract error: " << e.what() << "\n";
    return 3;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 3;
  } catch (const GatewayError& e) {
    std::cerr << "gateway error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace proact
