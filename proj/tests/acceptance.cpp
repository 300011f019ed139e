// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "oracles.hpp"
#include "proact/advantage.hpp"
#include "proact/cli.hpp"
#include "proact/env_factory.hpp"
#include "proact/episode.hpp"
#include "proact/game2048.hpp"
#include "proact/glad.hpp"
#include "proact/mc_critic.hpp"
#include "proact/policy.hpp"
#include "proact/sokoban.hpp"
#include "proact/tabular_mdp.hpp"
#include "proact/trainer.hpp"

using namespace proact;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 3) {
  std::ostringstream ss;
  ss.precision(digits);
  ss << std::fixed << v;
  return ss.str();
}

bool bit_identical(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

std::unique_ptr<Environment> env_named(const std::string& name) {
  EnvSpec spec;
  spec.env = name;
  return make_environment(spec);
}

// ---- 1 ----

Verdict throughput() {
  g2048::Game2048Env env;
  const BenchResult r = bench_rollouts(env, 1000, 1000, 2024, 1);
  const BenchResult s = bench_rollouts_serial(env, 1000, 1000, 2024);
  const bool same = r.steps == s.steps && r.mean_return == s.mean_return;
  return {r.wall_seconds <= 3.0 && r.rollouts == 1000 && same,
          "1000 rollouts, " + std::to_string(r.steps) + " steps in " + num(r.wall_seconds) +
              " s on one worker (limit 3 s); serial reference " + (same ? "agrees" : "DISAGREES")};
}

// ---- 2 ----

Verdict degeneration() {
  Rng rng(77);
  int identical = 0;
  int absolute_possible = 0;
  const int groups = 50;
  for (int g = 0; g < groups; ++g) {
    auto env = env_named(g % 2 == 0 ? "2048" : "sokoban");
    // A random origin state reached by random play.
    env->reset(rng());
    RandomPolicy walker;
    const int walk = static_cast<int>(rng.below(15));
    for (int i = 0; i < walk && !env->done(); ++i) env->step_action(walker.decide(*env, rng).action);
    if (env->done()) env->reset(rng());
    const StateSnapshot origin = env->snapshot();
    const int G = 8;
    std::vector<ActionId> actions(G);
    const bool same = rng.below(4) == 0;
    for (int i = 0; i < G; ++i) {
      actions[static_cast<std::size_t>(i)] = static_cast<ActionId>(same && i > 0 ? actions[0] : rng.below(env->action_count()));
    }
    if (same) ++absolute_possible;
    std::vector<double> rewards;
    for (int i = 0; i < G; ++i) {
      env->restore(origin);
      env->reseed(derive_seed(static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(i)));
      rewards.push_back(static_cast<double>(env->apply(actions[static_cast<std::size_t>(i)]).reward));
    }
    const std::vector<double> step = step_grpo_advantages(rewards);
    bool ok = true;
    for (auto [m, t] : {std::pair{0, 1000}, std::pair{1000, 0}}) {
      McConfig cfg;
      cfg.M = m;
      cfg.T = t;
      cfg.base_seed = static_cast<std::uint64_t>(g);
      std::vector<double> q;
      for (ActionId a : actions) q.push_back(estimate_q(*env, origin, a, cfg).mean);
      std::vector<double> all;
      for (const auto& e : estimate_q_all(*env, origin, cfg)) all.push_back(e.mean);
      const McGrpoResult mc = mc_grpo_advantages(actions, q, &all, cfg.degenerate());
      ok = ok && bit_identical(mc.advantages, step);
    }
    if (ok) ++identical;
  }

  // Whole training runs with shared seeds.
  int runs_identical = 0;
  int runs = 0;
  for (const char* name : {"chain", "sokoban"}) {
    auto env = env_named(name);
    TrainConfig step;
    step.algorithm = Algorithm::step_grpo;
    step.updates = 100;
    step.mc.T = 20;
    step.seed = 11;
    TabularPolicy ps(env->action_count(), step.policy_lr);
    const TrainResult rs = train(step, *env, ps);
    for (auto [m, t] : {std::pair{0, 20}, std::pair{100, 0}}) {
      TrainConfig mc = step;
      mc.algorithm = Algorithm::mc_grpo;
      mc.mc.M = m;
      mc.mc.T = t;
      TabularPolicy pm(env->action_count(), mc.policy_lr);
      const TrainResult rm = train(mc, *env, pm);
      bool same = rm.log.size() == rs.log.size() && pm == ps;
      for (std::size_t u = 0; same && u < rs.log.size(); ++u) same = rm.log[u].param_hash == rs.log[u].param_hash;
      ++runs;
      if (same) ++runs_identical;
    }
  }
  return {identical == groups && runs_identical == runs,
          std::to_string(identical) + "/" + std::to_string(groups) + " groups bit-identical for M=0 and T=0 (" +
              std::to_string(absolute_possible) + " with identical actions); " + std::to_string(runs_identical) + "/" +
              std::to_string(runs) + " training runs with identical parameter trajectories"};
}

// ---- 3 ----

Verdict critic_consistency() {
  const tabular::Mdp mdp = tabular::noisy_chain(7, 0.2, 5);
  tabular::MdpEnv env(mdp);
  env.reset(0);
  const StateSnapshot start = env.snapshot();
  McConfig cfg;
  cfg.M = 1000;
  cfg.T = 1000;
  cfg.gamma = 0.9;
  const double truth = oracle::random_value(mdp, mdp.start, cfg.T, cfg.gamma);
  int within = 0;
  for (int rep = 0; rep < 100; ++rep) {
    cfg.base_seed = derive_seed(31337, static_cast<std::uint64_t>(rep));
    const ValueEstimate v = estimate_v(env, start, cfg);
    if (std::abs(v.mean - truth) <= 4 * v.std_error) ++within;
  }
  McConfig small = cfg;
  small.M = 100;
  small.base_seed = 1;
  McConfig large = cfg;
  large.M = 10000;
  large.base_seed = 2;
  const double ratio = estimate_v(env, start, large).std_error / estimate_v(env, start, small).std_error;
  return {within >= 95 && ratio >= 0.07 && ratio <= 0.14,
          std::to_string(within) + "/100 repetitions within 4 std errors of v*=" + num(truth, 4) +
              " (7-state noisy chain); std_error ratio M=10000/M=100 = " + num(ratio, 4)};
}

// ---- 4 ----

Verdict semantics_2048() {
  const g2048::MoveResult m = g2048::apply_move(
      g2048::Board::from_rows({{128, 8, 4, 2}, {8, 4, 0, 0}, {4, 0, 0, 0}, {2, 0, 0, 2}}), g2048::Direction::up);
  const bool case_ok = m.board.rows()[0] == std::vector<std::uint32_t>{128, 8, 4, 4} && m.merge_sum == 4;
  Rng rng(2048);
  int agree = 0;
  const int boards = 10000;
  for (int i = 0; i < boards; ++i) {
    g2048::Board b = g2048::Board::empty(4, 2);
    const double fill = rng.uniform();
    for (auto& cell : b.cells) {
      if (rng.uniform() < fill) cell = 2u << rng.below(rng.uniform() < 0.6 ? 3 : 11);
    }
    bool ok = true;
    for (int d = 0; d < 4; ++d) {
      const g2048::MoveResult r = g2048::apply_move(b, static_cast<g2048::Direction>(d));
      const oracle::Move2048 o = oracle::slide(b.rows(), d);
      ok = ok && r.board.rows() == o.grid && r.merge_sum == o.score && r.moved == o.moved;
    }
    if (ok) ++agree;
  }
  return {case_ok && agree == boards, std::string("case-study board under up gives top row 128-8-4-4, reward ") +
                                          std::to_string(m.merge_sum) + "; " + std::to_string(agree) + "/" +
                                          std::to_string(boards) + " random boards agree with the oracle in all directions"};
}

// ---- 5 ----

Verdict sokoban_ledger() {
  using namespace sokoban;
  Rng rng(505);
  GeneratorConfig gc;
  std::vector<Level> levels;
  for (int i = 0; i < 50; ++i) levels.push_back(generate_level(rng, gc));
  int episodes = 0;
  int steps = 0;
  int ledger_errors = 0;
  int flagged = 0;
  int unconfirmed = 0;
  std::map<std::string, bool> proven;  // render -> unsolvable
  RandomPolicy policy(false);
  const auto check_flag = [&](const Level& l) {
    if (!deadlock_detected(l)) return;
    ++flagged;
    const std::string key = render(l);
    auto it = proven.find(key);
    if (it == proven.end()) it = proven.emplace(key, !oracle::sokoban_solvable(l)).first;
    if (!it->second) ++unconfirmed;
  };
  for (std::size_t li = 0; li < levels.size(); ++li) {
    for (bool terminate : {true, false}) {
      Config c;
      c.levels = {levels[li]};
      c.deadlock_termination = terminate;
      SokobanEnv env(c);
      for (int e = 0; e < 4; ++e) {
        Rng prng(derive_seed(li, static_cast<std::uint64_t>(e) + (terminate ? 0 : 100)));
        env.reset(0);
        std::int64_t total = 0;
        std::int64_t events = 0;
        while (!env.done()) {
          const Level before = env.level();
          const Decision d = policy.decide(env, prng);
          const StepOutcome o = env.step_action(d.action);
          const Level& after = env.level();
          const bool changed = after.player != before.player || after.boxes != before.boxes;
          const std::int64_t decomposed = o.info.at("on_events") * kBoxOnReward +
                                          o.info.at("off_events") * kBoxOffReward + o.info.at("solve_bonus") +
                                          o.info.at("invalid_flag") * kInvalidPenalty;
          if (o.reward != decomposed || o.reward != oracle::sokoban_step_reward(before, after, changed)) ++ledger_errors;
          total += o.reward;
          events += decomposed;
          check_flag(after);
          ++steps;
        }
        if (terminate && env.terminal_reason() == TerminalReason::deadlock && !deadlock_detected(env.level())) {
          ++ledger_errors;
        }
        if (total != events) ++ledger_errors;
        ++episodes;
      }
    }
  }
  return {ledger_errors == 0 && unconfirmed == 0 && flagged > 0,
          std::to_string(episodes) + " episodes on 50 generated levels, " + std::to_string(steps) + " steps, " +
              std::to_string(ledger_errors) + " ledger mismatches; " + std::to_string(flagged) +
              " deadlock flags over " + std::to_string(proven.size()) + " distinct states, " +
              std::to_string(unconfirmed) + " not confirmed unsolvable"};
}

// ---- 6 ----

Verdict algebra() {
  Rng rng(6);
  double worst_mean = 0.0;
  double worst_td = 0.0;
  double worst_rtg = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng.below(32);
    std::vector<double> x(n);
    for (auto& v : x) v = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<double>(rng.below(5)));
    const auto a = normalize_group(x);
    double mean = 0.0;
    for (double v : a) mean += v;
    worst_mean = std::max(worst_mean, std::abs(mean / static_cast<double>(n)));

    std::vector<double> values(n + 1);
    for (auto& v : values) v = (rng.uniform() - 0.5) * 20;
    const double gamma = rng.uniform();
    const GaeResult td = gae_turn_level(x, values, gamma, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      worst_td = std::max(worst_td, std::abs(td.advantages[t] - (x[t] + gamma * values[t + 1] - values[t])));
    }
    const GaeResult mc = gae_turn_level(x, std::vector<double>(n + 1, 0.0), 1.0, 1.0);
    double rtg = 0.0;
    for (std::size_t t = n; t-- > 0;) {
      rtg += x[t];
      worst_rtg = std::max(worst_rtg, std::abs(mc.advantages[t] - rtg));
    }
  }
  const ClipResult up = ppo_clip_objective({{1.0, 0.0}}, {std::log(2.0)}, 0.4);
  const ClipResult down = ppo_clip_objective({{-1.0, 0.0}}, {std::log(0.5)}, 0.4);
  const bool clip_ok = std::abs(up.terms[0] - 1.4) <= 1e-12 && up.clipped == 1 && std::abs(down.terms[0] + 0.6) <= 1e-12 &&
                       down.clipped == 1;
  std::ostringstream ss;
  ss.precision(2);
  ss << std::scientific << "max |mean| after normalization " << worst_mean << ", GAE(lambda=0) vs TD " << worst_td
     << ", GAE(1,1,V=0) vs reward-to-go " << worst_rtg << "; clip rho=2 -> " << up.terms[0] << ", rho=0.5 -> "
     << down.terms[0];
  return {worst_mean <= 1e-12 && worst_td <= 1e-9 && worst_rtg <= 1e-9 && clip_ok, ss.str()};
}

// ---- 7 ----

Verdict learning_signal() {
  auto chain = env_named("chain");
  chain->reset(0);
  int mc_delayed = 0;
  int step_greedy = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (Algorithm a : {Algorithm::mc_grpo, Algorithm::step_grpo}) {
      TrainConfig c;
      c.algorithm = a;
      c.mc.M = 100;
      c.mc.T = 5;
      c.mc.gamma = 0.9;
      c.updates = 200;
      c.seed = seed;
      TabularPolicy p(2, c.policy_lr);
      train(c, *chain, p);
      const auto probs = p.probabilities(p.key(*chain));
      if (a == Algorithm::mc_grpo && probs[0] > 0.5) ++mc_delayed;
      if (a == Algorithm::step_grpo && probs[1] > 0.5) ++step_greedy;
    }
  }

  auto soko = env_named("sokoban");  // the four simplified levels, 20-step cap
  TrainConfig c;
  c.algorithm = Algorithm::mc_grpo;
  c.G = 4;
  c.b = 16;
  c.updates = 5000;
  c.mc.M = 20;
  c.mc.T = 20;
  c.mc.gamma = 1.0;
  c.seed = 1;
  TabularPolicy p(soko->action_count(), c.policy_lr);
  double solve = 0.0;
  int reached_at = -1;
  train(c, *soko, p, nullptr, [&](const UpdateLog& u, const TabularPolicy& policy) {
    if ((u.update + 1) % 250 != 0) return false;
    solve = evaluate(*soko, policy, 100, 9, 1).solve_rate;
    if (solve >= 0.9) reached_at = u.update + 1;
    return solve >= 0.9;
  });
  return {mc_delayed >= 9 && step_greedy >= 9 && reached_at > 0,
          "chain: MC-GRPO picks the delayed arm in " + std::to_string(mc_delayed) +
              "/10 seeds, Step-GRPO the immediate arm in " + std::to_string(step_greedy) +
              "/10; Sokoban MC-GRPO solve rate " + num(solve, 2) +
              (reached_at > 0 ? " after " + std::to_string(reached_at) + " updates" : " after 5000 updates")};
}

// ---- 8 ----

// Some sentence mentioning a rejection names an action other than the chosen one.
bool names_rejected_alternative(const Environment& env, const GladRecord& r) {
  std::string sentence;
  const auto check = [&](const std::string& text) {
    if (text.find("rejected") == std::string::npos) return false;
    for (const auto& name : env.action_alphabet()) {
      if (name == r.action) continue;
      const std::string lower = [&] {
        std::string t = text;
        for (auto& ch : t) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        return t;
      }();
      for (std::size_t p = lower.find(name); p != std::string::npos; p = lower.find(name, p + 1)) {
        const bool left_ok = p == 0 || !std::isalpha(static_cast<unsigned char>(lower[p - 1]));
        const bool right_ok = p + name.size() >= lower.size() || !std::isalpha(static_cast<unsigned char>(lower[p + name.size()]));
        if (left_ok && right_ok) return true;
      }
    }
    return false;
  };
  for (char ch : r.reasoning) {
    sentence.push_back(ch);
    if (ch == '.' || ch == '\n') {
      if (check(sentence)) return true;
      sentence.clear();
    }
  }
  return check(sentence);
}

Verdict glad_integrity() {
  auto env = env_named("2048");
  GladConfig cfg;
  std::vector<GladRecord> records;
  for (int e = 0; records.size() < 500; ++e) {
    BestProbeAgent agent;
    const GladHistory h = glad_episode(*env, agent, cfg, derive_seed(808, static_cast<std::uint64_t>(e)));
    for (auto& r : make_records(*env, h, "ep" + std::to_string(e), cfg)) records.push_back(std::move(r));
  }
  records.resize(500);
  // Through the file format, as a consumer would see them.
  std::stringstream ss;
  write_dataset(ss, records);
  const auto back = read_dataset(ss);
  const ReplayReport report = replay_check(back, *env);
  int tagged = 0;
  int unnamed = 0;
  for (const auto& r : back) {
    const std::string& z = r.reasoning;
    if (z.find('<') != std::string::npos || z.find('>') != std::string::npos ||
        z.find("Trajectory") != std::string::npos || z.find("->") != std::string::npos) {
      ++tagged;
    }
    if (!names_rejected_alternative(*env, r)) ++unnamed;
  }
  return {back.size() == 500 && report.failures.empty() && tagged == 0 && unnamed == 0,
          std::to_string(back.size()) + " records, " + std::to_string(report.failures.size()) + " replay failures, " +
              std::to_string(tagged) + " with structural markup, " + std::to_string(unnamed) +
              " without a named rejected alternative"};
}

// ---- 9 ----

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "proact");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream sink;
  auto* old = std::cerr.rdbuf(sink.rdbuf());
  const int code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cerr.rdbuf(old);
  return code;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / ("proact_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::vector<std::vector<std::string>> commands = {
      {"rollout", "--env", "2048", "--seed", "5"},
      {"eval", "--env", "2048", "--runs", "40", "--seed", "7"},
      {"eval", "--env", "sokoban", "--levels", "generated:8", "--runs", "40", "--seed", "3"},
      {"value", "--env", "2048", "--seed", "3", "--actions", "up,left", "--M", "400", "--T", "100"},
      {"value", "--env", "2048", "--seed", "3", "--M", "200", "--T", "50", "--action", "left"},
      {"value", "--env", "chain", "--variant", "noisy", "--M", "500", "--T", "50"},
      {"probe", "--env", "sokoban", "--seed", "1"},
      {"train", "--env", "chain", "--algorithm", "mc_grpo", "--updates", "40", "--M", "50", "--T", "5", "--seed", "2"},
      {"train", "--env", "sokoban", "--algorithm", "mc_ppo", "--updates", "20", "--M", "10", "--T", "10", "--seed", "2"},
      {"sweep", "--env", "chain", "--axis", "M", "--values", "0,20", "--updates", "20", "--seed", "4"},
      {"glad-gen", "--env", "2048", "--episodes", "4", "--max-steps", "25", "--budget", "16", "--seed", "6"},
  };
  int reproducible = 0;
  int invariant = 0;
  int failures = 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::vector<std::string> outputs;
    for (const char* workers : {"1", "1", "4", "16"}) {
      const std::string out = (dir / ("c" + std::to_string(i) + "_" + std::to_string(outputs.size()))).string();
      auto args = commands[i];
      args.insert(args.end(), {"--workers", workers, "--out", out});
      if (cli(args) != 0) {
        ++failures;
        outputs.push_back("");
        continue;
      }
      std::string text = slurp(out);
      if (args[0] == "glad-gen") text += slurp(out + ".stats.json");
      outputs.push_back(text);
    }
    if (!outputs[0].empty() && outputs[0] == outputs[1]) ++reproducible;
    if (!outputs[1].empty() && outputs[1] == outputs[2] && outputs[2] == outputs[3]) ++invariant;
  }
  fs::remove_all(dir);
  const int n = static_cast<int>(commands.size());
  return {reproducible == n && invariant == n && failures == 0,
          std::to_string(failures) + " failed invocations, " + std::to_string(reproducible) + "/" + std::to_string(n) + " commands byte-reproducible at --workers 1, " +
              std::to_string(invariant) + "/" + std::to_string(n) + " identical across --workers 1/4/16"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"rollout throughput", throughput},
      {"MC-GRPO degenerates to Step-GRPO", degeneration},
      {"MC critic consistency", critic_consistency},
      {"2048 semantics", semantics_2048},
      {"Sokoban reward ledger and deadlocks", sokoban_ledger},
      {"advantage and GAE algebra", algebra},
      {"learning signal", learning_signal},
      {"GLAD pipeline integrity", glad_integrity},
      {"CLI determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << "): " << v.detail
              << " [" << num(secs, 1) << " s]" << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
