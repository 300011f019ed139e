#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "proact/env_factory.hpp"
#include "proact/game2048.hpp"
#include "proact/mc_critic.hpp"
#include "proact/sokoban.hpp"
#include "proact/tabular_mdp.hpp"

using namespace proact;

namespace {

// Start -> middle (r=1) -> end (r=2), single action: return 1 + 0.9*2.
tabular::Mdp two_step_line() {
  tabular::Mdp m;
  m.name = "line";
  m.n_states = 3;
  m.n_actions = 1;
  m.transitions = {{{{1.0, 1, 1}}}, {{{1.0, 2, 2}}}, {{{1.0, 2, 0}}}};
  m.terminal = {0, 0, 1};
  m.max_steps = 10;
  return m;
}

StateSnapshot started(Environment& env, std::uint64_t seed) {
  env.reset(seed);
  return env.snapshot();
}

}  // namespace

TEST_SUITE("mc_critic") {

TEST_CASE("one rollout of rewards [1,2] at gamma 0.9 gives 2.8") {
  tabular::MdpEnv env(two_step_line());
  McConfig cfg;
  cfg.M = 1;
  cfg.T = 10;
  const ValueEstimate v = estimate_v(env, started(env, 0), cfg);
  CHECK(v.mean == doctest::Approx(2.8).epsilon(1e-12));
  CHECK_FALSE(v.has_error);
  CHECK(v.std_error == 0.0);
}

TEST_CASE("M=0 or T=0 gives a flagged zero") {
  g2048::Game2048Env env;
  const StateSnapshot s = started(env, 1);
  for (auto [m, t] : {std::pair{0, 100}, std::pair{100, 0}}) {
    McConfig cfg;
    cfg.M = m;
    cfg.T = t;
    const ValueEstimate v = estimate_v(env, s, cfg);
    CHECK(v.mean == 0.0);
    CHECK(v.degenerate);
    const QEstimate q = estimate_q(env, s, 0, cfg);
    CHECK(q.degenerate);
  }
  McConfig bad;
  bad.M = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("estimates match the dynamic-programming value on small chains") {
  for (const tabular::Mdp& mdp : {tabular::two_state_chain(), tabular::noisy_chain(7, 0.2, 5)}) {
    tabular::MdpEnv env(mdp);
    const StateSnapshot s = started(env, 0);
    McConfig cfg;
    cfg.M = 1000;
    cfg.T = 200;
    cfg.gamma = 0.9;
    cfg.base_seed = 17;
    const ValueEstimate v = estimate_v(env, s, cfg);
    const double truth = oracle::random_value(mdp, mdp.start, cfg.T, cfg.gamma);
    CHECK(truth == doctest::Approx(tabular::random_policy_value(mdp, mdp.start, cfg.T, cfg.gamma)).epsilon(1e-12));
    CHECK(std::abs(v.mean - truth) <= 4 * v.std_error);
  }
}

TEST_CASE("the delayed chain's exact Q values favour the delayed arm") {
  const tabular::Mdp m = tabular::delayed_reward_chain();
  CHECK(tabular::random_policy_q(m, 0, 0, 10, 0.9) == doctest::Approx(7.29));
  CHECK(tabular::random_policy_q(m, 0, 1, 10, 0.9) == doctest::Approx(1.0));
}

TEST_CASE("results do not depend on the worker count and match the serial reference") {
  g2048::Game2048Env env;
  const StateSnapshot s = started(env, 5);
  McConfig cfg;
  cfg.M = 64;
  cfg.T = 50;
  cfg.base_seed = 3;
  cfg.workers = 1;
  const ValueEstimate serial = estimate_v_serial(env, s, cfg);
  for (int w : {1, 2, 4, 16}) {
    cfg.workers = w;
    const ValueEstimate v = estimate_v(env, s, cfg);
    CHECK(v.mean == serial.mean);
    CHECK(v.std_error == serial.std_error);
  }
}

TEST_CASE("deterministic Q is exactly r + gamma V of the successor") {
  EnvSpec spec;
  spec.env = "sokoban";
  auto env = make_environment(spec);
  const StateSnapshot s = started(*env, 0);
  McConfig cfg;
  cfg.M = 50;
  cfg.T = 20;
  cfg.gamma = 1.0;
  cfg.K = 8;
  const ActionId a = env->action_id("push down");
  const QEstimate q = estimate_q(*env, s, a, cfg);
  REQUIRE(q.components.size() == 1);
  const double expected = static_cast<double>(q.components[0].reward) + cfg.gamma * q.components[0].value;
  CHECK(q.mean == expected);
}

TEST_CASE("gamma 0 leaves the mean immediate reward") {
  g2048::Game2048Env env;
  env.reset(0);
  env.set_board(g2048::Board::from_rows({{2, 2, 0, 0}, {4, 4, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}));
  McConfig cfg;
  cfg.M = 20;
  cfg.T = 10;
  cfg.gamma = 0.0;
  const QEstimate q = estimate_q(env, env.snapshot(), env.action_id("left"), cfg);
  CHECK(q.mean == doctest::Approx(12.0));
}

TEST_CASE("K=4 and K=32 agree on a 2048 state") {
  g2048::Game2048Env env;
  const StateSnapshot s = started(env, 8);
  McConfig small;
  small.M = 100;
  small.T = 30;
  small.K = 4;
  McConfig large = small;
  large.K = 32;
  large.base_seed = 99;
  const QEstimate a = estimate_q(env, s, 0, small);
  const QEstimate b = estimate_q(env, s, 0, large);
  CHECK(a.components.size() == 4);
  CHECK(b.components.size() == 32);
  const double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
  CHECK(std::abs(a.mean - b.mean) <= 4 * se);
}

TEST_CASE("Q for every action") {
  g2048::Game2048Env g;
  McConfig cfg;
  cfg.M = 10;
  cfg.T = 10;
  CHECK(estimate_q_all(g, started(g, 0), cfg).size() == 4);
  EnvSpec spec;
  spec.env = "sokoban";
  auto s = make_environment(spec);
  CHECK(estimate_q_all(*s, started(*s, 0), cfg).size() == 8);
}

TEST_CASE("mirror-symmetric board gives matching left and right values") {
  g2048::Game2048Env env;
  env.reset(0);
  env.set_board(g2048::Board::from_rows({{2, 4, 4, 2}, {0, 8, 8, 0}, {2, 0, 0, 2}, {0, 0, 0, 0}}));
  McConfig cfg;
  cfg.M = 200;
  cfg.T = 40;
  cfg.K = 16;
  const auto snap = env.snapshot();
  const QEstimate l = estimate_q(env, snap, env.action_id("left"), cfg);
  McConfig other = cfg;
  other.base_seed = 1234;
  const QEstimate r = estimate_q(env, snap, env.action_id("right"), other);
  const double se = std::sqrt(l.std_error * l.std_error + r.std_error * r.std_error);
  CHECK(std::abs(l.mean - r.mean) <= 4 * se);
}

TEST_CASE("terminal states are worth nothing") {
  tabular::MdpEnv env(two_step_line());
  env.reset(0);
  env.step_action(0);
  env.step_action(0);
  REQUIRE(env.done());
  McConfig cfg;
  cfg.M = 10;
  cfg.T = 10;
  CHECK(estimate_v(env, env.snapshot(), cfg).mean == 0.0);
}

TEST_CASE("bench: zero rollouts do no work, parallel matches serial") {
  g2048::Game2048Env env;
  const BenchResult none = bench_rollouts(env, 0, 1000, 0, 1);
  CHECK(none.steps == 0);
  CHECK(none.wall_seconds < 0.1);
  const BenchResult a = bench_rollouts(env, 50, 200, 4, 4);
  const BenchResult b = bench_rollouts_serial(env, 50, 200, 4);
  CHECK(a.steps == b.steps);
  CHECK(a.mean_return == b.mean_return);
}

TEST_CASE("pairwise sum is exact on integers and order-fixed") {
  std::vector<double> x(1001);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  CHECK(pairwise_sum(x.data(), x.size()) == 500500.0);
  CHECK(pairwise_sum(x.data(), 0) == 0.0);
}

}  // TEST_SUITE
