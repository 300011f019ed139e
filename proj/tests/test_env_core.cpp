#include <doctest.h>

#include <sstream>

#include "proact/env_factory.hpp"
#include "proact/episode.hpp"
#include "proact/game2048.hpp"
#include "proact/policy.hpp"
#include "proact/response.hpp"
#include "proact/sokoban.hpp"
#include "proact/tabular_mdp.hpp"

using namespace proact;

namespace {

std::unique_ptr<Environment> env_named(const std::string& name) {
  EnvSpec spec;
  spec.env = name;
  return make_environment(spec);
}

}  // namespace

TEST_SUITE("env_core") {

TEST_CASE("snapshot, step, restore, step gives the same outcome") {
  for (const char* name : {"2048", "sokoban", "chain"}) {
    auto env = env_named(name);
    env->reset(4);
    RandomPolicy policy;
    Rng rng(1);
    for (int i = 0; i < 3 && !env->done(); ++i) env->step_action(policy.decide(*env, rng).action);
    if (env->done()) env->reset(5);
    const StateSnapshot snap = env->snapshot();
    const ActionId a = env->legal_actions().front();
    const StepOutcome first = env->step_action(a);
    env->restore(snap);
    const StepOutcome second = env->step_action(a);
    CHECK(first == second);
  }
}

TEST_CASE("restore rewinds the step counter and clears done") {
  auto env = env_named("2048");
  env->reset(2);
  RandomPolicy policy;
  Rng rng(3);
  for (int i = 0; i < 5; ++i) env->step_action(policy.decide(*env, rng).action);
  const StateSnapshot at5 = env->snapshot();
  while (!env->done()) env->step_action(policy.decide(*env, rng).action);
  env->restore(at5);
  CHECK(env->steps() == 5);
  CHECK_FALSE(env->done());
}

TEST_CASE("snapshots are typed") {
  auto g = env_named("2048");
  auto s = env_named("sokoban");
  g->reset(0);
  s->reset(0);
  CHECK_THROWS_AS(g->restore(s->snapshot()), ContractError);
  CHECK_THROWS_AS(s->restore(g->snapshot()), ContractError);
}

TEST_CASE("stepping a finished episode is an error") {
  auto env = env_named("chain");
  env->reset(0);
  while (!env->done()) env->step_action(0);
  CHECK_THROWS_AS(env->step_action(0), UsageError);
  env->reset(0);
  CHECK_NOTHROW(env->step_action(0));
}

TEST_CASE("configuration validation") {
  EnvSpec spec;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.env = "2048";
  spec.max_steps = 0;
  CHECK_THROWS_AS(make_environment(spec), ConfigError);
  spec.max_steps = -1;
  spec.variant = "hexagonal";
  CHECK_THROWS_AS(make_environment(spec), ConfigError);
  spec.env = "tetris";
  spec.variant = "standard";
  CHECK_THROWS_AS(make_environment(spec), ConfigError);
}

TEST_CASE("simplified Sokoban episodes stop at 20 steps") {
  auto env = env_named("sokoban");
  CHECK(env->max_steps() == 20);
  RandomPolicy policy(false);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Trajectory t = run_episode(*env, policy, seed, rng);
    CHECK(t.turns.size() <= 20);
  }
}

TEST_CASE("seeded episodes are byte-identical") {
  auto env = env_named("2048");
  RandomPolicy policy;
  Rng r1(derive_seed(7, 1));
  Rng r2(derive_seed(7, 1));
  const Trajectory a = run_episode(*env, policy, 7, r1);
  const Trajectory b = run_episode(*env, policy, 7, r2);
  std::ostringstream sa;
  std::ostringstream sb;
  write_transcript(sa, a);
  write_transcript(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(a == b);
}

TEST_CASE("trajectory totals and transcript round-trip") {
  for (const char* name : {"2048", "sokoban", "chain"}) {
    auto env = env_named(name);
    RandomPolicy policy(false);
    Rng rng(9);
    const Trajectory t = run_episode(*env, policy, 11, rng);
    std::int64_t sum = 0;
    for (const auto& turn : t.turns) {
      sum += turn.reward;
      const bool in_alphabet = env->action_id(turn.action) != kInvalidAction;
      CHECK((in_alphabet || turn.action == kInvalidActionName));
    }
    CHECK(sum == t.total_reward);
    CHECK(static_cast<int>(t.turns.size()) <= env->max_steps());
    std::stringstream ss;
    write_transcript(ss, t);
    CHECK(read_transcript(ss) == t);
  }
}

TEST_CASE("action text is normalized") {
  auto env = env_named("sokoban");
  CHECK(env->action_id("  Push   UP ") == env->action_id("push up"));
  CHECK(env->action_id("jump") == kInvalidAction);
  CHECK(normalize_action_text(" A\tB  c ") == "a b c");
}

TEST_CASE("hex encoding round-trips") {
  const std::vector<std::uint8_t> bytes = {0, 1, 0xab, 0xff};
  CHECK(to_hex(bytes) == "0001abff");
  CHECK(from_hex("0001abff") == bytes);
  CHECK_THROWS_AS(from_hex("abc"), FormatError);
}

TEST_CASE("terminal reasons have stable names") {
  for (auto r : {TerminalReason::none, TerminalReason::solved, TerminalReason::step_limit,
                 TerminalReason::invalid_limit, TerminalReason::deadlock, TerminalReason::env_done,
                 TerminalReason::aborted}) {
    CHECK(terminal_reason_from_string(to_string(r)) == r);
  }
}

}  // TEST_SUITE

TEST_SUITE("response") {

TEST_CASE("thought and action keys") {
  const ParsedResponse a = parse_response("thought: x\naction: left");
  CHECK(a.reasoning == "x");
  CHECK(a.action_text == "left");
  const ParsedResponse b = parse_response("thought: y\nmove: up");
  CHECK(b.reasoning == "y");
  CHECK(b.action_text == "up");
  CHECK_THROWS_AS(parse_response("let's go up"), FormatError);
  CHECK_FALSE(try_parse_response("action:   ").has_value());
}

TEST_CASE("the last action key wins") {
  const auto r = try_parse_response("action: up\nthinking more\nMove: down");
  REQUIRE(r.has_value());
  CHECK(r->action_text == "down");
}

}  // TEST_SUITE
