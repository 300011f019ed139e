#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "proact/episode.hpp"
#include "proact/game2048.hpp"
#include "proact/policy.hpp"

using namespace proact;
using namespace proact::g2048;

namespace {

const std::vector<std::vector<std::uint32_t>> kCaseStudy = {{128, 8, 4, 2}, {8, 4, 0, 0}, {4, 0, 0, 0}, {2, 0, 0, 2}};

Board random_board(Rng& rng, int size, std::uint32_t base) {
  Board b = Board::empty(size, base);
  const double fill = rng.uniform();
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      if (rng.uniform() < fill) b.at(r, c) = base << rng.below(rng.uniform() < 0.5 ? 3 : 11);
    }
  }
  return b;
}

bool closed_under_base(const Board& b) {
  for (int i = 0; i < b.size * b.size; ++i) {
    std::uint32_t v = b.cells[static_cast<std::size_t>(i)];
    if (v == 0) continue;
    if (v % b.base != 0) return false;
    v /= b.base;
    if ((v & (v - 1)) != 0) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("env_2048") {

TEST_CASE("up on the case-study board merges the two 2s in column 4") {
  const MoveResult m = apply_move(Board::from_rows(kCaseStudy), Direction::up);
  CHECK(m.moved);
  CHECK(m.merge_sum == 4);
  const auto rows = m.board.rows();
  CHECK(rows[0] == std::vector<std::uint32_t>{128, 8, 4, 4});
  for (int r = 1; r < 4; ++r) CHECK(rows[static_cast<std::size_t>(r)][3] == 0);
}

TEST_CASE("a full row of 2s merges pairwise once") {
  Board b = Board::empty(4, 2);
  for (int c = 0; c < 4; ++c) b.at(0, c) = 2;
  const MoveResult m = apply_move(b, Direction::left);
  CHECK(m.board.rows()[0] == std::vector<std::uint32_t>{4, 4, 0, 0});
  CHECK(m.merge_sum == 8);
}

TEST_CASE("a locked board does not move in any direction") {
  const Board b = Board::from_rows({{2, 4, 2, 4}, {4, 2, 4, 2}, {2, 4, 2, 4}, {4, 2, 4, 2}});
  for (Direction d : kDirections) {
    const MoveResult m = apply_move(b, d);
    CHECK_FALSE(m.moved);
    CHECK(m.merge_sum == 0);
    CHECK(m.board == b);
  }
  CHECK_FALSE(has_legal_move(b));
}

TEST_CASE("moves agree with the tile-by-tile oracle") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const int size = i % 5 == 0 ? 3 : 4;
    const Board b = random_board(rng, size, 2);
    for (int d = 0; d < 4; ++d) {
      const MoveResult m = apply_move(b, static_cast<Direction>(d));
      const oracle::Move2048 o = oracle::slide(b.rows(), d);
      REQUIRE(m.board.rows() == o.grid);
      REQUIRE(m.merge_sum == o.score);
      REQUIRE(m.moved == o.moved);
    }
  }
}

TEST_CASE("moves keep every tile a power-of-two multiple of the base") {
  Rng rng(5);
  for (std::uint32_t base : {2u, 3u}) {
    for (int i = 0; i < 500; ++i) {
      Board b = random_board(rng, 4, base);
      for (Direction d : kDirections) {
        MoveResult m = apply_move(b, d);
        if (m.board.empty_count() > 0) spawn_tile(m.board, 0.1, rng);
        CHECK(closed_under_base(m.board));
      }
    }
  }
}

TEST_CASE("spawning fills exactly one empty cell") {
  Rng rng(1);
  Board b = Board::empty(4, 2);
  spawn_tile(b, 0.1, rng);
  CHECK(b.empty_count() == 15);
  CHECK((b.max_tile() == 2 || b.max_tile() == 4));

  Board t = Board::empty(4, 3);
  for (int i = 0; i < 200; ++i) {
    t = Board::empty(4, 3);
    spawn_tile(t, 0.5, rng);
    CHECK((t.max_tile() == 3 || t.max_tile() == 6));
  }
}

TEST_CASE("high spawns occur at the configured rate") {
  Rng rng(99);
  int high = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    Board b = Board::empty(4, 2);
    spawn_tile(b, 0.1, rng);
    if (b.max_tile() == 4) ++high;
  }
  CHECK(std::abs(high / static_cast<double>(n) - 0.1) <= 0.01);
}

TEST_CASE("board text round-trips and matches the sample observation") {
  const Board b = Board::from_rows(kCaseStudy);
  CHECK(serialize_board(b) ==
        "{'board': '[  128     8     4     2][    8     4     .     .][    4     .     .     .][    2     .     .     2]'}");
  CHECK(serialize_board(b, true) ==
        "{'board': '[  128     8     4     2]\\n[    8     4     .     .]\\n[    4     .     .     .]\\n[    2     .     .     2]'}");
  CHECK(parse_board(serialize_board(b)) == b);
  CHECK(parse_board(serialize_board(b, true)) == b);
  CHECK(render_rows(Board::empty(3, 2)) == "[    .     .     .][    .     .     .][    .     .     .]");
}

TEST_CASE("reset places two tiles") {
  Game2048Env env;
  const std::string obs = env.reset(7);
  CHECK(env.board().empty_count() == 14);
  CHECK(parse_board(obs).empty_count() == 14);
}

TEST_CASE("rewards: merge sum, no-move penalty, format penalty") {
  Game2048Env env;
  env.reset(1);
  env.set_board(Board::from_rows(kCaseStudy));
  StepOutcome up = env.step("thought: x\naction: up");
  CHECK(up.valid);
  CHECK(up.reward == 4);

  env.reset(1);
  env.set_board(Board::from_rows({{2, 0, 0, 0}, {4, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}));
  const Board before = env.board();
  StepOutcome left = env.step("action: left");
  CHECK(left.reward == kNoMovePenalty);
  CHECK_FALSE(left.valid);
  CHECK(env.board() == before);

  StepOutcome bad = env.step("I will go up");
  CHECK(bad.reward == kFormatPenalty);
  CHECK(bad.action == kInvalidAction);
  CHECK(env.consecutive_invalid() == 2);
}

TEST_CASE("ten malformed responses end the episode") {
  Game2048Env env;
  FixedTextPolicy policy("no key here");
  Rng rng(0);
  const Trajectory t = run_episode(env, policy, 3, rng);
  CHECK(t.turns.size() == 10);
  CHECK(t.terminal_reason == TerminalReason::invalid_limit);
  CHECK(t.total_reward == 10 * kFormatPenalty);
  CHECK(metrics(t).merge_score == 0);
}

TEST_CASE("merge score matches an oracle replay of a random game") {
  Game2048Env env;
  RandomPolicy policy;
  Rng rng(derive_seed(7, 1));
  const Trajectory t = run_episode(env, policy, 7, rng);
  std::int64_t replayed = 0;
  for (const auto& turn : t.turns) {
    if (!turn.valid) continue;
    const int dir = env.action_id(turn.action);
    replayed += oracle::slide(parse_board(turn.observation).rows(), dir).score;
  }
  CHECK(metrics(t).merge_score == replayed);
  CHECK(replayed > 0);
}

TEST_CASE("a single 2+2 merge scores 4") {
  Game2048Env env;
  env.reset(0);
  env.set_board(Board::from_rows({{2, 2, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}));
  Trajectory t;
  t.env = "2048";
  Turn turn;
  turn.observation = env.observation();
  turn.action = "left";
  turn.reward = env.step_action(env.action_id("left")).reward;
  turn.valid = true;
  t.turns.push_back(turn);
  CHECK(metrics(t).merge_score == 4);
}

TEST_CASE("variants configure base and size") {
  CHECK(Config::for_variant("3x3").size == 3);
  CHECK(Config::for_variant("3072").base == 3);
  CHECK_THROWS_AS(Config::for_variant("5x5"), ConfigError);
  Config c;
  c.max_steps = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

}  // TEST_SUITE
