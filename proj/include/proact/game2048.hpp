#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "proact/env.hpp"

namespace proact {
struct Trajectory;
}

namespace proact::g2048 {

enum class Direction : std::uint8_t { up = 0, down = 1, left = 2, right = 3 };

inline constexpr std::array<Direction, 4> kDirections = {Direction::up, Direction::down,
                                                         Direction::left, Direction::right};

std::string_view to_string(Direction dir);

/// Square grid of tiles, row-major, 0 for empty. Every nonzero tile is
/// base * 2^n.
struct Board {
  int size = 4;
  std::uint32_t base = 2;
  std::array<std::uint32_t, 16> cells{};

  static Board empty(int size, std::uint32_t base);
  static Board from_rows(const std::vector<std::vector<std::uint32_t>>& rows, std::uint32_t base = 2);

  std::uint32_t at(int r, int c) const { return cells[static_cast<std::size_t>(r * size + c)]; }
  std::uint32_t& at(int r, int c) { return cells[static_cast<std::size_t>(r * size + c)]; }
  int empty_count() const;
  std::uint32_t max_tile() const;
  std::uint64_t tile_sum() const;
  std::vector<std::vector<std::uint32_t>> rows() const;

  bool operator==(const Board& other) const;
};

struct MoveResult {
  Board board;
  std::int64_t merge_sum = 0;
  bool moved = false;
};

// Slide toward `dir`, merging equal pairs nearest the wall first; each tile
// merges at most once per move.
MoveResult apply_move(const Board& board, Direction dir);

// Indices (row for left/right, column for up/down) and values of tiles
// created by merges along each line.
struct LineMerge {
  int line = 0;
  std::vector<std::uint32_t> created;
};
std::vector<LineMerge> describe_merges(const Board& board, Direction dir);

// Fill one uniformly chosen empty cell with base or 2*base.
void spawn_tile(Board& board, double spawn_high_prob, Rng& rng);

bool has_legal_move(const Board& board);

// "[  128     8     4     2][    8 ...]" with the given row separator.
std::string render_rows(const Board& board, std::string_view row_separator = "");
// "{'board': '<rows>'}"; escaped_newline puts a literal backslash-n between rows.
std::string serialize_board(const Board& board, bool escaped_newline = false);
// Accepts either form above (and real newlines between rows).
Board parse_board(std::string_view text, std::uint32_t base = 2);

struct Config {
  int size = 4;
  std::uint32_t base = 2;
  double spawn_high_prob = 0.1;
  int max_steps = 1000;
  int invalid_limit = 10;
  bool escaped_newline = false;
  std::string variant = "standard";

  // "standard" (4x4, base 2), "3x3", "3072" (base 3).
  static Config for_variant(std::string_view variant);
  void validate() const;
};

inline constexpr std::int64_t kFormatPenalty = -10;
inline constexpr std::int64_t kNoMovePenalty = -1;

class Game2048Env final : public Environment {
 public:
  explicit Game2048Env(Config config = {});

  EnvKind kind() const override { return EnvKind::game2048; }
  std::string_view variant() const override { return config_.variant; }
  int max_steps() const override { return config_.max_steps; }
  bool stochastic() const override { return true; }

  std::string reset(std::uint64_t seed) override;
  Transition apply(ActionId action) override;
  std::string observation() const override;
  const std::vector<std::string>& action_alphabet() const override;
  bool is_legal(ActionId action) const override;
  bool done() const override { return done_; }
  TerminalReason terminal_reason() const override { return reason_; }
  int steps() const override { return steps_; }
  InfoMap info() const override;

  StateSnapshot snapshot() const override;
  void restore(const StateSnapshot& snapshot) override;
  void reseed(std::uint64_t seed) override { rng_ = Rng(seed); }
  std::unique_ptr<Environment> clone() const override;

  const Board& board() const { return board_; }
  // Test hook: place an arbitrary board (counters untouched).
  void set_board(const Board& board);
  const Config& config() const { return config_; }
  int consecutive_invalid() const { return consecutive_invalid_; }

 private:
  void refresh_legal();

  Config config_;
  Board board_;
  Rng rng_;
  int steps_ = 0;
  int consecutive_invalid_ = 0;
  bool done_ = false;
  TerminalReason reason_ = TerminalReason::none;
  std::uint32_t highest_tile_ = 0;
  std::array<bool, 4> legal_{};
  std::int64_t last_merge_sum_ = 0;
  std::int64_t last_invalid_ = 0;  // 0 ok, 1 format, 2 no-move
};

struct Metrics {
  std::int64_t merge_score = 0;
  std::uint32_t highest_tile = 0;
};

// merge_score sums merges of valid steps only; penalties are not subtracted.
Metrics metrics(const Trajectory& trajectory);

}  // namespace proact::g2048
