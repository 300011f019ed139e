#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proact/env.hpp"

namespace proact {
struct Trajectory;
}

namespace proact::sokoban {

enum class Tile : std::uint8_t { wall, floor, target };

struct Pos {
  int r = 0;
  int c = 0;
  auto operator<=>(const Pos&) const = default;
};

inline constexpr std::array<Pos, 4> kOffsets = {Pos{-1, 0}, Pos{1, 0}, Pos{0, -1}, Pos{0, 1}};
inline constexpr std::array<std::string_view, 4> kDirNames = {"up", "down", "left", "right"};

/// Rectangular level. Boxes are a per-cell mask; cells outside the grid count
/// as walls.
struct Level {
  int rows = 0;
  int cols = 0;
  std::vector<Tile> cells;
  std::vector<std::uint8_t> boxes;
  int player = 0;

  int index(int r, int c) const { return r * cols + c; }
  Pos pos(int idx) const { return {idx / cols, idx % cols}; }
  bool inside(int r, int c) const { return r >= 0 && r < rows && c >= 0 && c < cols; }
  bool wall(int r, int c) const { return !inside(r, c) || cells[static_cast<std::size_t>(index(r, c))] == Tile::wall; }
  bool target(int idx) const { return cells[static_cast<std::size_t>(idx)] == Tile::target; }
  bool box(int idx) const { return boxes[static_cast<std::size_t>(idx)] != 0; }

  int box_count() const;
  int target_count() const;
  int boxes_on_target() const;
  bool solved() const { return boxes_on_target() == box_count(); }
  std::vector<Pos> box_positions() const;
  std::vector<Pos> target_positions() const;
  Pos player_pos() const { return pos(player); }

  bool operator==(const Level&) const = default;
};

/// Glyphs for each semantic cell; one UTF-8 code point each.
struct SymbolTable {
  std::string wall;
  std::string floor;
  std::string target;
  std::string box;
  std::string box_on_target;
  std::string player;
  std::string player_on_target;

  static SymbolTable standard();
  static SymbolTable variant();
  void validate() const;

  bool operator==(const SymbolTable&) const = default;
};

// Rows may be ragged; short rows are padded with floor.
Level parse_level(std::string_view text, const SymbolTable& symbols = SymbolTable::standard());
std::string render(const Level& level, const SymbolTable& symbols = SymbolTable::standard());

// Sound but incomplete: an off-target box in a corner, or a 2x2 block of
// walls/boxes holding at least one off-target box.
bool deadlock_detected(const Level& level);

enum class ActionVariant : std::uint8_t { push_prefixed, direct_push };

inline constexpr std::int64_t kBoxOnReward = 1;
inline constexpr std::int64_t kBoxOffReward = -1;
inline constexpr std::int64_t kSolveBonus = 10;
inline constexpr std::int64_t kInvalidPenalty = -2;

struct Config {
  ActionVariant action_variant = ActionVariant::push_prefixed;
  SymbolTable symbols = SymbolTable::standard();
  int max_steps = 200;
  bool deadlock_termination = true;
  int invalid_limit = 0;  // 0 disables
  std::string variant = "standard";
  std::vector<Level> levels;

  // "standard", "action" (direct push), "symbol" (variant glyphs).
  static Config for_variant(std::string_view variant);
  void validate() const;
};

// Outcome of moving the player one cell; shared by the environment and the
// search oracle so both agree on the rules.
struct MoveEffect {
  bool legal = false;
  bool pushed = false;
  int box_from = -1;
  int box_to = -1;
};
MoveEffect try_move(const Level& level, int dir, bool push, ActionVariant variant);
void commit_move(Level& level, int dir, const MoveEffect& effect);

class SokobanEnv final : public Environment {
 public:
  explicit SokobanEnv(Config config);

  EnvKind kind() const override { return EnvKind::sokoban; }
  std::string_view variant() const override { return config_.variant; }
  int max_steps() const override { return config_.max_steps; }
  bool stochastic() const override { return false; }

  // Selects level (seed mod level count).
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
  void reseed(std::uint64_t) override {}
  std::unique_ptr<Environment> clone() const override;

  const Level& level() const { return level_; }
  int level_index() const { return level_index_; }
  const Config& config() const { return config_; }

 private:
  // Decodes an action id into (direction, push flag).
  std::pair<int, bool> decode(ActionId action) const;

  Config config_;
  Level level_;
  int level_index_ = 0;
  int steps_ = 0;
  int consecutive_invalid_ = 0;
  bool done_ = true;
  TerminalReason reason_ = TerminalReason::none;
  int max_on_target_ = 0;
  std::int64_t on_events_ = 0;
  std::int64_t off_events_ = 0;
  std::int64_t solve_bonus_ = 0;
  std::int64_t invalid_flag_ = 0;
};

struct Metrics {
  int max_boxes_on_target = 0;
  bool solved = false;
  int steps = 0;
};

Metrics metrics(const Trajectory& trajectory, const SymbolTable& symbols = SymbolTable::standard());

// ---- search oracle and level tooling ----

enum class SolveStatus { solved, unsolvable, limit };

struct SolveResult {
  SolveStatus status = SolveStatus::limit;
  int length = 0;
  // Actions in the push-prefixed alphabet ("up", "push left", ...).
  std::vector<std::string> actions;
};

// Breadth-first search over (player, boxes). max_depth < 0 means unbounded;
// with an unbounded depth and enough state budget, `unsolvable` is a proof.
SolveResult solve_bfs(const Level& level, int max_depth = -1, std::size_t max_states = 4'000'000);

struct GeneratorConfig {
  int rows = 6;
  int cols = 6;
  int boxes = 2;
  int inner_walls = 2;
  int reverse_steps = 40;
  int max_optimal = 20;
  int max_attempts = 2000;
};

// Reverse-play generation: boxes start on targets and are pulled away; the
// result is accepted only if BFS solves it in 1..max_optimal steps.
Level generate_level(Rng& rng, const GeneratorConfig& config);

std::vector<Level> read_levels(std::istream& in, const SymbolTable& symbols = SymbolTable::standard());
std::vector<Level> read_levels(const std::string& path, const SymbolTable& symbols = SymbolTable::standard());
void write_levels(std::ostream& out, const std::vector<Level>& levels,
                  const SymbolTable& symbols = SymbolTable::standard());
// Sidecar manifest: {"levels": [{"id", "boxes", "optimal"}]}.
void write_manifest(std::ostream& out, const std::vector<Level>& levels);

// Four small levels solvable within 20 steps, the first two from the
// from-scratch training set.
const std::vector<Level>& simplified_levels();

}  // namespace proact::sokoban
