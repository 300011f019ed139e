#include "proact/game2048.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "proact/episode.hpp"

namespace proact::g2048 {
namespace {

// Cell index of position `k` (counted from the wall) on line `line`.
int line_cell(int size, Direction dir, int line, int k) {
  switch (dir) {
    case Direction::left: return line * size + k;
    case Direction::right: return line * size + (size - 1 - k);
    case Direction::up: return k * size + line;
    case Direction::down: return (size - 1 - k) * size + line;
  }
  return 0;
}

bool is_power_multiple(std::uint32_t value, std::uint32_t base) {
  if (value == 0 || value % base != 0) return false;
  const std::uint32_t q = value / base;
  return (q & (q - 1)) == 0;
}

const std::vector<std::string>& alphabet() {
  static const std::vector<std::string> names = {"up", "down", "left", "right"};
  return names;
}

}  // namespace

std::string_view to_string(Direction dir) { return alphabet()[static_cast<std::size_t>(dir)]; }

Board Board::empty(int size, std::uint32_t base) {
  Board b;
  b.size = size;
  b.base = base;
  return b;
}

Board Board::from_rows(const std::vector<std::vector<std::uint32_t>>& rows, std::uint32_t base) {
  const int n = static_cast<int>(rows.size());
  if (n != 3 && n != 4) throw FormatError("board must be 3x3 or 4x4");
  Board b = empty(n, base);
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != n) throw FormatError("board must be square");
    for (int c = 0; c < n; ++c) {
      const std::uint32_t v = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      if (v != 0 && !is_power_multiple(v, base)) {
        throw FormatError("tile " + std::to_string(v) + " is not base*2^n for base " + std::to_string(base));
      }
      b.at(r, c) = v;
    }
  }
  return b;
}

int Board::empty_count() const {
  int n = 0;
  for (int i = 0; i < size * size; ++i) n += cells[static_cast<std::size_t>(i)] == 0;
  return n;
}

std::uint32_t Board::max_tile() const {
  return *std::max_element(cells.begin(), cells.begin() + size * size);
}

std::uint64_t Board::tile_sum() const {
  std::uint64_t s = 0;
  for (int i = 0; i < size * size; ++i) s += cells[static_cast<std::size_t>(i)];
  return s;
}

std::vector<std::vector<std::uint32_t>> Board::rows() const {
  std::vector<std::vector<std::uint32_t>> out(static_cast<std::size_t>(size));
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) out[static_cast<std::size_t>(r)].push_back(at(r, c));
  }
  return out;
}

bool Board::operator==(const Board& other) const {
  return size == other.size && base == other.base &&
         std::equal(cells.begin(), cells.begin() + size * size, other.cells.begin());
}

MoveResult apply_move(const Board& board, Direction dir) {
  MoveResult result{board, 0, false};
  const int n = board.size;
  for (int line = 0; line < n; ++line) {
    std::uint32_t packed[4];
    int count = 0;
    for (int k = 0; k < n; ++k) {
      const std::uint32_t v = board.cells[static_cast<std::size_t>(line_cell(n, dir, line, k))];
      if (v != 0) packed[count++] = v;
    }
    std::uint32_t out[4] = {0, 0, 0, 0};
    int w = 0;
    for (int i = 0; i < count; ++i) {
      if (i + 1 < count && packed[i] == packed[i + 1]) {
        out[w] = packed[i] * 2;
        result.merge_sum += out[w];
        ++w;
        ++i;
      } else {
        out[w++] = packed[i];
      }
    }
    for (int k = 0; k < n; ++k) {
      const auto idx = static_cast<std::size_t>(line_cell(n, dir, line, k));
      if (result.board.cells[idx] != out[k]) result.moved = true;
      result.board.cells[idx] = out[k];
    }
  }
  return result;
}

std::vector<LineMerge> describe_merges(const Board& board, Direction dir) {
  std::vector<LineMerge> merges;
  const int n = board.size;
  for (int line = 0; line < n; ++line) {
    std::vector<std::uint32_t> packed;
    for (int k = 0; k < n; ++k) {
      const std::uint32_t v = board.cells[static_cast<std::size_t>(line_cell(n, dir, line, k))];
      if (v != 0) packed.push_back(v);
    }
    LineMerge lm{line, {}};
    for (std::size_t i = 0; i < packed.size(); ++i) {
      if (i + 1 < packed.size() && packed[i] == packed[i + 1]) {
        lm.created.push_back(packed[i] * 2);
        ++i;
      }
    }
    if (!lm.created.empty()) merges.push_back(std::move(lm));
  }
  return merges;
}

void spawn_tile(Board& board, double spawn_high_prob, Rng& rng) {
  const int empties = board.empty_count();
  if (empties == 0) throw ContractError("spawn_tile on a full board");
  auto pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(empties)));
  const std::uint32_t value = rng.uniform() < spawn_high_prob ? 2 * board.base : board.base;
  for (int i = 0; i < board.size * board.size; ++i) {
    auto& cell = board.cells[static_cast<std::size_t>(i)];
    if (cell != 0) continue;
    if (pick-- == 0) {
      cell = value;
      return;
    }
  }
}

bool has_legal_move(const Board& board) {
  const int n = board.size;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::uint32_t v = board.at(r, c);
      if (v == 0) return true;
      if (c + 1 < n && board.at(r, c + 1) == v) return true;
      if (r + 1 < n && board.at(r + 1, c) == v) return true;
    }
  }
  return false;
}

std::string render_rows(const Board& board, std::string_view row_separator) {
  std::string out;
  char field[32];
  for (int r = 0; r < board.size; ++r) {
    if (r > 0) out += row_separator;
    out.push_back('[');
    for (int c = 0; c < board.size; ++c) {
      if (c > 0) out.push_back(' ');
      const std::uint32_t v = board.at(r, c);
      if (v == 0) {
        std::snprintf(field, sizeof field, "%5s", ".");
      } else {
        std::snprintf(field, sizeof field, "%5u", v);
      }
      out += field;
    }
    out.push_back(']');
  }
  return out;
}

std::string serialize_board(const Board& board, bool escaped_newline) {
  return "{'board': '" + render_rows(board, escaped_newline ? "\\n" : "") + "'}";
}

Board parse_board(std::string_view text, std::uint32_t base) {
  std::vector<std::vector<std::uint32_t>> rows;
  std::size_t pos = 0;
  while ((pos = text.find('[', pos)) != std::string_view::npos) {
    const std::size_t end = text.find(']', pos);
    if (end == std::string_view::npos) throw FormatError("unterminated board row");
    std::vector<std::uint32_t> row;
    std::string token;
    const auto flush = [&] {
      if (token.empty()) return;
      if (token == ".") {
        row.push_back(0);
      } else {
        for (char ch : token) {
          if (!std::isdigit(static_cast<unsigned char>(ch))) throw FormatError("bad board token '" + token + "'");
        }
        row.push_back(static_cast<std::uint32_t>(std::stoul(token)));
      }
      token.clear();
    };
    for (std::size_t i = pos + 1; i < end; ++i) {
      const char ch = text[i];
      if (ch == ' ' || ch == '\t' || ch == ',') {
        flush();
      } else {
        token.push_back(ch);
      }
    }
    flush();
    rows.push_back(std::move(row));
    pos = end + 1;
  }
  return Board::from_rows(rows, base);
}

Config Config::for_variant(std::string_view variant) {
  Config c;
  if (variant == "standard" || variant == "4x4") {
    c.variant = "standard";
  } else if (variant == "3x3") {
    c.size = 3;
    c.variant = "3x3";
  } else if (variant == "3072") {
    c.base = 3;
    c.variant = "3072";
  } else {
    throw ConfigError("unknown 2048 variant '" + std::string(variant) + "' (expected standard, 3x3, 3072)");
  }
  return c;
}

void Config::validate() const {
  if (size != 3 && size != 4) throw ConfigError("2048 size must be 3 or 4");
  if (base != 2 && base != 3) throw ConfigError("2048 base must be 2 or 3");
  if (!(spawn_high_prob >= 0.0 && spawn_high_prob <= 1.0)) throw ConfigError("spawn_high_prob must lie in [0,1]");
  if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
  if (invalid_limit < 1) throw ConfigError("invalid_limit must be >= 1");
}

Game2048Env::Game2048Env(Config config) : config_(std::move(config)) {
  config_.validate();
  board_ = Board::empty(config_.size, config_.base);
  done_ = true;
}

std::string Game2048Env::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  board_ = Board::empty(config_.size, config_.base);
  spawn_tile(board_, config_.spawn_high_prob, rng_);
  spawn_tile(board_, config_.spawn_high_prob, rng_);
  steps_ = 0;
  consecutive_invalid_ = 0;
  done_ = false;
  reason_ = TerminalReason::none;
  highest_tile_ = board_.max_tile();
  last_merge_sum_ = 0;
  last_invalid_ = 0;
  refresh_legal();
  return observation();
}

void Game2048Env::refresh_legal() {
  for (auto dir : kDirections) legal_[static_cast<std::size_t>(dir)] = apply_move(board_, dir).moved;
}

void Game2048Env::set_board(const Board& board) {
  if (board.size != config_.size || board.base != config_.base) throw ContractError("board shape does not match config");
  board_ = board;
  highest_tile_ = std::max(highest_tile_, board_.max_tile());
  done_ = false;
  reason_ = TerminalReason::none;
  refresh_legal();
}

Transition Game2048Env::apply(ActionId action) {
  require_not_done();
  ++steps_;
  Transition tr;
  last_merge_sum_ = 0;
  if (action < 0 || action >= 4) {
    tr.reward = kFormatPenalty;
    tr.valid = false;
    last_invalid_ = 1;
    ++consecutive_invalid_;
  } else {
    MoveResult mv = apply_move(board_, static_cast<Direction>(action));
    if (!mv.moved) {
      tr.reward = kNoMovePenalty;
      tr.valid = false;
      last_invalid_ = 2;
      ++consecutive_invalid_;
    } else {
      board_ = mv.board;
      spawn_tile(board_, config_.spawn_high_prob, rng_);
      highest_tile_ = std::max(highest_tile_, board_.max_tile());
      tr.reward = mv.merge_sum;
      last_merge_sum_ = mv.merge_sum;
      last_invalid_ = 0;
      consecutive_invalid_ = 0;
      refresh_legal();
    }
  }

  // Precedence: env_done > invalid_limit > step_limit.
  if (tr.valid && !legal_[0] && !legal_[1] && !legal_[2] && !legal_[3]) {
    reason_ = TerminalReason::env_done;
  } else if (consecutive_invalid_ >= config_.invalid_limit) {
    reason_ = TerminalReason::invalid_limit;
  } else if (steps_ >= config_.max_steps) {
    reason_ = TerminalReason::step_limit;
  }
  done_ = reason_ != TerminalReason::none;
  tr.done = done_;
  tr.reason = reason_;
  return tr;
}

std::string Game2048Env::observation() const { return serialize_board(board_, config_.escaped_newline); }

const std::vector<std::string>& Game2048Env::action_alphabet() const { return alphabet(); }

bool Game2048Env::is_legal(ActionId action) const {
  return action >= 0 && action < 4 && legal_[static_cast<std::size_t>(action)];
}

InfoMap Game2048Env::info() const {
  return {{"merge_sum", last_merge_sum_},
          {"invalid_flag", last_invalid_},
          {"max_tile", static_cast<std::int64_t>(highest_tile_)},
          {"consecutive_invalid", consecutive_invalid_}};
}

StateSnapshot Game2048Env::snapshot() const {
  ByteWriter w;
  w.put(static_cast<std::int32_t>(board_.size));
  w.put(board_.base);
  w.put(board_.cells);
  w.put(rng_.seed());
  w.put(rng_.counter());
  w.put(static_cast<std::int32_t>(steps_));
  w.put(static_cast<std::int32_t>(consecutive_invalid_));
  w.put(static_cast<std::uint8_t>(done_));
  w.put(static_cast<std::uint8_t>(reason_));
  w.put(highest_tile_);
  w.put(last_merge_sum_);
  w.put(last_invalid_);
  return {kind(), config_.variant, w.take()};
}

void Game2048Env::restore(const StateSnapshot& snapshot) {
  require_snapshot(snapshot);
  ByteReader r(snapshot.bytes);
  Board b;
  b.size = r.get<std::int32_t>();
  b.base = r.get<std::uint32_t>();
  b.cells = r.get<std::array<std::uint32_t, 16>>();
  if (b.size != config_.size || b.base != config_.base) throw ContractError("snapshot board shape mismatch");
  const auto seed = r.get<std::uint64_t>();
  const auto counter = r.get<std::uint64_t>();
  board_ = b;
  rng_ = Rng(seed, counter);
  steps_ = r.get<std::int32_t>();
  consecutive_invalid_ = r.get<std::int32_t>();
  done_ = r.get<std::uint8_t>() != 0;
  reason_ = static_cast<TerminalReason>(r.get<std::uint8_t>());
  highest_tile_ = r.get<std::uint32_t>();
  last_merge_sum_ = r.get<std::int64_t>();
  last_invalid_ = r.get<std::int64_t>();
  if (!r.exhausted()) throw FormatError("trailing bytes in 2048 snapshot");
  refresh_legal();
}

std::unique_ptr<Environment> Game2048Env::clone() const { return std::make_unique<Game2048Env>(*this); }

Metrics metrics(const Trajectory& trajectory) {
  Metrics m;
  for (const Turn& turn : trajectory.turns) {
    if (turn.valid) m.merge_score += turn.reward;
    if (auto it = turn.info.find("max_tile"); it != turn.info.end()) {
      m.highest_tile = std::max(m.highest_tile, static_cast<std::uint32_t>(it->second));
    }
  }
  return m;
}

}  // namespace proact::g2048
