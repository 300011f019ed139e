#include "proact/sokoban.hpp"

#include <algorithm>
#include <map>

#include "proact/episode.hpp"

namespace proact::sokoban {
namespace {

// Splits UTF-8 text into code points (each as its byte string).
std::vector<std::string> glyphs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const auto lead = static_cast<unsigned char>(line[i]);
    std::size_t len = 1;
    if (lead >= 0xf0) {
      len = 4;
    } else if (lead >= 0xe0) {
      len = 3;
    } else if (lead >= 0xc0) {
      len = 2;
    }
    if (i + len > line.size()) throw FormatError("truncated UTF-8 sequence in level text");
    out.emplace_back(line.substr(i, len));
    i += len;
  }
  return out;
}

std::size_t glyph_count(std::string_view s) { return glyphs(s).size(); }

const std::vector<std::string>& push_prefixed_alphabet() {
  static const std::vector<std::string> names = {"up",      "down",      "left",      "right",
                                                 "push up", "push down", "push left", "push right"};
  return names;
}

const std::vector<std::string>& direct_alphabet() {
  static const std::vector<std::string> names = {"up", "down", "left", "right"};
  return names;
}

}  // namespace

int Level::box_count() const { return static_cast<int>(std::count(boxes.begin(), boxes.end(), 1)); }

int Level::target_count() const {
  return static_cast<int>(std::count(cells.begin(), cells.end(), Tile::target));
}

int Level::boxes_on_target() const {
  int n = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) n += boxes[i] && cells[i] == Tile::target;
  return n;
}

std::vector<Pos> Level::box_positions() const {
  std::vector<Pos> out;
  for (int i = 0; i < rows * cols; ++i) {
    if (box(i)) out.push_back(pos(i));
  }
  return out;
}

std::vector<Pos> Level::target_positions() const {
  std::vector<Pos> out;
  for (int i = 0; i < rows * cols; ++i) {
    if (target(i)) out.push_back(pos(i));
  }
  return out;
}

SymbolTable SymbolTable::standard() { return {"#", " ", "?", "$", "*", "@", "+"}; }

SymbolTable SymbolTable::variant() { return {"#", "_", "O", "B", "\xe2\x88\x9a", "P", "+"}; }

void SymbolTable::validate() const {
  const std::array<const std::string*, 7> all = {&wall, &floor, &target, &box, &box_on_target, &player,
                                                 &player_on_target};
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (glyph_count(*all[i]) != 1) throw ConfigError("each Sokoban symbol must be exactly one character");
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (*all[i] == *all[j]) throw ConfigError("Sokoban symbols must be pairwise distinct");
    }
  }
}

Level parse_level(std::string_view text, const SymbolTable& symbols) {
  std::vector<std::vector<std::string>> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(glyphs(line));
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  while (!lines.empty() && lines.front().empty()) lines.erase(lines.begin());
  if (lines.empty()) throw FormatError("empty level");

  Level level;
  level.rows = static_cast<int>(lines.size());
  for (const auto& l : lines) level.cols = std::max(level.cols, static_cast<int>(l.size()));
  level.cells.assign(static_cast<std::size_t>(level.rows * level.cols), Tile::floor);
  level.boxes.assign(level.cells.size(), 0);

  int players = 0;
  for (int r = 0; r < level.rows; ++r) {
    const auto& line = lines[static_cast<std::size_t>(r)];
    for (int c = 0; c < static_cast<int>(line.size()); ++c) {
      const std::string& g = line[static_cast<std::size_t>(c)];
      const auto idx = static_cast<std::size_t>(level.index(r, c));
      if (g == symbols.wall) {
        level.cells[idx] = Tile::wall;
      } else if (g == symbols.floor) {
      } else if (g == symbols.target) {
        level.cells[idx] = Tile::target;
      } else if (g == symbols.box) {
        level.boxes[idx] = 1;
      } else if (g == symbols.box_on_target) {
        level.cells[idx] = Tile::target;
        level.boxes[idx] = 1;
      } else if (g == symbols.player) {
        level.player = static_cast<int>(idx);
        ++players;
      } else if (g == symbols.player_on_target) {
        level.cells[idx] = Tile::target;
        level.player = static_cast<int>(idx);
        ++players;
      } else {
        throw FormatError("unknown level character '" + g + "' at row " + std::to_string(r) + ", column " +
                          std::to_string(c));
      }
    }
  }
  if (players != 1) throw FormatError("level must contain exactly one player, found " + std::to_string(players));
  const int nb = level.box_count();
  const int nt = level.target_count();
  if (nb == 0) throw FormatError("level has no boxes");
  if (nb != nt) {
    throw FormatError("level has " + std::to_string(nb) + " boxes but " + std::to_string(nt) + " targets");
  }
  return level;
}

std::string render(const Level& level, const SymbolTable& symbols) {
  std::string out;
  for (int r = 0; r < level.rows; ++r) {
    if (r > 0) out.push_back('\n');
    for (int c = 0; c < level.cols; ++c) {
      const int idx = level.index(r, c);
      const Tile t = level.cells[static_cast<std::size_t>(idx)];
      if (t == Tile::wall) {
        out += symbols.wall;
      } else if (level.box(idx)) {
        out += t == Tile::target ? symbols.box_on_target : symbols.box;
      } else if (idx == level.player) {
        out += t == Tile::target ? symbols.player_on_target : symbols.player;
      } else {
        out += t == Tile::target ? symbols.target : symbols.floor;
      }
    }
  }
  return out;
}

bool deadlock_detected(const Level& level) {
  const auto blocked = [&](int r, int c) { return level.wall(r, c) || level.box(level.index(r, c)); };
  for (int idx = 0; idx < level.rows * level.cols; ++idx) {
    if (!level.box(idx) || level.target(idx)) continue;
    const auto [r, c] = level.pos(idx);
    const bool vertical = level.wall(r - 1, c) || level.wall(r + 1, c);
    const bool horizontal = level.wall(r, c - 1) || level.wall(r, c + 1);
    if (vertical && horizontal) return true;
    // Each 2x2 square that contains this box.
    for (int dr : {-1, 0}) {
      for (int dc : {-1, 0}) {
        const int r0 = r + dr;
        const int c0 = c + dc;
        if (blocked(r0, c0) && blocked(r0, c0 + 1) && blocked(r0 + 1, c0) && blocked(r0 + 1, c0 + 1)) return true;
      }
    }
  }
  return false;
}

Config Config::for_variant(std::string_view variant) {
  Config c;
  if (variant == "standard") {
  } else if (variant == "action") {
    c.action_variant = ActionVariant::direct_push;
  } else if (variant == "symbol") {
    c.symbols = SymbolTable::variant();
  } else {
    throw ConfigError("unknown Sokoban variant '" + std::string(variant) + "' (expected standard, action, symbol)");
  }
  c.variant = std::string(variant);
  return c;
}

void Config::validate() const {
  symbols.validate();
  if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
  if (invalid_limit < 0) throw ConfigError("invalid_limit must be >= 0");
  if (levels.empty()) throw ConfigError("Sokoban environment needs at least one level");
}

MoveEffect try_move(const Level& level, int dir, bool push, ActionVariant variant) {
  MoveEffect e;
  const Pos p = level.player_pos();
  const Pos d = kOffsets[static_cast<std::size_t>(dir)];
  const int nr = p.r + d.r;
  const int nc = p.c + d.c;
  if (level.wall(nr, nc)) return e;
  const int next = level.index(nr, nc);
  if (level.box(next)) {
    if (variant == ActionVariant::push_prefixed && !push) return e;
    const int br = nr + d.r;
    const int bc = nc + d.c;
    if (level.wall(br, bc) || level.box(level.index(br, bc))) return e;
    e.legal = true;
    e.pushed = true;
    e.box_from = next;
    e.box_to = level.index(br, bc);
    return e;
  }
  if (push) return e;
  e.legal = true;
  return e;
}

void commit_move(Level& level, int dir, const MoveEffect& effect) {
  const Pos p = level.player_pos();
  const Pos d = kOffsets[static_cast<std::size_t>(dir)];
  if (effect.pushed) {
    level.boxes[static_cast<std::size_t>(effect.box_from)] = 0;
    level.boxes[static_cast<std::size_t>(effect.box_to)] = 1;
  }
  level.player = level.index(p.r + d.r, p.c + d.c);
}

SokobanEnv::SokobanEnv(Config config) : config_(std::move(config)) {
  config_.validate();
  level_ = config_.levels.front();
}

std::pair<int, bool> SokobanEnv::decode(ActionId action) const {
  if (config_.action_variant == ActionVariant::direct_push) return {action, false};
  return {action % 4, action >= 4};
}

std::string SokobanEnv::reset(std::uint64_t seed) {
  level_index_ = static_cast<int>(seed % config_.levels.size());
  level_ = config_.levels[static_cast<std::size_t>(level_index_)];
  steps_ = 0;
  consecutive_invalid_ = 0;
  max_on_target_ = level_.boxes_on_target();
  on_events_ = off_events_ = solve_bonus_ = invalid_flag_ = 0;
  done_ = level_.solved();
  reason_ = done_ ? TerminalReason::solved : TerminalReason::none;
  return observation();
}

Transition SokobanEnv::apply(ActionId action) {
  require_not_done();
  ++steps_;
  on_events_ = off_events_ = solve_bonus_ = invalid_flag_ = 0;
  Transition tr;

  MoveEffect effect;
  int dir = 0;
  if (action >= 0 && action < action_count()) {
    bool push = false;
    std::tie(dir, push) = decode(action);
    effect = try_move(level_, dir, push, config_.action_variant);
  }
  if (!effect.legal) {
    tr.reward = kInvalidPenalty;
    tr.valid = false;
    invalid_flag_ = 1;
    ++consecutive_invalid_;
  } else {
    consecutive_invalid_ = 0;
    if (effect.pushed) {
      if (level_.target(effect.box_from)) ++off_events_;
      if (level_.target(effect.box_to)) ++on_events_;
    }
    commit_move(level_, dir, effect);
    tr.reward = on_events_ * kBoxOnReward + off_events_ * kBoxOffReward;
  }
  max_on_target_ = std::max(max_on_target_, level_.boxes_on_target());

  // Precedence: solved > deadlock > invalid_limit > step_limit.
  if (tr.valid && level_.solved()) {
    solve_bonus_ = kSolveBonus;
    tr.reward += kSolveBonus;
    reason_ = TerminalReason::solved;
  } else if (config_.deadlock_termination && deadlock_detected(level_)) {
    reason_ = TerminalReason::deadlock;
  } else if (config_.invalid_limit > 0 && consecutive_invalid_ >= config_.invalid_limit) {
    reason_ = TerminalReason::invalid_limit;
  } else if (steps_ >= config_.max_steps) {
    reason_ = TerminalReason::step_limit;
  }
  done_ = reason_ != TerminalReason::none;
  tr.done = done_;
  tr.reason = reason_;
  return tr;
}

std::string SokobanEnv::observation() const { return render(level_, config_.symbols); }

const std::vector<std::string>& SokobanEnv::action_alphabet() const {
  return config_.action_variant == ActionVariant::push_prefixed ? push_prefixed_alphabet() : direct_alphabet();
}

bool SokobanEnv::is_legal(ActionId action) const {
  if (action < 0 || action >= action_count()) return false;
  const auto [dir, push] = decode(action);
  return try_move(level_, dir, push, config_.action_variant).legal;
}

InfoMap SokobanEnv::info() const {
  return {{"boxes_on_target", level_.boxes_on_target()},
          {"max_boxes_on_target", max_on_target_},
          {"on_events", on_events_},
          {"off_events", off_events_},
          {"solve_bonus", solve_bonus_},
          {"invalid_flag", invalid_flag_},
          {"level", level_index_}};
}

StateSnapshot SokobanEnv::snapshot() const {
  ByteWriter w;
  w.put(static_cast<std::int32_t>(level_index_));
  w.put(static_cast<std::int32_t>(level_.player));
  w.put(static_cast<std::uint32_t>(level_.boxes.size()));
  for (auto b : level_.boxes) w.put(b);
  w.put(static_cast<std::int32_t>(steps_));
  w.put(static_cast<std::int32_t>(consecutive_invalid_));
  w.put(static_cast<std::uint8_t>(done_));
  w.put(static_cast<std::uint8_t>(reason_));
  w.put(static_cast<std::int32_t>(max_on_target_));
  w.put(on_events_);
  w.put(off_events_);
  w.put(solve_bonus_);
  w.put(invalid_flag_);
  return {kind(), config_.variant, w.take()};
}

void SokobanEnv::restore(const StateSnapshot& snapshot) {
  require_snapshot(snapshot);
  ByteReader r(snapshot.bytes);
  const int index = r.get<std::int32_t>();
  if (index < 0 || index >= static_cast<int>(config_.levels.size())) throw ContractError("snapshot level out of range");
  Level level = config_.levels[static_cast<std::size_t>(index)];
  level.player = r.get<std::int32_t>();
  const auto n = r.get<std::uint32_t>();
  if (n != level.boxes.size()) throw ContractError("snapshot does not match this level set");
  for (auto& b : level.boxes) b = r.get<std::uint8_t>();
  level_index_ = index;
  level_ = std::move(level);
  steps_ = r.get<std::int32_t>();
  consecutive_invalid_ = r.get<std::int32_t>();
  done_ = r.get<std::uint8_t>() != 0;
  reason_ = static_cast<TerminalReason>(r.get<std::uint8_t>());
  max_on_target_ = r.get<std::int32_t>();
  on_events_ = r.get<std::int64_t>();
  off_events_ = r.get<std::int64_t>();
  solve_bonus_ = r.get<std::int64_t>();
  invalid_flag_ = r.get<std::int64_t>();
  if (!r.exhausted()) throw FormatError("trailing bytes in Sokoban snapshot");
}

std::unique_ptr<Environment> SokobanEnv::clone() const { return std::make_unique<SokobanEnv>(*this); }

Metrics metrics(const Trajectory& trajectory, const SymbolTable& symbols) {
  Metrics m;
  m.steps = static_cast<int>(trajectory.turns.size());
  const std::string& first =
      trajectory.turns.empty() ? trajectory.final_observation : trajectory.turns.front().observation;
  if (!first.empty()) {
    const Level initial = parse_level(first, symbols);
    m.max_boxes_on_target = initial.boxes_on_target();
    m.solved = initial.solved();
  }
  for (const Turn& turn : trajectory.turns) {
    const auto it = turn.info.find("boxes_on_target");
    if (it == turn.info.end()) continue;
    m.max_boxes_on_target = std::max(m.max_boxes_on_target, static_cast<int>(it->second));
    if (auto bonus = turn.info.find("solve_bonus"); bonus != turn.info.end() && bonus->second > 0) m.solved = true;
  }
  if (!trajectory.turns.empty() && !trajectory.final_observation.empty()) {
    const Level last = parse_level(trajectory.final_observation, symbols);
    m.max_boxes_on_target = std::max(m.max_boxes_on_target, last.boxes_on_target());
    m.solved = m.solved || last.solved();
  }
  if (trajectory.terminal_reason == TerminalReason::solved) m.solved = true;
  return m;
}

}  // namespace proact::sokoban
