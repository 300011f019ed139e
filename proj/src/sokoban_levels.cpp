#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "proact/sokoban.hpp"

namespace proact::sokoban {
namespace {

std::string encode_state(const Level& level) {
  std::string key;
  key.reserve(2 + 2 * static_cast<std::size_t>(level.box_count()));
  const auto put = [&](int v) {
    key.push_back(static_cast<char>(v & 0xff));
    key.push_back(static_cast<char>(v >> 8));
  };
  put(level.player);
  for (int i = 0; i < level.rows * level.cols; ++i) {
    if (level.box(i)) put(i);
  }
  return key;
}

struct Node {
  Level level;
  int parent;
  int action;  // push-prefixed alphabet index
  int depth;
};

}  // namespace

SolveResult solve_bfs(const Level& start, int max_depth, std::size_t max_states) {
  SolveResult result;
  if (start.solved()) {
    result.status = SolveStatus::solved;
    return result;
  }
  std::vector<Node> nodes;
  std::unordered_map<std::string, int> seen;
  nodes.push_back({start, -1, -1, 0});
  seen.emplace(encode_state(start), 0);
  bool truncated = false;

  for (std::size_t head = 0; head < nodes.size(); ++head) {
    const int depth = nodes[head].depth;
    if (max_depth >= 0 && depth >= max_depth) {
      truncated = true;
      continue;
    }
    for (int dir = 0; dir < 4; ++dir) {
      const Level& cur = nodes[head].level;
      // The transition set is the same for both action variants; only the
      // labels differ, so explore with direct pushes and label afterwards.
      const MoveEffect effect = try_move(cur, dir, false, ActionVariant::direct_push);
      if (!effect.legal) continue;
      Level next = cur;
      commit_move(next, dir, effect);
      auto [it, inserted] = seen.emplace(encode_state(next), static_cast<int>(nodes.size()));
      if (!inserted) continue;
      const bool solved = effect.pushed && next.solved();
      nodes.push_back({std::move(next), static_cast<int>(head), effect.pushed ? dir + 4 : dir, depth + 1});
      if (solved) {
        result.status = SolveStatus::solved;
        result.length = depth + 1;
        static const char* names[] = {"up",      "down",      "left",      "right",
                                      "push up", "push down", "push left", "push right"};
        for (int n = static_cast<int>(nodes.size()) - 1; nodes[static_cast<std::size_t>(n)].parent >= 0;
             n = nodes[static_cast<std::size_t>(n)].parent) {
          result.actions.emplace_back(names[nodes[static_cast<std::size_t>(n)].action]);
        }
        std::reverse(result.actions.begin(), result.actions.end());
        return result;
      }
      if (nodes.size() >= max_states) {
        result.status = SolveStatus::limit;
        return result;
      }
    }
  }
  result.status = truncated ? SolveStatus::limit : SolveStatus::unsolvable;
  return result;
}

Level generate_level(Rng& rng, const GeneratorConfig& cfg) {
  if (cfg.rows < 4 || cfg.cols < 4 || cfg.boxes < 1) throw ConfigError("generator needs at least a 4x4 room and one box");
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    Level level;
    level.rows = cfg.rows;
    level.cols = cfg.cols;
    level.cells.assign(static_cast<std::size_t>(cfg.rows * cfg.cols), Tile::wall);
    level.boxes.assign(level.cells.size(), 0);
    std::vector<int> interior;
    for (int r = 1; r + 1 < cfg.rows; ++r) {
      for (int c = 1; c + 1 < cfg.cols; ++c) {
        level.cells[static_cast<std::size_t>(level.index(r, c))] = Tile::floor;
        interior.push_back(level.index(r, c));
      }
    }
    for (int w = 0; w < cfg.inner_walls; ++w) {
      const int idx = interior[rng.below(interior.size())];
      level.cells[static_cast<std::size_t>(idx)] = Tile::wall;
    }
    std::vector<int> floor;
    for (int idx : interior) {
      if (level.cells[static_cast<std::size_t>(idx)] != Tile::wall) floor.push_back(idx);
    }
    if (static_cast<int>(floor.size()) < 2 * cfg.boxes + 2) continue;

    // Connectivity of the open floor.
    std::vector<std::uint8_t> reached(level.cells.size(), 0);
    std::deque<int> queue{floor.front()};
    reached[static_cast<std::size_t>(floor.front())] = 1;
    std::size_t count = 1;
    while (!queue.empty()) {
      const Pos p = level.pos(queue.front());
      queue.pop_front();
      for (const Pos d : kOffsets) {
        if (level.wall(p.r + d.r, p.c + d.c)) continue;
        const int n = level.index(p.r + d.r, p.c + d.c);
        if (reached[static_cast<std::size_t>(n)]) continue;
        reached[static_cast<std::size_t>(n)] = 1;
        ++count;
        queue.push_back(n);
      }
    }
    if (count != floor.size()) continue;

    // Targets with boxes on them, then pull boxes away.
    std::vector<int> shuffled = floor;
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    for (int b = 0; b < cfg.boxes; ++b) {
      const auto idx = static_cast<std::size_t>(shuffled[static_cast<std::size_t>(b)]);
      level.cells[idx] = Tile::target;
      level.boxes[idx] = 1;
    }
    level.player = shuffled[static_cast<std::size_t>(cfg.boxes)];
    for (int s = 0; s < cfg.reverse_steps; ++s) {
      const int dir = static_cast<int>(rng.below(4));
      const Pos p = level.player_pos();
      const Pos d = kOffsets[static_cast<std::size_t>(dir)];
      if (level.wall(p.r + d.r, p.c + d.c) || level.box(level.index(p.r + d.r, p.c + d.c))) continue;
      const bool can_pull = !level.wall(p.r - d.r, p.c - d.c) && level.box(level.index(p.r - d.r, p.c - d.c));
      if (can_pull && rng.uniform() < 0.6) {
        level.boxes[static_cast<std::size_t>(level.index(p.r - d.r, p.c - d.c))] = 0;
        level.boxes[static_cast<std::size_t>(level.player)] = 1;
      }
      level.player = level.index(p.r + d.r, p.c + d.c);
    }
    if (level.solved() || deadlock_detected(level)) continue;
    const SolveResult solution = solve_bfs(level, cfg.max_optimal, 2'000'000);
    if (solution.status == SolveStatus::solved && solution.length >= 1 && solution.length <= cfg.max_optimal) {
      return level;
    }
  }
  throw ConfigError("level generator exhausted its attempts; relax the generator config");
}

std::vector<Level> read_levels(std::istream& in, const SymbolTable& symbols) {
  std::vector<Level> levels;
  std::string block;
  std::string line;
  const auto flush = [&] {
    if (!block.empty()) levels.push_back(parse_level(block, symbols));
    block.clear();
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    block += line;
    block.push_back('\n');
  }
  flush();
  if (levels.empty()) throw FormatError("level file contains no levels");
  return levels;
}

std::vector<Level> read_levels(const std::string& path, const SymbolTable& symbols) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open level file '" + path + "'");
  return read_levels(in, symbols);
}

void write_levels(std::ostream& out, const std::vector<Level>& levels, const SymbolTable& symbols) {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i > 0) out << '\n';
    out << render(levels[i], symbols) << '\n';
  }
}

void write_manifest(std::ostream& out, const std::vector<Level>& levels) {
  nlohmann::ordered_json manifest;
  manifest["levels"] = nlohmann::json::array();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const SolveResult s = solve_bfs(levels[i]);
    nlohmann::ordered_json entry = {{"id", i}, {"boxes", levels[i].box_count()}};
    entry["optimal"] = s.status == SolveStatus::solved ? nlohmann::json(s.length) : nlohmann::json(nullptr);
    manifest["levels"].push_back(entry);
  }
  out << manifest.dump(2) << '\n';
}

const std::vector<Level>& simplified_levels() {
  static const std::vector<Level> levels = {
      parse_level("#####\n#@  #\n#$ $#\n#? ?#\n#####"),
      parse_level("#####\n#@  #\n# $ #\n#  ?#\n#####"),
      parse_level("######\n#?   #\n# $  #\n#  @ #\n######"),
      parse_level("######\n#@   #\n# $$ #\n#?  ?#\n######"),
  };
  return levels;
}

}  // namespace proact::sokoban
