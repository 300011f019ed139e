#include "oracles.hpp"

#include <deque>
#include <set>

namespace oracle {

bool sokoban_solvable(const proact::sokoban::Level& level, std::size_t max_states) {
  using State = std::pair<int, std::vector<int>>;  // player cell, sorted box cells
  const auto is_wall = [&](int r, int c) {
    return r < 0 || r >= level.rows || c < 0 || c >= level.cols ||
           level.cells[static_cast<std::size_t>(r * level.cols + c)] == proact::sokoban::Tile::wall;
  };
  const auto solved = [&](const std::vector<int>& boxes) {
    for (int b : boxes) {
      if (level.cells[static_cast<std::size_t>(b)] != proact::sokoban::Tile::target) return false;
    }
    return true;
  };
  State start{level.player, {}};
  for (int i = 0; i < level.rows * level.cols; ++i) {
    if (level.boxes[static_cast<std::size_t>(i)]) start.second.push_back(i);
  }
  std::set<State> seen{start};
  std::deque<State> queue{start};
  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  while (!queue.empty()) {
    State s = std::move(queue.front());
    queue.pop_front();
    if (solved(s.second)) return true;
    const int pr = s.first / level.cols;
    const int pc = s.first % level.cols;
    for (int d = 0; d < 4; ++d) {
      const int nr = pr + dr[d];
      const int nc = pc + dc[d];
      if (is_wall(nr, nc)) continue;
      const int ncell = nr * level.cols + nc;
      State next = s;
      next.first = ncell;
      auto it = std::find(next.second.begin(), next.second.end(), ncell);
      if (it != next.second.end()) {
        const int br = nr + dr[d];
        const int bc = nc + dc[d];
        const int bcell = br * level.cols + bc;
        if (is_wall(br, bc) || std::count(next.second.begin(), next.second.end(), bcell)) continue;
        *it = bcell;
        std::sort(next.second.begin(), next.second.end());
      }
      if (seen.insert(next).second) {
        if (seen.size() > max_states) return true;  // undecided counts as "not proven unsolvable"
        queue.push_back(std::move(next));
      }
    }
  }
  return false;
}

}  // namespace oracle
