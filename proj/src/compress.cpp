#include <algorithm>
#include <cmath>
#include <cstdio>

#include "proact/game2048.hpp"
#include "proact/glad.hpp"
#include "proact/response.hpp"
#include "proact/sokoban.hpp"

namespace proact {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string join_words(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += i + 1 == items.size() ? " and " : ", ";
    out += items[i];
  }
  return out;
}

std::string place(int r, int c, int rows, int cols) {
  const bool top = r == 0;
  const bool bottom = r == rows - 1;
  const bool left = c == 0;
  const bool right = c == cols - 1;
  if ((top || bottom) && (left || right)) {
    return std::string("the ") + (top ? "top" : "bottom") + "-" + (left ? "left" : "right") + " corner";
  }
  return "row " + std::to_string(r + 1) + ", column " + std::to_string(c + 1);
}

// ---- 2048 ----

std::string describe_board(const g2048::Board& b) {
  int best_r = 0;
  int best_c = 0;
  for (int r = 0; r < b.size; ++r) {
    for (int c = 0; c < b.size; ++c) {
      if (b.at(r, c) > b.at(best_r, best_c)) {
        best_r = r;
        best_c = c;
      }
    }
  }
  std::string top;
  for (int c = 0; c < b.size; ++c) {
    if (c > 0) top += "-";
    top += b.at(0, c) == 0 ? "empty" : std::to_string(b.at(0, c));
  }
  return "The highest tile is " + std::to_string(b.max_tile()) + " in " + place(best_r, best_c, b.size, b.size) +
         ", there are " + std::to_string(b.empty_count()) + " empty cells, and the top row reads " + top + ".";
}

std::string describe_move_2048(const g2048::Board& b, ActionId a) {
  const auto dir = static_cast<g2048::Direction>(a);
  const g2048::MoveResult mv = g2048::apply_move(b, dir);
  if (!mv.moved) return "it would not move any tile and only costs a penalty";
  const bool columns = dir == g2048::Direction::up || dir == g2048::Direction::down;
  std::vector<std::string> parts;
  for (const auto& lm : g2048::describe_merges(b, dir)) {
    for (auto v : lm.created) {
      parts.push_back("two " + std::to_string(v / 2) + "s merge into a " + std::to_string(v) + " in " +
                      (columns ? "column " : "row ") + std::to_string(lm.line + 1));
    }
  }
  const std::string empties = "leaving " + std::to_string(mv.board.empty_count()) + " empty cells before the spawn";
  if (parts.empty()) return "tiles only slide without merging, " + empties;
  return join_words(parts) + " for " + std::to_string(mv.merge_sum) + " points, " + empties;
}

// ---- Sokoban ----

std::string describe_level(const sokoban::Level& level) {
  const auto p = level.player_pos();
  return "The player stands at row " + std::to_string(p.r + 1) + ", column " + std::to_string(p.c + 1) + "; " +
         std::to_string(level.boxes_on_target()) + " of " + std::to_string(level.box_count()) +
         " boxes are already on targets.";
}

std::string describe_move_sokoban(const ActionStat& s) {
  if (!s.legal) return "it is blocked here and would only cost a penalty";
  if (s.immediate_reward >= sokoban::kSolveBonus) return "it places the last box and solves the level";
  if (s.immediate_reward > 0) return "it pushes a box onto a target";
  if (s.immediate_reward < 0) return "it pushes a box off a target";
  return "it repositions without changing any box on a target";
}

struct Ranked {
  const ActionStat* stat;
  std::string name;
};

}  // namespace

std::string compress_template(const Environment& env, const ProbeSet& probes, ActionId chosen) {
  const std::string chosen_name(env.action_name(chosen));
  std::string out;

  // Observation.
  const auto* g = dynamic_cast<const g2048::Game2048Env*>(&env);
  const auto* s = dynamic_cast<const sokoban::SokobanEnv*>(&env);
  if (g) {
    out += describe_board(g->board());
  } else if (s) {
    out += describe_level(s->level());
  } else {
    out += "The current state is " + env.observation() + ".";
  }
  out += "\n\n";

  // Analysis: chosen action first, then the rest by lookahead quality.
  std::vector<Ranked> ranked;
  for (const auto& st : probes.root_stats) ranked.push_back({&st, std::string(env.action_name(st.action))});
  std::stable_sort(ranked.begin(), ranked.end(), [&](const Ranked& x, const Ranked& y) {
    if ((x.stat->action == chosen) != (y.stat->action == chosen)) return x.stat->action == chosen;
    if (x.stat->best_return != y.stat->best_return) return x.stat->best_return > y.stat->best_return;
    return x.stat->mean_return > y.stat->mean_return;
  });
  const auto consequence = [&](const ActionStat& st) {
    std::string text = g ? describe_move_2048(g->board(), st.action) : s ? describe_move_sokoban(st) : "";
    if (text.empty()) text = "it earns " + std::to_string(st.immediate_reward) + " immediately";
    text += ". Looking ahead, it averaged " + fmt(st.mean_return) + " with a best of " +
            std::to_string(st.best_return);
    return text;
  };
  for (const auto& r : ranked) {
    out += "If I go " + r.name + ", " + consequence(*r.stat);
    bool dead = false;
    for (const auto& t : probes.trajectories) {
      if (!t.actions.empty() && t.actions.front() == r.stat->action && t.dead_end) dead = true;
    }
    if (dead) out += ", and one line of play ran into a dead end";
    out += ".\n";
  }

  // Rejected alternatives and trade-off.
  const ActionStat* mine = probes.stat(chosen);
  const Ranked* runner = ranked.size() > 1 ? &ranked[1] : nullptr;
  const bool tie = ranked.size() > 1 && std::all_of(ranked.begin(), ranked.end(), [&](const Ranked& r) {
    return r.stat->best_return == ranked.front().stat->best_return &&
           r.stat->mean_return == ranked.front().stat->mean_return;
  });
  out += "\n";
  if (runner) {
    const ActionStat& other = *runner->stat;
    const ActionStat& worst = *ranked.back().stat;
    if (tie) {
      out += "All candidates look equally good in the lookahead, so the probes do not separate " + chosen_name +
             " from " + runner->name + "; I keep " + chosen_name + " for consistency.";
    } else {
      out += capitalize(runner->name) + " is rejected because its best continuation reached " +
             std::to_string(other.best_return) + " against " + std::to_string(mine ? mine->best_return : 0) +
             " for " + chosen_name + ".";
      if (&worst != &other && worst.action != chosen) {
        out += " " + capitalize(ranked.back().name) + " is the weakest option, averaging only " +
               fmt(worst.mean_return) + ".";
      }
    }
    out += " ";
    const std::int64_t now_mine = mine ? mine->immediate_reward : 0;
    if (other.immediate_reward > now_mine) {
      out += "The trade-off is that " + runner->name + " pays more right now (" + std::to_string(other.immediate_reward) +
             " versus " + std::to_string(now_mine) + "), but " + chosen_name +
             " keeps better prospects over the next moves.";
    } else {
      out += "Weighing immediate reward against future potential, " + chosen_name + " is at least as good now (" +
             std::to_string(now_mine) + " versus " + std::to_string(other.immediate_reward) +
             ") and holds up over the next moves.";
    }
  } else {
    // Only one action was explored; still name an alternative.
    std::string alt;
    for (ActionId a = 0; a < env.action_count(); ++a) {
      if (a != chosen) {
        alt = std::string(env.action_name(a));
        break;
      }
    }
    out += "Only " + chosen_name + " was explored in the lookahead, so " + (alt.empty() ? "nothing else" : alt) +
           " is rejected for lack of evidence. The trade-off is certainty over unexplored potential.";
  }
  out += "\n\nConclusion: " + chosen_name + " is the better choice.\n\nmove: " + chosen_name;
  return out;
}

Compressed compress_teacher(const GatewayClient& client, const Environment& env, const ProbeSet& probes,
                            ActionId chosen) {
  const std::string chosen_name(env.action_name(chosen));
  const std::string draft = compress_template(env, probes, chosen);
  const std::string sys =
      "You rewrite search evidence from a game into a short reasoning chain. Follow four principles: "
      "(1) describe the observation in plain language; (2) simulate the candidate actions using only the evidence "
      "and explain why the other actions were rejected; (3) state the trade-off; (4) conclude with the chosen "
      "action. Remove all structural artifacts: no tags, no angle brackets, no tree or trajectory notation. "
      "End with a final line of the form 'move: " + chosen_name + "'.";
  const std::string user = "State:\n" + env.observation() + "\n\nEvidence:\n" + render_probes(env, probes) +
                           "\nDraft:\n" + draft + "\n\nChosen action: " + chosen_name;
  try {
    std::string text = client.chat({{"system", sys}, {"user", user}}).content;
    if (text.rfind("thought:", 0) == 0) text = text.substr(8);
    const auto parsed = try_parse_response(text);
    const bool clean = text.find('<') == std::string::npos && text.find('>') == std::string::npos;
    if (parsed && env.action_id(parsed->action_text) == chosen && clean) return {text, "teacher"};
  } catch (const GatewayError&) {
  }
  return {draft, "template_fallback"};
}

}  // namespace proact
