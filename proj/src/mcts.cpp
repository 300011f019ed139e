#include "proact/mcts.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace proact {

void ProbeConfig::validate() const {
  if (k < 1) throw ConfigError("probe samples k must be >= 1");
  if (depth < 1) throw ConfigError("probe depth d must be >= 1");
  if (!(uct_c >= 0.0)) throw ConfigError("uct_c must be >= 0");
  if (budget < 1) throw ConfigError("probe budget must be >= 1");
}

bool is_dead_end(TerminalReason reason) {
  return reason == TerminalReason::deadlock || reason == TerminalReason::invalid_limit ||
         reason == TerminalReason::env_done;
}

const ActionStat* ProbeSet::stat(ActionId action) const {
  for (const auto& s : root_stats) {
    if (s.action == action) return &s;
  }
  return nullptr;
}

ActionId ProbeSet::best_action() const {
  const ActionStat* best = nullptr;
  const auto better = [](const ActionStat& a, const ActionStat& b) {
    if (a.legal != b.legal) return a.legal;
    if (a.best_return != b.best_return) return a.best_return > b.best_return;
    if (a.mean_return != b.mean_return) return a.mean_return > b.mean_return;
    if (a.visits != b.visits) return a.visits > b.visits;
    return a.action < b.action;
  };
  for (const auto& s : root_stats) {
    if (!best || better(s, *best)) best = &s;
  }
  return best ? best->action : kInvalidAction;
}

std::int64_t ProbeSet::best_return() const {
  std::int64_t best = std::numeric_limits<std::int64_t>::min();
  for (const auto& t : trajectories) best = std::max(best, t.ret);
  return trajectories.empty() ? 0 : best;
}

namespace {

struct Node {
  int parent = -1;
  ActionId action = kInvalidAction;
  std::uint64_t seed = 0;
  StateSnapshot snap;
  int depth = 0;
  std::int64_t edge_reward = 0;
  bool terminal = false;
  TerminalReason reason = TerminalReason::none;
  std::vector<int> children;
  std::vector<ActionId> untried;
  int visits = 0;
  double total = 0.0;
};

ActionId random_action(const Environment& env, Rng& rng) {
  std::vector<ActionId> legal = env.legal_actions();
  if (legal.empty()) return static_cast<ActionId>(rng.below(static_cast<std::uint64_t>(env.action_count())));
  return legal[rng.below(legal.size())];
}

}  // namespace

ProbeSet probe_environment(const Environment& prototype, const StateSnapshot& root, const ProbeConfig& cfg) {
  cfg.validate();
  ProbeSet out;
  auto env = prototype.clone();
  env->restore(root);
  if (env->done()) {
    out.terminal = true;
    return out;
  }
  const bool failure_is_env_done = env->kind() != EnvKind::tabular;
  const auto dead = [&](TerminalReason r) {
    return r == TerminalReason::env_done ? failure_is_env_done : is_dead_end(r);
  };
  const int n_actions = env->action_count();

  std::vector<Node> nodes(1);
  nodes[0].seed = cfg.seed;
  nodes[0].snap = root;
  for (ActionId a = 0; a < n_actions; ++a) nodes[0].untried.push_back(a);
  nodes[0].children.assign(static_cast<std::size_t>(n_actions), -1);

  std::vector<ProbeTrajectory> recorded;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  Rng rng(derive_seed(cfg.seed, 0x7ee));

  for (int iter = 0; iter < cfg.budget; ++iter) {
    // Selection.
    int cur = 0;
    while (!nodes[static_cast<std::size_t>(cur)].terminal && nodes[static_cast<std::size_t>(cur)].depth < cfg.depth &&
           nodes[static_cast<std::size_t>(cur)].untried.empty()) {
      const Node& node = nodes[static_cast<std::size_t>(cur)];
      int best = -1;
      double best_score = -std::numeric_limits<double>::infinity();
      for (int child : node.children) {
        if (child < 0) continue;
        const Node& c = nodes[static_cast<std::size_t>(child)];
        const double mean = c.total / c.visits;
        const double q = hi > lo ? (mean - lo) / (hi - lo) : 0.5;
        const double score = q + cfg.uct_c * std::sqrt(std::log(static_cast<double>(node.visits)) / c.visits);
        if (score > best_score) {
          best_score = score;
          best = child;
        }
      }
      cur = best;
    }

    // Expansion.
    Node& leaf = nodes[static_cast<std::size_t>(cur)];
    if (!leaf.terminal && leaf.depth < cfg.depth && !leaf.untried.empty()) {
      const std::size_t pick = rng.below(leaf.untried.size());
      const ActionId a = leaf.untried[pick];
      leaf.untried.erase(leaf.untried.begin() + static_cast<std::ptrdiff_t>(pick));
      Node child;
      child.parent = cur;
      child.action = a;
      child.seed = derive_seed(leaf.seed, static_cast<std::uint64_t>(a));
      child.depth = leaf.depth + 1;
      env->restore(leaf.snap);
      env->reseed(child.seed);
      const Transition tr = env->apply(a);
      child.edge_reward = tr.reward;
      child.terminal = tr.done;
      child.reason = tr.reason;
      child.snap = env->snapshot();
      if (!child.terminal && child.depth < cfg.depth) {
        for (ActionId b = 0; b < n_actions; ++b) child.untried.push_back(b);
      }
      child.children.assign(static_cast<std::size_t>(n_actions), -1);
      const int id = static_cast<int>(nodes.size());
      nodes[static_cast<std::size_t>(cur)].children[static_cast<std::size_t>(a)] = id;
      nodes.push_back(std::move(child));
      cur = id;
    }

    // Path from the root.
    ProbeTrajectory traj;
    std::vector<int> path;
    for (int n = cur; n != 0; n = nodes[static_cast<std::size_t>(n)].parent) path.push_back(n);
    std::reverse(path.begin(), path.end());
    for (int n : path) {
      const Node& node = nodes[static_cast<std::size_t>(n)];
      traj.actions.push_back(node.action);
      traj.rewards.push_back(node.edge_reward);
      traj.step_seeds.push_back(node.seed);
      traj.ret += node.edge_reward;
    }
    const Node& end = nodes[static_cast<std::size_t>(cur)];
    traj.terminal_reason = end.reason;

    // Rollout.
    if (!end.terminal && end.depth < cfg.depth) {
      env->restore(end.snap);
      const std::uint64_t iter_seed = derive_seed(cfg.seed ^ 0x9b1e5eedULL, static_cast<std::uint64_t>(iter));
      Rng policy(derive_seed(iter_seed, 0xa11));
      for (int s = end.depth; s < cfg.depth && !env->done(); ++s) {
        const std::uint64_t step_seed = derive_seed(iter_seed, static_cast<std::uint64_t>(s));
        const ActionId a = random_action(*env, policy);
        env->reseed(step_seed);
        const Transition tr = env->apply(a);
        traj.actions.push_back(a);
        traj.rewards.push_back(tr.reward);
        traj.step_seeds.push_back(step_seed);
        traj.ret += tr.reward;
        traj.terminal_reason = tr.reason;
      }
    }
    traj.dead_end = dead(traj.terminal_reason);

    // Backup.
    const double value = static_cast<double>(traj.ret);
    lo = std::min(lo, value);
    hi = std::max(hi, value);
    for (int n = cur;; n = nodes[static_cast<std::size_t>(n)].parent) {
      nodes[static_cast<std::size_t>(n)].visits += 1;
      nodes[static_cast<std::size_t>(n)].total += value;
      if (n == 0) break;
    }
    recorded.push_back(std::move(traj));
  }

  // Root statistics.
  env->restore(root);
  for (ActionId a = 0; a < n_actions; ++a) {
    const int child = nodes[0].children[static_cast<std::size_t>(a)];
    if (child < 0) continue;
    const Node& c = nodes[static_cast<std::size_t>(child)];
    ActionStat s;
    s.action = a;
    s.visits = c.visits;
    s.mean_return = c.total / c.visits;
    s.immediate_reward = c.edge_reward;
    s.legal = env->is_legal(a);
    s.best_return = std::numeric_limits<std::int64_t>::min();
    s.worst_return = std::numeric_limits<std::int64_t>::max();
    for (const auto& t : recorded) {
      if (t.actions.empty() || t.actions.front() != a) continue;
      s.best_return = std::max(s.best_return, t.ret);
      s.worst_return = std::min(s.worst_return, t.ret);
    }
    out.root_stats.push_back(s);
  }

  // Trajectory selection.
  std::vector<std::size_t> order(recorded.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return recorded[x].ret > recorded[y].ret; });
  const auto best_with_first = [&](ActionId a) -> std::ptrdiff_t {
    for (std::size_t idx : order) {
      if (!recorded[idx].actions.empty() && recorded[idx].actions.front() == a) return static_cast<std::ptrdiff_t>(idx);
    }
    return -1;
  };
  std::vector<ActionStat> by_visits = out.root_stats;
  std::stable_sort(by_visits.begin(), by_visits.end(),
                   [](const ActionStat& x, const ActionStat& y) { return x.visits > y.visits; });

  std::vector<std::size_t> chosen;
  const auto take = [&](std::ptrdiff_t idx) {
    if (idx < 0 || static_cast<int>(chosen.size()) >= cfg.k) return;
    if (std::find(chosen.begin(), chosen.end(), static_cast<std::size_t>(idx)) == chosen.end()) {
      chosen.push_back(static_cast<std::size_t>(idx));
    }
  };
  if (cfg.k == 1) {
    take(by_visits.empty() ? -1 : best_with_first(by_visits.front().action));
  } else if (!order.empty()) {
    take(static_cast<std::ptrdiff_t>(order.front()));
    // Reserve the last slot for the worst path.
    const int saved_k = cfg.k;
    for (const auto& s : by_visits) {
      if (static_cast<int>(chosen.size()) >= saved_k - 1) break;
      take(best_with_first(s.action));
    }
    for (std::size_t idx : order) {
      if (static_cast<int>(chosen.size()) >= saved_k - 1) break;
      take(static_cast<std::ptrdiff_t>(idx));
    }
    // Worst path last (distinct from those already taken when possible).
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (std::find(chosen.begin(), chosen.end(), *it) == chosen.end()) {
        take(static_cast<std::ptrdiff_t>(*it));
        break;
      }
    }
  }
  for (std::size_t idx : chosen) out.trajectories.push_back(recorded[idx]);
  return out;
}

bool replay_probe(const Environment& prototype, const StateSnapshot& root, const ProbeTrajectory& trajectory) {
  if (trajectory.actions.size() != trajectory.rewards.size() ||
      trajectory.actions.size() != trajectory.step_seeds.size()) {
    return false;
  }
  auto env = prototype.clone();
  env->restore(root);
  for (std::size_t i = 0; i < trajectory.actions.size(); ++i) {
    if (env->done()) return false;
    env->reseed(trajectory.step_seeds[i]);
    if (env->apply(trajectory.actions[i]).reward != trajectory.rewards[i]) return false;
  }
  return true;
}

}  // namespace proact
