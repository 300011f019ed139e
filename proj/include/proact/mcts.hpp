#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "proact/env.hpp"

namespace proact {

struct ProbeConfig {
  int k = 4;  // trajectories returned
  int depth = 5;
  double uct_c = std::sqrt(2.0);
  int budget = 64;  // MCTS iterations, one expansion each
  std::uint64_t seed = 0;

  void validate() const;
};

/// A path through the real environment. step_seeds make it replayable:
/// restore(root) and then reseed(step_seeds[i]) + apply(actions[i]) per step.
struct ProbeTrajectory {
  std::vector<ActionId> actions;
  std::vector<std::int64_t> rewards;
  std::vector<std::uint64_t> step_seeds;
  std::int64_t ret = 0;  // undiscounted sum of rewards
  TerminalReason terminal_reason = TerminalReason::none;
  bool dead_end = false;  // ended in a failure terminal within the depth
};

struct ActionStat {
  ActionId action = kInvalidAction;
  int visits = 0;
  double mean_return = 0.0;
  std::int64_t best_return = 0;
  std::int64_t worst_return = 0;
  std::int64_t immediate_reward = 0;
  bool legal = true;
};

struct ProbeSet {
  std::vector<ProbeTrajectory> trajectories;
  std::vector<ActionStat> root_stats;  // one per alphabet action that was expanded
  bool terminal = false;               // root was already terminal

  const ActionStat* stat(ActionId action) const;
  // Highest best_return among legal actions (ties: mean return, visits, id).
  ActionId best_action() const;
  std::int64_t best_return() const;
};

// MCTS over restored copies of `prototype` at `root`: UCT selection, one
// expansion per iteration, random rollout to `depth`, mean-return backup.
// Returns k trajectories including the best and (k >= 2) the worst found.
ProbeSet probe_environment(const Environment& prototype, const StateSnapshot& root, const ProbeConfig& cfg);

// Replays a trajectory from `root`; true if every reward matches.
bool replay_probe(const Environment& prototype, const StateSnapshot& root, const ProbeTrajectory& trajectory);

bool is_dead_end(TerminalReason reason);

}  // namespace proact
