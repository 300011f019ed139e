#pragma once

#include <cstdint>
#include <vector>

#include "proact/env.hpp"

namespace proact {

struct McConfig {
  int M = 1000;  // rollouts
  int T = 1000;  // horizon in environment steps
  double gamma = 0.9;
  int K = 4;  // next-state samples for Q (forced to 1 on deterministic envs)
  std::uint64_t base_seed = 0;
  int workers = 1;  // 0: OpenMP default
  bool legal_only = true;

  void validate() const;
  bool degenerate() const { return M == 0 || T == 0; }
};

struct ValueEstimate {
  double mean = 0.0;
  // Sample std / sqrt(M); 0 when M < 2 (see `has_error`).
  double std_error = 0.0;
  int sample_count = 0;
  bool degenerate = false;
  bool has_error = false;
  McConfig config;
};

struct QSample {
  std::int64_t reward = 0;
  double value = 0.0;  // V^MC of the sampled next state (0 if terminal)
};

struct QEstimate {
  ActionId action = kInvalidAction;
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<QSample> components;
  bool degenerate = false;
};

// Discounted return of one random-policy rollout from the environment's
// current state, at most `horizon` steps. `seed` drives both the environment
// stream and the action choices.
double rollout_return(Environment& env, int horizon, double gamma, std::uint64_t seed, bool legal_only,
                      std::int64_t* steps = nullptr);

// Mean discounted return of cfg.M rollouts from `snapshot`; rollout i uses
// derive_seed(cfg.base_seed, i). Parallel over rollouts, result independent
// of the worker count.
ValueEstimate estimate_v(const Environment& prototype, const StateSnapshot& snapshot, const McConfig& cfg);
// Single-threaded reference with the same contract.
ValueEstimate estimate_v_serial(const Environment& prototype, const StateSnapshot& snapshot, const McConfig& cfg);

// Average over K sampled next states of r + gamma * V^MC(s').
QEstimate estimate_q(const Environment& prototype, const StateSnapshot& snapshot, ActionId action,
                     const McConfig& cfg);
std::vector<QEstimate> estimate_q_all(const Environment& prototype, const StateSnapshot& snapshot,
                                      const McConfig& cfg);

struct BenchResult {
  int rollouts = 0;
  std::int64_t steps = 0;
  double wall_seconds = 0.0;
  double mean_return = 0.0;
};

// `count` random-policy episodes from fresh resets (seed i = derive_seed(seed, i)),
// each capped at `horizon` steps; undiscounted.
BenchResult bench_rollouts(const Environment& prototype, int count, int horizon, std::uint64_t seed, int workers);
BenchResult bench_rollouts_serial(const Environment& prototype, int count, int horizon, std::uint64_t seed);

// Order-fixed pairwise summation.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace proact
