#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "proact/advantage.hpp"
#include "proact/mc_critic.hpp"
#include "proact/policy.hpp"

namespace proact {

struct PoolEntry {
  StateSnapshot snapshot;
  std::string key;
  std::uint64_t source_seed = 0;
  int t = 0;
};

/// Visited, restorable states used as origins for step-level groups.
class StatePool {
 public:
  void add(PoolEntry entry) { entries_.push_back(std::move(entry)); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const PoolEntry& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<PoolEntry>& entries() const { return entries_; }

  // min(count, size) distinct indices, uniformly without replacement.
  std::vector<std::size_t> sample(std::size_t count, Rng& rng) const;

 private:
  std::vector<PoolEntry> entries_;
};

// Every non-terminal state visited by `episodes` behavior-policy episodes
// (reset seed i = derive_seed(seed, i)).
StatePool build_state_pool(const Environment& prototype, const Policy& behavior, int episodes, std::uint64_t seed);

/// Per-state scalar value; unseen keys read 0.
class TabularValue {
 public:
  explicit TabularValue(double learning_rate = 0.1);
  double operator()(const std::string& key) const;
  // One gradient step on (1/n) sum (V(k_i) - R_i)^2 (learning_rate 0 freezes).
  void fit(const std::vector<std::string>& keys, const std::vector<double>& targets);
  double learning_rate() const { return learning_rate_; }
  const std::map<std::string, double>& table() const { return table_; }

 private:
  double learning_rate_;
  std::map<std::string, double> table_;
};

struct GaeConfig {
  double gamma = 0.9;
  double lambda = 0.95;
};

struct TrainConfig {
  Algorithm algorithm = Algorithm::mc_grpo;
  int G = 8;
  int b = 16;
  int updates = 200;
  int epochs = 1;
  double clip = kDefaultClip;
  McConfig mc;
  GaeConfig gae;
  double omega = 0.5;
  double policy_lr = 1.0;
  double value_lr = 0.1;
  int pool_episodes = 1;  // fresh on-policy episodes feeding the pool each update
  std::uint64_t seed = 0;
  bool export_advantages = false;

  void validate() const;
};

struct UpdateLog {
  int update = 0;
  double mean_reward = 0.0;
  double mean_advantage_abs = 0.0;
  double clip_fraction = 0.0;
  std::size_t pool_size = 0;
  int absolute_groups = 0;  // MC-GRPO groups that used the all-actions baseline
  std::uint64_t param_hash = 0;
};

struct TrainResult {
  std::vector<UpdateLog> log;
  std::vector<AdvantageRecord> advantages;  // when export_advantages
  int updates_run = 0;
};

// Called after each update; returning true stops training.
using UpdateHook = std::function<bool(const UpdateLog&, const TabularPolicy&)>;

// value is required for step_ppo/mc_ppo.
TrainResult train(const TrainConfig& cfg, const Environment& prototype, TabularPolicy& policy,
                  TabularValue* value = nullptr, const UpdateHook& hook = {});

void write_update_log(std::ostream& out, const UpdateLog& log);

// Stable hash of a policy table (parameter-trajectory comparisons).
std::uint64_t policy_hash(const TabularPolicy& policy);

struct EvalMetrics {
  int runs = 0;
  // 2048: merge score; Sokoban: max boxes on target; chain: total reward.
  double mean_score = 0.0;
  double mean_total_reward = 0.0;
  double solve_rate = 0.0;  // Sokoban only
  double mean_steps = 0.0;
  std::vector<double> scores;
};

// Run i resets with derive_seed(seed, i); runs are parallel when the policy
// is thread-safe, and the result does not depend on `workers`.
EvalMetrics evaluate(const Environment& prototype, const Policy& policy, int runs, std::uint64_t seed,
                     int workers = 1);

enum class SweepAxis { M, T };

struct SweepRow {
  int value = 0;
  EvalMetrics metrics;
  double final_mean_reward = 0.0;
};

// One fresh tabular policy per value, trained with `base` (axis overridden)
// and evaluated with `eval_runs` runs.
std::vector<SweepRow> sweep(const TrainConfig& base, SweepAxis axis, const std::vector<int>& values,
                            const Environment& prototype, int eval_runs, int workers = 1);

}  // namespace proact
