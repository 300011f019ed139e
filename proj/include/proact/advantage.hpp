#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proact/env.hpp"

namespace proact {

enum class Algorithm { traj_grpo, step_grpo, mc_grpo, step_ppo, mc_ppo };
// Where a member's scalar signal came from.
enum class SignalKind { trajectory_return, step_reward, mc_q, gae };

std::string_view to_string(Algorithm a);
std::string_view to_string(SignalKind s);
Algorithm algorithm_from_string(std::string_view text);

inline constexpr double kEpsStd = 1e-8;
inline constexpr double kDefaultClip = 0.4;

struct GroupStats {
  double mean = 0.0;
  double std = 0.0;  // population
};
GroupStats group_stats(const std::vector<double>& x);

// (x - mean) / max(std, eps_std) with the population std.
std::vector<double> normalize_group(const std::vector<double>& x, double eps_std = kEpsStd);

std::vector<double> traj_grpo_advantages(const std::vector<double>& returns, double eps_std = kEpsStd);
// Every unit of trajectory i receives advantages[i].
std::vector<std::vector<double>> broadcast(const std::vector<double>& advantages, const std::vector<int>& lengths);

std::vector<double> step_grpo_advantages(const std::vector<double>& rewards, double eps_std = kEpsStd);

struct McGrpoResult {
  std::vector<double> advantages;
  bool absolute = false;  // the all-actions baseline was used
};

// Relative baseline over the group's Q values when the group's actions
// differ; absolute baseline over `all_action_q` (indexed by action id) when
// they coincide. A degenerate critic (M=0 or T=0, so Q = r) always takes the
// relative path so the result equals Step-GRPO exactly.
McGrpoResult mc_grpo_advantages(const std::vector<ActionId>& actions, const std::vector<double>& q,
                                const std::vector<double>* all_action_q, bool degenerate_critic = false,
                                double eps_std = kEpsStd);

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // value-loss targets: advantage + old value
};

// values has one more entry than rewards: the bootstrap (0 if terminal).
GaeResult gae_turn_level(const std::vector<double>& rewards, const std::vector<double>& values, double gamma,
                         double lambda);

// (1 - omega) * v_phi + omega * v_mc.
double mc_ppo_value(double v_phi, double v_mc, double omega);

struct UnitSample {
  double advantage = 0.0;
  double old_logprob = 0.0;
};

struct ClipResult {
  double loss = 0.0;
  std::vector<double> terms;  // min(rho A, clip(rho) A) per unit
  // d loss / d new_logprob per unit (zero where the clip binds).
  std::vector<double> grad_logprob;
  int clipped = 0;  // units where the clip binds
};

// loss = -(1/N) sum_i min(rho_i A_i, clip(rho_i, 1-eps, 1+eps) A_i), rho = exp(new - old).
ClipResult ppo_clip_objective(const std::vector<UnitSample>& units, const std::vector<double>& new_logprobs,
                              double eps = kDefaultClip);

double value_loss(const std::vector<double>& values, const std::vector<double>& returns);

struct AdvantageRecord {
  std::string group_id;
  std::string state_key;
  std::string action;
  double old_logprob = 0.0;
  double advantage = 0.0;
  Algorithm algorithm = Algorithm::step_grpo;
  SignalKind signal_kind = SignalKind::step_reward;
};

// JSONL, one record per decision unit.
void write_advantages(std::ostream& out, const std::vector<AdvantageRecord>& records);
std::vector<AdvantageRecord> read_advantages(std::istream& in);

}  // namespace proact
