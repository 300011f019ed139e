#include "proact/advantage.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace proact {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::traj_grpo: return "traj_grpo";
    case Algorithm::step_grpo: return "step_grpo";
    case Algorithm::mc_grpo: return "mc_grpo";
    case Algorithm::step_ppo: return "step_ppo";
    case Algorithm::mc_ppo: return "mc_ppo";
  }
  return "?";
}

std::string_view to_string(SignalKind s) {
  switch (s) {
    case SignalKind::trajectory_return: return "trajectory_return";
    case SignalKind::step_reward: return "step_reward";
    case SignalKind::mc_q: return "mc_q";
    case SignalKind::gae: return "gae";
  }
  return "?";
}

Algorithm algorithm_from_string(std::string_view text) {
  for (auto a : {Algorithm::traj_grpo, Algorithm::step_grpo, Algorithm::mc_grpo, Algorithm::step_ppo,
                 Algorithm::mc_ppo}) {
    if (to_string(a) == text) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(text) +
                    "' (expected traj_grpo, step_grpo, mc_grpo, step_ppo, mc_ppo)");
}

namespace {

SignalKind signal_from_string(std::string_view text) {
  for (auto s : {SignalKind::trajectory_return, SignalKind::step_reward, SignalKind::mc_q, SignalKind::gae}) {
    if (to_string(s) == text) return s;
  }
  throw FormatError("unknown signal kind '" + std::string(text) + "'");
}

}  // namespace

GroupStats group_stats(const std::vector<double>& x) {
  GroupStats s;
  if (x.empty()) return s;
  const double n = static_cast<double>(x.size());
  for (double v : x) s.mean += v;
  s.mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / n);
  return s;
}

std::vector<double> normalize_group(const std::vector<double>& x, double eps_std) {
  const GroupStats s = group_stats(x);
  const double denom = std::max(s.std, eps_std);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - s.mean) / denom;
  return out;
}

std::vector<double> traj_grpo_advantages(const std::vector<double>& returns, double eps_std) {
  return normalize_group(returns, eps_std);
}

std::vector<std::vector<double>> broadcast(const std::vector<double>& advantages, const std::vector<int>& lengths) {
  if (advantages.size() != lengths.size()) throw ContractError("one length per trajectory required");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < advantages.size(); ++i) {
    out.emplace_back(static_cast<std::size_t>(std::max(lengths[i], 0)), advantages[i]);
  }
  return out;
}

std::vector<double> step_grpo_advantages(const std::vector<double>& rewards, double eps_std) {
  return normalize_group(rewards, eps_std);
}

McGrpoResult mc_grpo_advantages(const std::vector<ActionId>& actions, const std::vector<double>& q,
                                const std::vector<double>* all_action_q, bool degenerate_critic, double eps_std) {
  if (actions.size() != q.size()) throw ContractError("one Q value per group member required");
  McGrpoResult res;
  const bool identical =
      !actions.empty() && std::all_of(actions.begin(), actions.end(), [&](ActionId a) { return a == actions[0]; });
  if (!identical || degenerate_critic) {
    res.advantages = normalize_group(q, eps_std);
    return res;
  }
  if (all_action_q == nullptr || all_action_q->empty()) {
    throw ContractError("absolute baseline needs Q for every action");
  }
  const auto a0 = static_cast<std::size_t>(actions[0]);
  if (actions[0] < 0 || a0 >= all_action_q->size()) throw ContractError("group action outside the Q table");
  const GroupStats s = group_stats(*all_action_q);
  const double adv = ((*all_action_q)[a0] - s.mean) / std::max(s.std, eps_std);
  res.advantages.assign(actions.size(), adv);
  res.absolute = true;
  return res;
}

GaeResult gae_turn_level(const std::vector<double>& rewards, const std::vector<double>& values, double gamma,
                         double lambda) {
  if (values.size() != rewards.size() + 1) throw ContractError("GAE needs len(values) == len(rewards) + 1");
  GaeResult res;
  const std::size_t n = rewards.size();
  res.advantages.assign(n, 0.0);
  res.returns.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double delta = rewards[i] + gamma * values[i + 1] - values[i];
    running = delta + gamma * lambda * running;
    res.advantages[i] = running;
    res.returns[i] = running + values[i];
  }
  return res;
}

double mc_ppo_value(double v_phi, double v_mc, double omega) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw ContractError("omega must lie in [0,1]");
  return (1.0 - omega) * v_phi + omega * v_mc;
}

ClipResult ppo_clip_objective(const std::vector<UnitSample>& units, const std::vector<double>& new_logprobs,
                              double eps) {
  if (units.size() != new_logprobs.size()) throw ContractError("old/new log-probabilities are misaligned");
  ClipResult res;
  if (units.empty()) return res;
  const double n = static_cast<double>(units.size());
  res.terms.resize(units.size());
  res.grad_logprob.resize(units.size());
  double total = 0.0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    const double a = units[i].advantage;
    const double rho = std::exp(new_logprobs[i] - units[i].old_logprob);
    const double clipped_rho = std::clamp(rho, 1.0 - eps, 1.0 + eps);
    const double plain = rho * a;
    const double clipped = clipped_rho * a;
    if (clipped < plain) {
      res.terms[i] = clipped;
      res.grad_logprob[i] = 0.0;
      ++res.clipped;
    } else {
      res.terms[i] = plain;
      res.grad_logprob[i] = -plain / n;
    }
    total += res.terms[i];
  }
  res.loss = -total / n;
  return res;
}

double value_loss(const std::vector<double>& values, const std::vector<double>& returns) {
  if (values.size() != returns.size()) throw ContractError("values and returns are misaligned");
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += (values[i] - returns[i]) * (values[i] - returns[i]);
  return s / static_cast<double>(values.size());
}

void write_advantages(std::ostream& out, const std::vector<AdvantageRecord>& records) {
  for (const auto& r : records) {
    nlohmann::ordered_json j = {
        {"group_id", r.group_id},       {"state_key", r.state_key},
        {"action", r.action},           {"old_logprob", r.old_logprob},
        {"advantage", r.advantage},     {"algorithm", to_string(r.algorithm)},
        {"signal_kind", to_string(r.signal_kind)},
    };
    out << j.dump() << '\n';
  }
}

std::vector<AdvantageRecord> read_advantages(std::istream& in) {
  std::vector<AdvantageRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      AdvantageRecord r;
      r.group_id = j.at("group_id").get<std::string>();
      r.state_key = j.at("state_key").get<std::string>();
      r.action = j.at("action").get<std::string>();
      r.old_logprob = j.at("old_logprob").get<double>();
      r.advantage = j.at("advantage").get<double>();
      r.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
      r.signal_kind = signal_from_string(j.at("signal_kind").get<std::string>());
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad advantage record: ") + e.what());
    }
  }
  return out;
}

}  // namespace proact
