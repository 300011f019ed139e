#include "proact/trainer.hpp"

#include <omp.h>

#include <cmath>
#include <cstring>
#include <ostream>

#include <json.hpp>

#include "proact/episode.hpp"
#include "proact/game2048.hpp"
#include "proact/sokoban.hpp"

namespace proact {

std::vector<std::size_t> StatePool::sample(std::size_t count, Rng& rng) const {
  if (entries_.empty()) throw UsageError("cannot sample from an empty state pool");
  std::vector<std::size_t> idx(entries_.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const std::size_t n = std::min(count, idx.size());
  for (std::size_t i = 0; i < n; ++i) std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
  idx.resize(n);
  return idx;
}

namespace {

struct TurnSample {
  StateSnapshot snapshot;
  std::string key;
  int steps = 0;
  ActionId action = kInvalidAction;
  double logprob = 0.0;
  std::int64_t reward = 0;
};

std::vector<TurnSample> collect_episode(Environment& env, const Policy& policy, std::uint64_t reset_seed, Rng& rng) {
  std::vector<TurnSample> out;
  env.reset(reset_seed);
  const auto* tab = dynamic_cast<const TabularPolicy*>(&policy);
  while (!env.done()) {
    TurnSample s;
    s.snapshot = env.snapshot();
    s.key = tab ? tab->key(env) : env.state_key();
    s.steps = env.steps();
    const Decision d = policy.decide(env, rng);
    s.action = d.action;
    s.logprob = d.units.empty() ? 0.0 : d.units.front().logprob;
    s.reward = env.apply(d.action).reward;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

StatePool build_state_pool(const Environment& prototype, const Policy& behavior, int episodes, std::uint64_t seed) {
  StatePool pool;
  auto env = prototype.clone();
  for (int e = 0; e < episodes; ++e) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(e));
    Rng rng(derive_seed(s, 1));
    for (auto& turn : collect_episode(*env, behavior, s, rng)) {
      pool.add({std::move(turn.snapshot), std::move(turn.key), s, turn.steps});
    }
  }
  return pool;
}

TabularValue::TabularValue(double learning_rate) : learning_rate_(learning_rate) {
  if (!(learning_rate >= 0.0)) throw ConfigError("value learning_rate must be >= 0");
}

double TabularValue::operator()(const std::string& key) const {
  const auto it = table_.find(key);
  return it == table_.end() ? 0.0 : it->second;
}

void TabularValue::fit(const std::vector<std::string>& keys, const std::vector<double>& targets) {
  if (keys.size() != targets.size()) throw ContractError("keys and targets are misaligned");
  if (keys.empty() || learning_rate_ == 0.0) return;
  std::map<std::string, double> grad;
  const double n = static_cast<double>(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) grad[keys[i]] += 2.0 * ((*this)(keys[i]) - targets[i]) / n;
  for (const auto& [k, g] : grad) table_[k] -= learning_rate_ * g;
}

void TrainConfig::validate() const {
  if (G < 1) throw ConfigError("group size G must be >= 1");
  if (b < 1) throw ConfigError("state batch b must be >= 1");
  if (updates < 0) throw ConfigError("updates must be >= 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(clip >= 0.0)) throw ConfigError("clip must be >= 0");
  if (!(omega >= 0.0 && omega <= 1.0)) throw ConfigError("omega must lie in [0,1]");
  if (!(policy_lr > 0.0)) throw ConfigError("policy learning rate must be positive");
  if (!(gae.gamma >= 0.0 && gae.gamma <= 1.0)) throw ConfigError("GAE gamma must lie in [0,1]");
  if (!(gae.lambda >= 0.0 && gae.lambda <= 1.0)) throw ConfigError("GAE lambda must lie in [0,1]");
  if (pool_episodes < 1) throw ConfigError("pool_episodes must be >= 1");
  mc.validate();
}

std::uint64_t policy_hash(const TabularPolicy& policy) {
  std::uint64_t h = 0x1234;
  for (const auto& [key, row] : policy.table()) {
    h = derive_seed(h, stable_hash(key));
    for (double v : row) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      h = derive_seed(h, bits);
    }
  }
  return h;
}

void write_update_log(std::ostream& out, const UpdateLog& log) {
  nlohmann::ordered_json j = {
      {"update", log.update},
      {"mean_reward", log.mean_reward},
      {"mean_advantage_abs", log.mean_advantage_abs},
      {"clip_fraction", log.clip_fraction},
      {"pool_size", log.pool_size},
      {"absolute_groups", log.absolute_groups},
      {"param_hash", log.param_hash},
  };
  out << j.dump() << '\n';
}

namespace {

struct Unit {
  std::string key;
  ActionId action = kInvalidAction;
  double old_logprob = 0.0;
  double advantage = 0.0;
};

// Clipped-surrogate ascent on the tabular logits; returns the clip fraction
// averaged over epochs.
double apply_policy_update(TabularPolicy& policy, const std::vector<Unit>& units, int epochs, double clip) {
  if (units.empty()) return 0.0;
  std::vector<UnitSample> samples;
  for (const auto& u : units) samples.push_back({u.advantage, u.old_logprob});
  double clipped = 0.0;
  for (int e = 0; e < epochs; ++e) {
    std::vector<double> new_lp;
    for (const auto& u : units) new_lp.push_back(policy.logprob(u.key, u.action));
    const ClipResult cr = ppo_clip_objective(samples, new_lp, clip);
    clipped += static_cast<double>(cr.clipped) / static_cast<double>(units.size());
    std::map<std::string, std::vector<double>> grads;
    for (std::size_t i = 0; i < units.size(); ++i) {
      const double coeff = -cr.grad_logprob[i];  // ascent on the objective
      if (coeff == 0.0) continue;
      auto g = policy.logprob_gradient(units[i].key, units[i].action);
      auto [it, inserted] = grads.try_emplace(units[i].key, g.size(), 0.0);
      for (std::size_t j = 0; j < g.size(); ++j) it->second[j] += coeff * g[j];
    }
    for (const auto& [key, g] : grads) policy.update(key, g);
  }
  return clipped / epochs;
}

ActionId sample_action(const std::vector<double>& p, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<ActionId>(i);
  }
  return static_cast<ActionId>(p.size() - 1);
}

class Trainer {
 public:
  Trainer(const TrainConfig& cfg, const Environment& prototype, TabularPolicy& policy, TabularValue* value)
      : cfg_(cfg), proto_(prototype), policy_(policy), value_(value), env_(prototype.clone()) {}

  TrainResult run(const UpdateHook& hook) {
    TrainResult result;
    for (int u = 0; u < cfg_.updates; ++u) {
      UpdateLog log;
      log.update = u;
      const std::uint64_t useed = derive_seed(cfg_.seed, static_cast<std::uint64_t>(u));
      switch (cfg_.algorithm) {
        case Algorithm::traj_grpo: traj_update(useed, log, result); break;
        case Algorithm::step_grpo:
        case Algorithm::mc_grpo: step_update(u, useed, log, result); break;
        case Algorithm::step_ppo:
        case Algorithm::mc_ppo: ppo_update(u, useed, log, result); break;
      }
      log.param_hash = policy_hash(policy_);
      result.log.push_back(log);
      result.updates_run = u + 1;
      if (hook && hook(log, policy_)) break;
    }
    return result;
  }

 private:
  void finish(std::vector<Unit>& units, UpdateLog& log) {
    double abs_sum = 0.0;
    for (const auto& unit : units) abs_sum += std::abs(unit.advantage);
    log.mean_advantage_abs = units.empty() ? 0.0 : abs_sum / static_cast<double>(units.size());
    log.clip_fraction = apply_policy_update(policy_, units, cfg_.epochs, cfg_.clip);
  }

  void record(TrainResult& result, const std::string& group, const Unit& u, SignalKind kind) {
    if (!cfg_.export_advantages) return;
    result.advantages.push_back({group, u.key, std::string(proto_.action_name(u.action)), u.old_logprob, u.advantage,
                                 cfg_.algorithm, kind});
  }

  void traj_update(std::uint64_t useed, UpdateLog& log, TrainResult& result) {
    const std::uint64_t s0 = derive_seed(useed, 0);
    std::vector<std::vector<TurnSample>> episodes;
    std::vector<double> returns;
    for (int i = 0; i < cfg_.G; ++i) {
      Rng rng(derive_seed(useed, 100 + static_cast<std::uint64_t>(i)));
      episodes.push_back(collect_episode(*env_, policy_, s0, rng));
      double ret = 0.0;
      for (const auto& t : episodes.back()) ret += static_cast<double>(t.reward);
      returns.push_back(ret);
    }
    const auto adv = traj_grpo_advantages(returns);
    std::vector<Unit> units;
    for (std::size_t i = 0; i < episodes.size(); ++i) {
      for (const auto& t : episodes[i]) {
        units.push_back({t.key, t.action, t.logprob, adv[i]});
        record(result, "u" + std::to_string(log.update) + "/g0", units.back(), SignalKind::trajectory_return);
      }
    }
    double total = 0.0;
    for (double r : returns) total += r;
    log.mean_reward = total / static_cast<double>(returns.size());
    finish(units, log);
  }

  std::uint64_t state_seed(int update, const std::string& state_id) const {
    // Deterministic environments: estimates depend only on the state.
    const std::uint64_t base =
        proto_.stochastic() ? derive_seed(cfg_.mc.base_seed, static_cast<std::uint64_t>(update) + 1) : cfg_.mc.base_seed;
    return derive_seed(base, stable_hash(state_id));
  }

  double q_value(int update, const PoolEntry& entry, const std::string& state_id, ActionId a) {
    const std::string cache_key = state_id + "#" + std::to_string(a);
    if (!proto_.stochastic()) {
      if (auto it = q_cache_.find(cache_key); it != q_cache_.end()) return it->second;
    }
    McConfig mc = cfg_.mc;
    mc.base_seed = state_seed(update, state_id);
    const double q = estimate_q(proto_, entry.snapshot, a, mc).mean;
    if (!proto_.stochastic()) q_cache_.emplace(cache_key, q);
    return q;
  }

  void step_update(int update, std::uint64_t useed, UpdateLog& log, TrainResult& result) {
    const StatePool pool = build_state_pool(proto_, policy_, cfg_.pool_episodes, derive_seed(useed, 1));
    log.pool_size = pool.size();
    if (pool.empty()) return;
    Rng rng(derive_seed(useed, 2));
    const auto picks = pool.sample(static_cast<std::size_t>(cfg_.b), rng);
    const bool mc = cfg_.algorithm == Algorithm::mc_grpo;
    const bool degenerate = cfg_.mc.degenerate();
    std::vector<Unit> units;
    double reward_sum = 0.0;
    std::size_t members = 0;
    for (std::size_t g = 0; g < picks.size(); ++g) {
      const PoolEntry& entry = pool[picks[g]];
      const std::string state_id = entry.key + "@" + std::to_string(entry.t);
      const auto probs = policy_.probabilities(entry.key);
      std::vector<ActionId> actions;
      std::vector<double> logps;
      std::vector<double> rewards;
      for (int i = 0; i < cfg_.G; ++i) {
        const ActionId a = sample_action(probs, rng);
        env_->restore(entry.snapshot);
        env_->reseed(derive_seed(derive_seed(useed, 3 + g), static_cast<std::uint64_t>(i)));
        actions.push_back(a);
        logps.push_back(std::log(probs[static_cast<std::size_t>(a)]));
        rewards.push_back(static_cast<double>(env_->apply(a).reward));
      }
      std::vector<double> adv;
      SignalKind kind = SignalKind::step_reward;
      if (!mc) {
        adv = step_grpo_advantages(rewards);
      } else {
        kind = SignalKind::mc_q;
        // A degenerate critic leaves Q = r.
        std::vector<double> q = rewards;
        std::vector<double> all_q;
        if (!degenerate) {
          for (std::size_t i = 0; i < actions.size(); ++i) q[i] = q_value(update, entry, state_id, actions[i]);
          const bool identical =
              std::all_of(actions.begin(), actions.end(), [&](ActionId a) { return a == actions[0]; });
          if (identical) {
            for (ActionId a = 0; a < proto_.action_count(); ++a) all_q.push_back(q_value(update, entry, state_id, a));
          }
        }
        const McGrpoResult res = mc_grpo_advantages(actions, q, &all_q, degenerate);
        if (res.absolute) ++log.absolute_groups;
        adv = res.advantages;
      }
      for (int i = 0; i < cfg_.G; ++i) {
        units.push_back({entry.key, actions[static_cast<std::size_t>(i)], logps[static_cast<std::size_t>(i)],
                         adv[static_cast<std::size_t>(i)]});
        record(result, "u" + std::to_string(update) + "/g" + std::to_string(g), units.back(), kind);
        reward_sum += rewards[static_cast<std::size_t>(i)];
        ++members;
      }
    }
    log.mean_reward = members ? reward_sum / static_cast<double>(members) : 0.0;
    finish(units, log);
  }

  void ppo_update(int update, std::uint64_t useed, UpdateLog& log, TrainResult& result) {
    if (!value_) throw ConfigError(std::string(to_string(cfg_.algorithm)) + " needs a value function");
    const bool mc = cfg_.algorithm == Algorithm::mc_ppo;
    std::vector<Unit> units;
    std::vector<std::string> value_keys;
    std::vector<double> value_targets;
    std::map<std::string, double> v_mc;  // once per visited state per update
    double total = 0.0;
    for (int e = 0; e < cfg_.G; ++e) {
      Rng rng(derive_seed(useed, 100 + static_cast<std::uint64_t>(e)));
      const auto turns = collect_episode(*env_, policy_, derive_seed(useed, static_cast<std::uint64_t>(e)), rng);
      std::vector<double> rewards;
      std::vector<double> values;
      for (const auto& t : turns) {
        rewards.push_back(static_cast<double>(t.reward));
        double v = (*value_)(t.key);
        if (mc) {
          const std::string state_id = t.key + "@" + std::to_string(t.steps);
          auto it = v_mc.find(state_id);
          if (it == v_mc.end()) {
            McConfig cfg = cfg_.mc;
            cfg.base_seed = state_seed(update, state_id);
            it = v_mc.emplace(state_id, estimate_v(proto_, t.snapshot, cfg).mean).first;
          }
          v = mc_ppo_value(v, it->second, cfg_.omega);
        }
        values.push_back(v);
        total += static_cast<double>(t.reward);
      }
      values.push_back(0.0);  // episodes run to termination
      const GaeResult gae = gae_turn_level(rewards, values, cfg_.gae.gamma, cfg_.gae.lambda);
      for (std::size_t i = 0; i < turns.size(); ++i) {
        units.push_back({turns[i].key, turns[i].action, turns[i].logprob, gae.advantages[i]});
        record(result, "u" + std::to_string(update) + "/e" + std::to_string(e), units.back(), SignalKind::gae);
        value_keys.push_back(turns[i].key);
        value_targets.push_back(gae.returns[i]);
      }
    }
    log.mean_reward = total / cfg_.G;
    finish(units, log);
    value_->fit(value_keys, value_targets);
  }

  const TrainConfig& cfg_;
  const Environment& proto_;
  TabularPolicy& policy_;
  TabularValue* value_;
  std::unique_ptr<Environment> env_;
  std::map<std::string, double> q_cache_;
};

}  // namespace

TrainResult train(const TrainConfig& cfg, const Environment& prototype, TabularPolicy& policy, TabularValue* value,
                  const UpdateHook& hook) {
  cfg.validate();
  if ((cfg.algorithm == Algorithm::step_ppo || cfg.algorithm == Algorithm::mc_ppo) && value == nullptr) {
    throw ConfigError(std::string(to_string(cfg.algorithm)) + " needs a value function");
  }
  if (policy.action_count() != prototype.action_count()) {
    throw ConfigError("policy and environment alphabets differ in size");
  }
  Trainer trainer(cfg, prototype, policy, value);
  return trainer.run(hook);
}

EvalMetrics evaluate(const Environment& prototype, const Policy& policy, int runs, std::uint64_t seed, int workers) {
  EvalMetrics m;
  m.runs = std::max(runs, 0);
  m.scores.assign(static_cast<std::size_t>(m.runs), 0.0);
  std::vector<double> totals(m.scores.size(), 0.0);
  std::vector<double> steps(m.scores.size(), 0.0);
  std::vector<double> solved(m.scores.size(), 0.0);
  const auto* soko = dynamic_cast<const sokoban::SokobanEnv*>(&prototype);
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel num_threads(threads) if (threads > 1 && policy.thread_safe())
  {
    auto env = prototype.clone();
#pragma omp for schedule(dynamic, 1)
    for (int i = 0; i < m.runs; ++i) {
      const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
      Rng rng(derive_seed(s, 1));
      const Trajectory traj = run_episode(*env, policy, s, rng);
      const auto k = static_cast<std::size_t>(i);
      totals[k] = static_cast<double>(traj.total_reward);
      steps[k] = static_cast<double>(traj.turns.size());
      switch (prototype.kind()) {
        case EnvKind::game2048: m.scores[k] = static_cast<double>(g2048::metrics(traj).merge_score); break;
        case EnvKind::sokoban: {
          const auto sm = sokoban::metrics(traj, soko->config().symbols);
          m.scores[k] = sm.max_boxes_on_target;
          solved[k] = sm.solved ? 1.0 : 0.0;
          break;
        }
        case EnvKind::tabular: m.scores[k] = totals[k]; break;
      }
    }
  }
  if (m.runs > 0) {
    const double n = m.runs;
    m.mean_score = pairwise_sum(m.scores.data(), m.scores.size()) / n;
    m.mean_total_reward = pairwise_sum(totals.data(), totals.size()) / n;
    m.mean_steps = pairwise_sum(steps.data(), steps.size()) / n;
    m.solve_rate = pairwise_sum(solved.data(), solved.size()) / n;
  }
  return m;
}

std::vector<SweepRow> sweep(const TrainConfig& base, SweepAxis axis, const std::vector<int>& values,
                            const Environment& prototype, int eval_runs, int workers) {
  std::vector<SweepRow> rows;
  for (int v : values) {
    TrainConfig cfg = base;
    (axis == SweepAxis::M ? cfg.mc.M : cfg.mc.T) = v;
    cfg.mc.workers = workers;
    TabularPolicy policy(prototype.action_count(), cfg.policy_lr);
    TabularValue value(cfg.value_lr);
    const TrainResult res = train(cfg, prototype, policy, &value);
    SweepRow row;
    row.value = v;
    row.metrics = evaluate(prototype, policy, eval_runs, derive_seed(base.seed, 0xe7a1), workers);
    row.final_mean_reward = res.log.empty() ? 0.0 : res.log.back().mean_reward;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace proact
