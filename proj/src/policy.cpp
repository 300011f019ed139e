#include "proact/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace proact {

double logsumexp(const std::vector<double>& x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(x.begin(), x.end());
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

Decision RandomPolicy::decide(const Environment& env, Rng& rng) const {
  std::vector<ActionId> choices = legal_only_ ? env.legal_actions() : std::vector<ActionId>{};
  if (choices.empty()) {
    for (ActionId a = 0; a < env.action_count(); ++a) choices.push_back(a);
  }
  Decision d;
  d.action = choices[rng.below(choices.size())];
  d.units.push_back({std::string(env.action_name(d.action)), -std::log(static_cast<double>(choices.size()))});
  return d;
}

Decision GreedyPolicy::decide(const Environment& env, Rng& rng) const {
  std::vector<ActionId> best;
  std::int64_t best_reward = std::numeric_limits<std::int64_t>::min();
  const StateSnapshot snap = env.snapshot();
  auto probe = env.clone();
  for (ActionId a = 0; a < env.action_count(); ++a) {
    probe->restore(snap);
    const std::int64_t r = probe->apply(a).reward;
    if (r > best_reward) {
      best_reward = r;
      best.assign(1, a);
    } else if (r == best_reward) {
      best.push_back(a);
    }
  }
  Decision d;
  d.action = best[rng.below(best.size())];
  d.units.push_back({std::string(env.action_name(d.action)), -std::log(static_cast<double>(best.size()))});
  return d;
}

Decision FixedTextPolicy::decide(const Environment&, Rng&) const {
  Decision d;
  d.raw_response = text_;
  return d;
}

TabularPolicy::TabularPolicy(int n_actions, double learning_rate, KeyFn key_fn)
    : n_actions_(n_actions), learning_rate_(learning_rate), key_fn_(std::move(key_fn)) {
  if (n_actions < 1) throw ConfigError("tabular policy needs at least one action");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
}

std::string TabularPolicy::key(const Environment& env) const { return key_fn_ ? key_fn_(env) : env.state_key(); }

std::vector<double> TabularPolicy::logits(const std::string& key) const {
  const auto it = table_.find(key);
  return it == table_.end() ? std::vector<double>(static_cast<std::size_t>(n_actions_), 0.0) : it->second;
}

std::vector<double> TabularPolicy::probabilities(const std::string& key) const {
  std::vector<double> p = logits(key);
  const double lse = logsumexp(p);
  for (double& v : p) v = std::exp(v - lse);
  return p;
}

double TabularPolicy::logprob(const std::string& key, ActionId action) const {
  if (action < 0 || action >= n_actions_) throw ContractError("action outside the policy's alphabet");
  const auto l = logits(key);
  return l[static_cast<std::size_t>(action)] - logsumexp(l);
}

std::vector<double> TabularPolicy::logprob_gradient(const std::string& key, ActionId action) const {
  if (action < 0 || action >= n_actions_) throw ContractError("action outside the policy's alphabet");
  std::vector<double> g = probabilities(key);
  for (double& v : g) v = -v;
  g[static_cast<std::size_t>(action)] += 1.0;
  return g;
}

void TabularPolicy::update(const std::string& key, const std::vector<double>& gradient) {
  if (static_cast<int>(gradient.size()) != n_actions_) throw ContractError("gradient size mismatch");
  auto [it, inserted] = table_.try_emplace(key, static_cast<std::size_t>(n_actions_), 0.0);
  for (std::size_t i = 0; i < gradient.size(); ++i) it->second[i] += learning_rate_ * gradient[i];
}

void TabularPolicy::set_logits(const std::string& key, std::vector<double> logits) {
  if (static_cast<int>(logits.size()) != n_actions_) throw ContractError("logit row size mismatch");
  table_[key] = std::move(logits);
}

Decision TabularPolicy::decide(const Environment& env, Rng& rng) const {
  if (env.action_count() != n_actions_) throw ContractError("policy and environment alphabets differ in size");
  const std::string k = key(env);
  const auto p = probabilities(k);
  ActionId a = 0;
  if (greedy_) {
    a = static_cast<ActionId>(std::max_element(p.begin(), p.end()) - p.begin());
  } else {
    const double u = rng.uniform();
    double acc = 0.0;
    a = n_actions_ - 1;
    for (int i = 0; i < n_actions_; ++i) {
      acc += p[static_cast<std::size_t>(i)];
      if (u < acc) {
        a = i;
        break;
      }
    }
  }
  Decision d;
  d.action = a;
  d.units.push_back({std::string(env.action_name(a)), std::log(p[static_cast<std::size_t>(a)])});
  return d;
}

}  // namespace proact
