#include "proact/tabular_mdp.hpp"

#include <algorithm>
#include <cmath>

namespace proact::tabular {

void Mdp::validate() const {
  if (n_states < 1 || n_actions < 1) throw ConfigError("MDP needs at least one state and one action");
  if (start < 0 || start >= n_states) throw ConfigError("MDP start state out of range");
  if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
  if (static_cast<int>(transitions.size()) != n_states || static_cast<int>(terminal.size()) != n_states) {
    throw ConfigError("MDP tables do not match the state count");
  }
  for (const auto& row : transitions) {
    if (static_cast<int>(row.size()) != n_actions) throw ConfigError("MDP row does not match the action count");
    for (const auto& outcomes : row) {
      double total = 0.0;
      for (const auto& o : outcomes) {
        if (o.next < 0 || o.next >= n_states || o.prob < 0.0) throw ConfigError("bad MDP outcome");
        total += o.prob;
      }
      if (std::abs(total - 1.0) > 1e-9) throw ConfigError("MDP outcome probabilities must sum to 1");
    }
  }
}

bool Mdp::stochastic() const {
  for (const auto& row : transitions) {
    for (const auto& outcomes : row) {
      if (outcomes.size() > 1) return true;
    }
  }
  return false;
}

namespace {

Mdp blank(std::string name, int n_states, int n_actions) {
  Mdp m;
  m.name = std::move(name);
  m.n_states = n_states;
  m.n_actions = n_actions;
  m.transitions.assign(static_cast<std::size_t>(n_states),
                       std::vector<std::vector<Outcome>>(static_cast<std::size_t>(n_actions)));
  m.terminal.assign(static_cast<std::size_t>(n_states), 0);
  return m;
}

void set_all(Mdp& m, int s, std::vector<Outcome> outcomes) {
  for (auto& a : m.transitions[static_cast<std::size_t>(s)]) a = outcomes;
}

}  // namespace

Mdp delayed_reward_chain() {
  // 0: start; 1-3: arm A; 4-6: arm B; 7: absorbing end.
  Mdp m = blank("delayed", 8, 2);
  m.transitions[0][0] = {{1.0, 1, 0}};
  m.transitions[0][1] = {{1.0, 4, 1}};
  set_all(m, 1, {{1.0, 2, 0}});
  set_all(m, 2, {{1.0, 3, 0}});
  set_all(m, 3, {{1.0, 7, 10}});
  set_all(m, 4, {{1.0, 5, 0}});
  set_all(m, 5, {{1.0, 6, 0}});
  set_all(m, 6, {{1.0, 7, 0}});
  set_all(m, 7, {{1.0, 7, 0}});
  m.terminal[7] = 1;
  m.max_steps = 10;
  return m;
}

Mdp noisy_chain(int length, double slip, std::int64_t goal_reward) {
  if (length < 3) throw ConfigError("noisy chain needs at least 3 states");
  Mdp m = blank("noisy", length, 2);
  m.start = length / 2;
  const int last = length - 1;
  m.terminal[0] = 1;
  m.terminal[static_cast<std::size_t>(last)] = 1;
  for (int s = 0; s < length; ++s) {
    if (m.terminal[static_cast<std::size_t>(s)]) {
      set_all(m, s, {{1.0, s, 0}});
      continue;
    }
    for (int a = 0; a < 2; ++a) {
      const int intended = a == 0 ? s - 1 : s + 1;
      const int other = a == 0 ? s + 1 : s - 1;
      auto& outcomes = m.transitions[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
      for (auto [next, p] : {std::pair{intended, 1.0 - slip}, std::pair{other, slip}}) {
        if (p <= 0.0) continue;
        const std::int64_t base = next == last ? goal_reward : 0;
        outcomes.push_back({p * 0.5, next, base});
        outcomes.push_back({p * 0.5, next, base + 1});
      }
    }
  }
  m.max_steps = 1000;
  return m;
}

Mdp two_state_chain() {
  Mdp m = blank("two_state", 2, 2);
  m.transitions[0][0] = {{1.0, 1, 1}};
  m.transitions[0][1] = {{1.0, 0, 0}};
  m.transitions[1][0] = {{1.0, 0, 2}};
  m.transitions[1][1] = {{0.5, 1, 0}, {0.5, 1, 1}};
  m.max_steps = 1000;
  return m;
}

namespace {

// values[s] for `h` remaining steps.
std::vector<double> random_values(const Mdp& mdp, int h, double gamma) {
  std::vector<double> v(static_cast<std::size_t>(mdp.n_states), 0.0);
  for (int k = 0; k < h; ++k) {
    std::vector<double> next(v.size(), 0.0);
    for (int s = 0; s < mdp.n_states; ++s) {
      if (mdp.terminal[static_cast<std::size_t>(s)]) continue;
      double total = 0.0;
      for (const auto& outcomes : mdp.transitions[static_cast<std::size_t>(s)]) {
        for (const auto& o : outcomes) {
          total += o.prob * (static_cast<double>(o.reward) + gamma * v[static_cast<std::size_t>(o.next)]);
        }
      }
      next[static_cast<std::size_t>(s)] = total / mdp.n_actions;
    }
    v = std::move(next);
  }
  return v;
}

}  // namespace

double random_policy_value(const Mdp& mdp, int state, int horizon, double gamma, int steps_taken) {
  const int h = std::max(0, std::min(horizon, mdp.max_steps - steps_taken));
  return random_values(mdp, h, gamma)[static_cast<std::size_t>(state)];
}

double random_policy_q(const Mdp& mdp, int state, int action, int horizon, double gamma, int steps_taken) {
  if (mdp.terminal[static_cast<std::size_t>(state)]) return 0.0;
  const int h = std::max(0, std::min(horizon, mdp.max_steps - steps_taken));
  if (h == 0) return 0.0;
  // Q for one step followed by the random policy for the remaining budget.
  const auto v = random_values(mdp, h - 1, gamma);
  double total = 0.0;
  for (const auto& o : mdp.transitions[static_cast<std::size_t>(state)][static_cast<std::size_t>(action)]) {
    total += o.prob * (static_cast<double>(o.reward) + gamma * v[static_cast<std::size_t>(o.next)]);
  }
  return total;
}

MdpEnv::MdpEnv(Mdp mdp) : mdp_(std::move(mdp)) {
  mdp_.validate();
  for (int a = 0; a < mdp_.n_actions; ++a) alphabet_.push_back("a" + std::to_string(a));
  stochastic_ = mdp_.stochastic();
}

std::string MdpEnv::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  state_ = mdp_.start;
  steps_ = 0;
  reason_ = TerminalReason::none;
  done_ = mdp_.terminal[static_cast<std::size_t>(state_)] != 0;
  if (done_) reason_ = TerminalReason::env_done;
  return observation();
}

Transition MdpEnv::apply(ActionId action) {
  require_not_done();
  ++steps_;
  Transition tr;
  if (!is_legal(action)) {
    tr.reward = mdp_.invalid_penalty;
    tr.valid = false;
  } else {
    const auto& outcomes = mdp_.transitions[static_cast<std::size_t>(state_)][static_cast<std::size_t>(action)];
    std::size_t pick = 0;
    if (outcomes.size() > 1) {
      const double u = rng_.uniform();
      double acc = 0.0;
      pick = outcomes.size() - 1;
      for (std::size_t i = 0; i < outcomes.size(); ++i) {
        acc += outcomes[i].prob;
        if (u < acc) {
          pick = i;
          break;
        }
      }
    }
    tr.reward = outcomes[pick].reward;
    state_ = outcomes[pick].next;
  }
  if (mdp_.terminal[static_cast<std::size_t>(state_)]) {
    reason_ = TerminalReason::env_done;
  } else if (steps_ >= mdp_.max_steps) {
    reason_ = TerminalReason::step_limit;
  }
  done_ = reason_ != TerminalReason::none;
  tr.done = done_;
  tr.reason = reason_;
  return tr;
}

StateSnapshot MdpEnv::snapshot() const {
  ByteWriter w;
  w.put(static_cast<std::int32_t>(state_));
  w.put(static_cast<std::int32_t>(steps_));
  w.put(static_cast<std::uint8_t>(done_));
  w.put(static_cast<std::uint8_t>(reason_));
  w.put(rng_.seed());
  w.put(rng_.counter());
  return {kind(), mdp_.name, w.take()};
}

void MdpEnv::restore(const StateSnapshot& snapshot) {
  require_snapshot(snapshot);
  ByteReader r(snapshot.bytes);
  const int state = r.get<std::int32_t>();
  if (state < 0 || state >= mdp_.n_states) throw ContractError("snapshot state out of range");
  state_ = state;
  steps_ = r.get<std::int32_t>();
  done_ = r.get<std::uint8_t>() != 0;
  reason_ = static_cast<TerminalReason>(r.get<std::uint8_t>());
  const auto seed = r.get<std::uint64_t>();
  const auto counter = r.get<std::uint64_t>();
  rng_ = Rng(seed, counter);
  if (!r.exhausted()) throw FormatError("trailing bytes in MDP snapshot");
}

}  // namespace proact::tabular
