#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "proact/env.hpp"

namespace proact::tabular {

struct Outcome {
  double prob = 1.0;
  int next = 0;
  std::int64_t reward = 0;
};

/// Small finite MDP with integer rewards. Small enough for exact dynamic
/// programming, which makes it the reference fixture for the critic and the
/// trainer.
struct Mdp {
  std::string name = "chain";
  int n_states = 0;
  int n_actions = 0;
  int start = 0;
  std::vector<std::vector<std::vector<Outcome>>> transitions;  // [s][a]
  std::vector<std::uint8_t> terminal;
  std::int64_t invalid_penalty = -1;
  int max_steps = 100;

  void validate() const;
  bool stochastic() const;
};

// Two arms from the start state. Arm A pays 0 now and +10 three steps later;
// arm B pays +1 now and nothing after. Both arms take four steps in total.
Mdp delayed_reward_chain();

// `length` states in a row, start in the middle; actions left/right slip with
// probability `slip`; reaching either end terminates, the right end pays
// `goal_reward`, every step pays a coin-flip 0/1 bonus. Random-policy values
// are nontrivial and rollouts have real variance.
Mdp noisy_chain(int length = 7, double slip = 0.2, std::int64_t goal_reward = 5);

// Two states; used for small hand-checkable critic tests.
Mdp two_state_chain();

// Exact value of the uniform random policy over all actions, horizon-limited
// (horizon steps, or fewer if the episode cap intervenes) with discount gamma.
// `steps_taken` accounts for the environment's max_steps cap.
double random_policy_value(const Mdp& mdp, int state, int horizon, double gamma, int steps_taken = 0);
double random_policy_q(const Mdp& mdp, int state, int action, int horizon, double gamma, int steps_taken = 0);

class MdpEnv final : public Environment {
 public:
  explicit MdpEnv(Mdp mdp);

  EnvKind kind() const override { return EnvKind::tabular; }
  std::string_view variant() const override { return mdp_.name; }
  int max_steps() const override { return mdp_.max_steps; }
  bool stochastic() const override { return stochastic_; }

  std::string reset(std::uint64_t seed) override;
  Transition apply(ActionId action) override;
  std::string observation() const override { return "s" + std::to_string(state_); }
  const std::vector<std::string>& action_alphabet() const override { return alphabet_; }
  bool is_legal(ActionId action) const override { return action >= 0 && action < mdp_.n_actions; }
  bool done() const override { return done_; }
  TerminalReason terminal_reason() const override { return reason_; }
  int steps() const override { return steps_; }
  InfoMap info() const override { return {{"state", state_}}; }

  StateSnapshot snapshot() const override;
  void restore(const StateSnapshot& snapshot) override;
  void reseed(std::uint64_t seed) override { rng_ = Rng(seed); }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<MdpEnv>(*this); }

  int state() const { return state_; }
  const Mdp& mdp() const { return mdp_; }

 private:
  Mdp mdp_;
  std::vector<std::string> alphabet_;
  bool stochastic_ = false;
  int state_ = 0;
  int steps_ = 0;
  bool done_ = true;
  TerminalReason reason_ = TerminalReason::none;
  Rng rng_;
};

}  // namespace proact::tabular
