#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "proact/env.hpp"

namespace proact {

// One element that carries a log-probability in the losses: the whole turn
// for tabular policies, a token for gateway exports.
struct DecisionUnit {
  std::string unit;
  double logprob = 0.0;
};

struct Decision {
  std::string reasoning;
  ActionId action = kInvalidAction;
  // When non-empty the environment parses this text instead of `action`.
  std::string raw_response;
  std::vector<DecisionUnit> units;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual Decision decide(const Environment& env, Rng& rng) const = 0;
  virtual std::string name() const = 0;
  // Whether decide() may be called concurrently from several threads.
  virtual bool thread_safe() const { return true; }
};

// Uniform over legal (state-changing) actions, or over the whole alphabet.
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(bool legal_only = true) : legal_only_(legal_only) {}
  Decision decide(const Environment& env, Rng& rng) const override;
  std::string name() const override { return legal_only_ ? "random" : "random_any"; }

 private:
  bool legal_only_;
};

// One-step lookahead: highest immediate reward, random tie-break.
class GreedyPolicy final : public Policy {
 public:
  Decision decide(const Environment& env, Rng& rng) const override;
  std::string name() const override { return "greedy"; }
};

// Emits a fixed response every turn; handy for format-penalty tests.
class FixedTextPolicy final : public Policy {
 public:
  explicit FixedTextPolicy(std::string text) : text_(std::move(text)) {}
  Decision decide(const Environment& env, Rng& rng) const override;
  std::string name() const override { return "fixed_text"; }

 private:
  std::string text_;
};

/// Softmax over per-state logits. Unseen states have all-zero logits.
/// Reads are safe concurrently; writes need a single writer.
class TabularPolicy final : public Policy {
 public:
  using KeyFn = std::function<std::string(const Environment&)>;

  TabularPolicy(int n_actions, double learning_rate, KeyFn key_fn = {});

  Decision decide(const Environment& env, Rng& rng) const override;
  std::string name() const override { return "tabular"; }

  std::string key(const Environment& env) const;
  int action_count() const { return n_actions_; }
  double learning_rate() const { return learning_rate_; }

  std::vector<double> logits(const std::string& key) const;
  std::vector<double> probabilities(const std::string& key) const;
  double logprob(const std::string& key, ActionId action) const;
  // d logprob(a) / d logits = e_a - pi.
  std::vector<double> logprob_gradient(const std::string& key, ActionId action) const;
  // logits += learning_rate * gradient.
  void update(const std::string& key, const std::vector<double>& gradient);
  void set_logits(const std::string& key, std::vector<double> logits);

  // Argmax instead of sampling (ties to the lowest id).
  void set_greedy(bool greedy) { greedy_ = greedy; }

  // Independent frozen copy, the pi_old of the ratio.
  std::shared_ptr<const TabularPolicy> freeze() const { return std::make_shared<const TabularPolicy>(*this); }

  const std::map<std::string, std::vector<double>>& table() const { return table_; }
  bool operator==(const TabularPolicy& other) const { return table_ == other.table_; }

 private:
  int n_actions_;
  double learning_rate_;
  KeyFn key_fn_;
  bool greedy_ = false;
  std::map<std::string, std::vector<double>> table_;
};

// Numerically stable log(sum(exp(x))).
double logsumexp(const std::vector<double>& x);

}  // namespace proact
