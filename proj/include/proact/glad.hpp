#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "proact/gateway.hpp"
#include "proact/mcts.hpp"

namespace proact {

struct GladContext {
  const Environment& env;  // positioned at the decision state
  const std::string& observation;
  const ProbeSet& probes;
  int t = 0;
  bool backtrack_allowed = false;
};

struct AgentReply {
  std::string analysis;
  ActionId action = kInvalidAction;
  bool backtrack = false;
};

class GladAgent {
 public:
  virtual ~GladAgent() = default;
  virtual AgentReply decide(const GladContext& ctx) = 0;
  virtual std::string name() const = 0;
};

// Picks the root action with the best probe return.
class BestProbeAgent final : public GladAgent {
 public:
  AgentReply decide(const GladContext& ctx) override;
  std::string name() const override { return "best_probe"; }
};

// Like BestProbeAgent, but asks to backtrack when no probe reaches `threshold`.
class ThresholdBacktrackAgent final : public GladAgent {
 public:
  explicit ThresholdBacktrackAgent(std::int64_t threshold) : threshold_(threshold) {}
  AgentReply decide(const GladContext& ctx) override;
  std::string name() const override { return "threshold_backtrack"; }

 private:
  std::int64_t threshold_;
};

class ScriptedAgent final : public GladAgent {
 public:
  using Script = std::function<AgentReply(const GladContext&)>;
  explicit ScriptedAgent(Script script) : script_(std::move(script)) {}
  AgentReply decide(const GladContext& ctx) override { return script_(ctx); }
  std::string name() const override { return "scripted"; }

 private:
  Script script_;
};

// Sends the state plus rendered probes to a model; "<BACKTRACK>" in the
// reply requests a revert.
class GatewayGladAgent final : public GladAgent {
 public:
  explicit GatewayGladAgent(std::shared_ptr<const GatewayClient> client) : client_(std::move(client)) {}
  AgentReply decide(const GladContext& ctx) override;
  std::string name() const override { return "gateway"; }

 private:
  std::shared_ptr<const GatewayClient> client_;
};

inline constexpr std::string_view kBacktrackToken = "<BACKTRACK>";

// Raw probe listing shown to an agent (not part of any dataset record).
std::string render_probes(const Environment& env, const ProbeSet& probes);

struct GladStep {
  int t = 0;
  std::string state_text;
  StateSnapshot snapshot;
  ProbeSet probes;
  std::string analysis;
  ActionId action = kInvalidAction;
  std::int64_t reward = 0;
  bool legal = true;
  // A backtrack request right before this step was refused.
  bool backtrack_refused = false;
};

struct GladHistory {
  std::vector<GladStep> steps;
  int backtracks = 0;
  int refused_backtracks = 0;
  int decisions = 0;
  TerminalReason terminal_reason = TerminalReason::none;
  std::int64_t total_reward = 0;
};

struct GladConfig {
  ProbeConfig probe;
  int backtrack_budget = 10;
  int rounds = 1;  // probe rounds merged per decision
};

GladHistory glad_episode(Environment& env, GladAgent& agent, const GladConfig& cfg, std::uint64_t seed);

// ---- compression ----

// Deterministic Observation -> Analysis -> Conclusion prose. Names the chosen
// action, at least one rejected alternative, and ends with "move: <action>".
std::string compress_template(const Environment& env_at_state, const ProbeSet& probes, ActionId chosen);

struct Compressed {
  std::string text;
  std::string compressor;  // "template", "teacher", "template_fallback"
};

// Teacher path: the gateway rewrites the evidence under the four principles;
// falls back to the template on any failure or unusable reply.
Compressed compress_teacher(const GatewayClient& client, const Environment& env_at_state, const ProbeSet& probes,
                            ActionId chosen);

// ---- dataset ----

struct GladRecord {
  std::string episode_id;
  int t = 0;
  std::string env;
  std::string variant;
  std::string state_text;
  std::string snapshot_hex;
  std::string reasoning;
  std::string action;
  std::int64_t reward = 0;
  bool legal = true;
  // provenance
  std::string compressor;
  int probe_k = 0;
  int probe_depth = 0;
  std::int64_t best_probe_return = 0;
  double chosen_mean_return = 0.0;
  int backtracks_so_far = 0;

  bool operator==(const GladRecord&) const = default;
};

std::vector<GladRecord> make_records(const Environment& env, const GladHistory& history, const std::string& episode_id,
                                     const GladConfig& cfg, const GatewayClient* teacher = nullptr);

std::size_t write_dataset(std::ostream& out, const std::vector<GladRecord>& records);
std::size_t write_dataset(const std::string& path, const std::vector<GladRecord>& records);
std::vector<GladRecord> read_dataset(std::istream& in);

struct ReplayFailure {
  std::size_t index = 0;
  std::string reason;
};

struct ReplayReport {
  std::size_t checked = 0;
  std::vector<ReplayFailure> failures;
};

// Restores each record's snapshot in a clone of `prototype`, checks the state
// text, the action's membership and legality, and the recorded reward.
ReplayReport replay_check(const std::vector<GladRecord>& records, const Environment& prototype);

}  // namespace proact
