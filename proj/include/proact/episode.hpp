#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "proact/env.hpp"

namespace proact {

class Policy;

/// One decision: c_t = (reasoning, action) plus what the environment said.
struct Turn {
  std::string observation;
  std::string reasoning;
  std::string action;  // alphabet entry or "INVALID"
  std::string raw_response;
  std::int64_t reward = 0;
  bool valid = true;
  InfoMap info;

  bool operator==(const Turn&) const = default;
};

struct Trajectory {
  std::string env;
  std::string variant;
  int max_steps = 0;
  std::uint64_t initial_seed = 0;
  std::vector<Turn> turns;
  TerminalReason terminal_reason = TerminalReason::none;
  std::int64_t total_reward = 0;
  std::string final_observation;
  std::string abort_message;

  bool operator==(const Trajectory&) const = default;
};

// Resets `env` with `seed` and plays `policy` until the episode ends. A policy
// exception (e.g. GatewayError) ends the episode with TerminalReason::aborted.
Trajectory run_episode(Environment& env, const Policy& policy, std::uint64_t seed, Rng& policy_rng);

// JSONL transcript: a header line {env, variant, seed, max_steps, ...} followed
// by one {t, observation, reasoning, action, raw_response, reward, valid} per turn.
void write_transcript(std::ostream& out, const Trajectory& trajectory);
void write_transcript(const std::string& path, const Trajectory& trajectory);
Trajectory read_transcript(std::istream& in);

}  // namespace proact
