#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "proact/env.hpp"

namespace proact {

// Everything needed to build an environment from a config file or flags.
struct EnvSpec {
  std::string env;  // "2048", "sokoban", "chain"
  std::string variant = "standard";
  int max_steps = -1;  // -1: the environment's default; 0 is rejected
  bool escaped_newline = false;
  double spawn_high_prob = 0.1;
  // Sokoban level source: "simplified", "generated:<count>", or a file path.
  std::string levels = "simplified";
  std::uint64_t level_seed = 0;
  bool deadlock_termination = true;
  int invalid_limit = -1;  // -1: default

  void validate() const;
};

// Chain variants: "delayed", "noisy", "two_state" ("standard" = "delayed").
std::unique_ptr<Environment> make_environment(const EnvSpec& spec);

}  // namespace proact
