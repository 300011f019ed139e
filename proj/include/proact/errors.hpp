#pragma once

#include <stdexcept>
#include <string>

namespace proact {

// Bad or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input: responses, boards, levels, files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated a precondition (wrong snapshot type, bad lengths, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Environment used out of order, e.g. step() after the episode ended.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Remote model endpoint failed after exhausting its retry budget.
class GatewayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace proact
