#pragma once

#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "proact/errors.hpp"
#include "proact/rng.hpp"

namespace proact {

enum class EnvKind : std::uint8_t { game2048 = 1, sokoban = 2, tabular = 3 };

std::string_view to_string(EnvKind kind);

enum class TerminalReason : std::uint8_t {
  none,
  solved,
  step_limit,
  invalid_limit,
  deadlock,
  env_done,
  aborted,
};

std::string_view to_string(TerminalReason reason);
TerminalReason terminal_reason_from_string(std::string_view text);

using ActionId = int;
inline constexpr ActionId kInvalidAction = -1;
inline constexpr std::string_view kInvalidActionName = "INVALID";

using InfoMap = std::map<std::string, std::int64_t>;

struct StepOutcome {
  std::string observation;
  std::int64_t reward = 0;
  bool done = false;
  bool valid = true;
  ActionId action = kInvalidAction;
  TerminalReason reason = TerminalReason::none;
  InfoMap info;

  bool operator==(const StepOutcome&) const = default;
};

// Result of applying an already-parsed action; the allocation-free path used
// by rollouts.
struct Transition {
  std::int64_t reward = 0;
  bool done = false;
  bool valid = true;
  TerminalReason reason = TerminalReason::none;
};

/// Full restorable environment state, including the spawn stream and the
/// step/invalid counters. The payload is opaque to everything except the
/// environment type that produced it.
struct StateSnapshot {
  EnvKind kind = EnvKind::game2048;
  std::string variant;
  std::vector<std::uint8_t> bytes;

  bool operator==(const StateSnapshot&) const = default;
};

std::string to_hex(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);

class ByteWriter {
 public:
  template <typename T>
  void put(const T& value) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    out_.insert(out_.end(), p, p + sizeof(T));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& in) : in_(in) {}

  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    if (pos_ + sizeof(T) > in_.size()) throw FormatError("snapshot payload truncated");
    T value;
    std::memcpy(&value, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  bool exhausted() const { return pos_ == in_.size(); }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

/// The MDP contract shared by every environment: text in, reward out.
///
/// step() parses a free-form response and applies the parsed action; apply()
/// takes an action id directly. Both advance the same counters. Stepping a
/// finished episode throws UsageError until reset().
class Environment {
 public:
  virtual ~Environment() = default;

  virtual EnvKind kind() const = 0;
  virtual std::string_view variant() const = 0;
  virtual int max_steps() const = 0;
  virtual bool stochastic() const = 0;

  virtual std::string reset(std::uint64_t seed) = 0;
  virtual Transition apply(ActionId action) = 0;
  virtual std::string observation() const = 0;

  virtual const std::vector<std::string>& action_alphabet() const = 0;
  // True when the action changes the state (i.e. incurs no invalid penalty).
  virtual bool is_legal(ActionId action) const = 0;

  virtual bool done() const = 0;
  virtual TerminalReason terminal_reason() const = 0;
  virtual int steps() const = 0;
  // Info of the most recent step (or of the initial state after reset).
  virtual InfoMap info() const = 0;

  virtual StateSnapshot snapshot() const = 0;
  virtual void restore(const StateSnapshot& snapshot) = 0;
  // Replace the stochastic stream without touching the board.
  virtual void reseed(std::uint64_t seed) = 0;

  virtual std::unique_ptr<Environment> clone() const = 0;

  virtual std::string state_key() const { return observation(); }

  std::string_view name() const { return to_string(kind()); }
  int action_count() const { return static_cast<int>(action_alphabet().size()); }
  std::vector<ActionId> legal_actions() const;

  // Maps normalized action text ("Push  Up" -> "push up") to an id, or
  // kInvalidAction when it is not in the alphabet.
  ActionId action_id(std::string_view text) const;
  std::string_view action_name(ActionId action) const;

  StepOutcome step(std::string_view response_text);
  StepOutcome step_action(ActionId action);

 protected:
  void require_not_done() const {
    if (done()) throw UsageError("step() called on a finished episode; call reset() first");
  }
  void require_snapshot(const StateSnapshot& s) const;
};

// Lowercase, trim and collapse internal whitespace.
std::string normalize_action_text(std::string_view text);

}  // namespace proact
