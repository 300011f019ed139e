#include "proact/env.hpp"

#include <algorithm>
#include <cctype>

#include "proact/response.hpp"

namespace proact {

std::string_view to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::game2048: return "2048";
    case EnvKind::sokoban: return "sokoban";
    case EnvKind::tabular: return "tabular";
  }
  return "unknown";
}

std::string_view to_string(TerminalReason reason) {
  switch (reason) {
    case TerminalReason::none: return "none";
    case TerminalReason::solved: return "solved";
    case TerminalReason::step_limit: return "step_limit";
    case TerminalReason::invalid_limit: return "invalid_limit";
    case TerminalReason::deadlock: return "deadlock";
    case TerminalReason::env_done: return "env_done";
    case TerminalReason::aborted: return "aborted";
  }
  return "none";
}

TerminalReason terminal_reason_from_string(std::string_view text) {
  for (auto r : {TerminalReason::none, TerminalReason::solved, TerminalReason::step_limit,
                 TerminalReason::invalid_limit, TerminalReason::deadlock,
                 TerminalReason::env_done, TerminalReason::aborted}) {
    if (to_string(r) == text) return r;
  }
  throw FormatError("unknown terminal reason '" + std::string(text) + "'");
}

std::string to_hex(const std::vector<std::uint8_t>& bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw FormatError("hex payload has odd length");
  const auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw FormatError("invalid hex digit");
  };
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  }
  return out;
}

std::string normalize_action_text(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::vector<ActionId> Environment::legal_actions() const {
  std::vector<ActionId> out;
  for (ActionId a = 0; a < action_count(); ++a) {
    if (is_legal(a)) out.push_back(a);
  }
  return out;
}

ActionId Environment::action_id(std::string_view text) const {
  const std::string norm = normalize_action_text(text);
  const auto& alphabet = action_alphabet();
  const auto it = std::find(alphabet.begin(), alphabet.end(), norm);
  return it == alphabet.end() ? kInvalidAction : static_cast<ActionId>(it - alphabet.begin());
}

std::string_view Environment::action_name(ActionId action) const {
  if (action < 0 || action >= action_count()) return kInvalidActionName;
  return action_alphabet()[static_cast<std::size_t>(action)];
}

StepOutcome Environment::step(std::string_view response_text) {
  require_not_done();
  ActionId action = kInvalidAction;
  if (auto parsed = try_parse_response(response_text)) action = action_id(parsed->action_text);
  return step_action(action);
}

StepOutcome Environment::step_action(ActionId action) {
  require_not_done();
  if (action < kInvalidAction || action >= action_count()) action = kInvalidAction;
  const Transition tr = apply(action);
  StepOutcome out;
  out.observation = observation();
  out.reward = tr.reward;
  out.done = tr.done;
  out.valid = tr.valid;
  out.action = action;
  out.reason = tr.reason;
  out.info = info();
  return out;
}

void Environment::require_snapshot(const StateSnapshot& s) const {
  if (s.kind != kind()) {
    throw ContractError("cannot restore a " + std::string(to_string(s.kind)) +
                        " snapshot into a " + std::string(to_string(kind())) + " environment");
  }
  if (s.variant != variant()) {
    throw ContractError("snapshot variant '" + s.variant + "' does not match environment variant '" +
                        std::string(variant()) + "'");
  }
}

}  // namespace proact
