#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace proact {

struct ParsedResponse {
  std::string reasoning;
  std::string action_text;

  bool operator==(const ParsedResponse&) const = default;
};

// Extracts "thought: ..." and the action after the last "action:" or "move:"
// key (case-insensitive). Returns nullopt when no action key carries text.
std::optional<ParsedResponse> try_parse_response(std::string_view text);

// Same as try_parse_response but throws FormatError.
ParsedResponse parse_response(std::string_view text);

}  // namespace proact
