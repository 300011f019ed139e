#include "proact/response.hpp"

#include <algorithm>
#include <cctype>

#include "proact/env.hpp"
#include "proact/errors.hpp"

namespace proact {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool word_boundary_before(const std::string& s, std::size_t pos) {
  return pos == 0 || !std::isalnum(static_cast<unsigned char>(s[pos - 1]));
}

// Last occurrence of `key` that starts at a word boundary.
std::size_t rfind_key(const std::string& haystack, std::string_view key) {
  std::size_t pos = haystack.rfind(key);
  while (pos != std::string::npos) {
    if (word_boundary_before(haystack, pos)) return pos;
    if (pos == 0) break;
    pos = haystack.rfind(key, pos - 1);
  }
  return std::string::npos;
}

std::size_t find_key(const std::string& haystack, std::string_view key) {
  std::size_t pos = haystack.find(key);
  while (pos != std::string::npos) {
    if (word_boundary_before(haystack, pos)) return pos;
    pos = haystack.find(key, pos + 1);
  }
  return std::string::npos;
}

// "**Up**." / "[left]" / "`push up`" -> "up" / "left" / "push up".
std::string clean_action(std::string_view raw) {
  std::string kept;
  for (char c : raw) {
    if (c == '*' || c == '`' || c == '[' || c == ']' || c == '"' || c == '\'') continue;
    kept.push_back(c);
  }
  std::string_view v = trim(kept);
  while (!v.empty() && (v.back() == '.' || v.back() == '!' || v.back() == ',')) v.remove_suffix(1);
  return normalize_action_text(v);
}

}  // namespace

std::optional<ParsedResponse> try_parse_response(std::string_view text) {
  const std::string folded = lower(text);
  const std::size_t action_pos = rfind_key(folded, "action:");
  const std::size_t move_pos = rfind_key(folded, "move:");

  std::size_t key_pos = std::string::npos;
  std::size_t key_len = 0;
  if (action_pos != std::string::npos &&
      (move_pos == std::string::npos || action_pos > move_pos)) {
    key_pos = action_pos;
    key_len = 7;
  } else if (move_pos != std::string::npos) {
    key_pos = move_pos;
    key_len = 5;
  }
  if (key_pos == std::string::npos) return std::nullopt;

  const std::size_t value_begin = key_pos + key_len;
  std::size_t value_end = text.find('\n', value_begin);
  if (value_end == std::string_view::npos) value_end = text.size();
  std::string action = clean_action(text.substr(value_begin, value_end - value_begin));
  if (action.empty()) return std::nullopt;

  ParsedResponse parsed;
  parsed.action_text = std::move(action);

  const std::size_t thought_pos = find_key(folded, "thought:");
  if (thought_pos != std::string::npos && thought_pos < key_pos) {
    parsed.reasoning = std::string(trim(text.substr(thought_pos + 8, key_pos - thought_pos - 8)));
  } else {
    parsed.reasoning = std::string(trim(text.substr(0, key_pos)));
  }
  return parsed;
}

ParsedResponse parse_response(std::string_view text) {
  auto parsed = try_parse_response(text);
  if (!parsed) throw FormatError("response has no 'action:' or 'move:' key");
  return *parsed;
}

}  // namespace proact
