#include "boxer/script.hpp"

#include <cctype>

#include "boxer/error.hpp"

namespace boxer {

using nlohmann::json;

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(std::size_t line, const std::string& message) {
  throw Error(ErrorCode::ParseError, "script line " + std::to_string(line) + ": " + message,
              "script:" + std::to_string(line));
}

/// Splits off the next whitespace-delimited word.
std::string_view next_word(std::string_view& rest) {
  rest = trim(rest);
  std::size_t end = 0;
  while (end < rest.size() && !is_space(rest[end])) ++end;
  auto word = rest.substr(0, end);
  rest.remove_prefix(end);
  return word;
}

/// key=value tokens; a value may be double-quoted with backslash escapes.
ViewParams parse_params(std::string_view rest, std::size_t line) {
  ViewParams params;
  while (true) {
    rest = trim(rest);
    if (rest.empty()) return params;
    const auto eq = rest.find('=');
    if (eq == std::string_view::npos || eq == 0) fail(line, "expected key=value, got '" + std::string(rest) + "'");
    const auto key = std::string(rest.substr(0, eq));
    for (const char c : key) {
      if (is_space(c)) fail(line, "expected key=value near '" + key + "'");
    }
    rest.remove_prefix(eq + 1);
    std::string value;
    if (!rest.empty() && rest.front() == '"') {
      std::size_t i = 1;
      bool closed = false;
      for (; i < rest.size(); ++i) {
        if (rest[i] == '\\' && i + 1 < rest.size()) {
          value += rest[++i];
        } else if (rest[i] == '"') {
          closed = true;
          ++i;
          break;
        } else {
          value += rest[i];
        }
      }
      if (!closed) fail(line, "unterminated quoted value for '" + key + "'");
      rest.remove_prefix(i);
      if (!rest.empty() && !is_space(rest.front())) fail(line, "expected whitespace after quoted value");
    } else {
      value = std::string(next_word(rest));
    }
    if (!params.emplace(key, std::move(value)).second) fail(line, "duplicate parameter '" + key + "'");
  }
}

void check_slot(std::string_view slot, std::size_t line) {
  if (!parse_slot(slot)) fail(line, "slot must be first or second, got '" + std::string(slot) + "'");
}

void optional_slot(json& action, std::string_view& rest, std::size_t line) {
  const auto slot = next_word(rest);
  if (!slot.empty()) {
    check_slot(slot, line);
    action["slot"] = std::string(slot);
  }
  if (!trim(rest).empty()) fail(line, "unexpected text '" + std::string(trim(rest)) + "'");
}

}  // namespace

std::vector<ScriptStep> parse_script(std::string_view text) {
  std::vector<ScriptStep> steps;
  std::size_t line_no = 0;
  while (!text.empty() || line_no == 0) {
    ++line_no;
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    line = trim(line);
    if (line.empty() || line.front() == '#') {
      if (text.empty()) break;
      continue;
    }

    ScriptStep step;
    step.line = line_no;
    auto rest = line;
    const auto command = next_word(rest);
    if (command == "emit") {
      step.emit = true;
      step.view = std::string(next_word(rest));
      if (step.view.empty()) fail(line_no, "emit needs a view kind");
      step.params = parse_params(rest, line_no);
    } else if (command == "set") {
      const auto slot = next_word(rest);
      const auto query = trim(rest);
      if (slot.empty() || query.empty()) fail(line_no, "usage: set first|second <query>");
      check_slot(slot, line_no);
      step.action = {{"action", "set"}, {"slot", std::string(slot)}, {"query", std::string(query)}};
    } else if (command == "combine") {
      const auto region = next_word(rest);
      if (region.empty()) fail(line_no, "usage: combine <region> [slot]");
      step.action = {{"action", "combine"}, {"region", std::string(region)}};
      optional_slot(step.action, rest, line_no);
    } else if (command == "intersect") {
      step.action = {{"action", "intersect"}};
      optional_slot(step.action, rest, line_no);
    } else if (command == "recall") {
      const auto index_text = next_word(rest);
      std::size_t index = 0;
      if (index_text.empty()) fail(line_no, "usage: recall <index> [slot]");
      for (const char c : index_text) {
        if (!std::isdigit(static_cast<unsigned char>(c))) fail(line_no, "history index must be a non-negative integer");
        index = index * 10 + static_cast<std::size_t>(c - '0');
      }
      step.action = {{"action", "recall"}, {"history_index", index}};
      optional_slot(step.action, rest, line_no);
    } else if (command == "clear") {
      const auto slot = next_word(rest);
      if (slot.empty() || !trim(rest).empty()) fail(line_no, "usage: clear first|second");
      check_slot(slot, line_no);
      step.action = {{"action", "clear"}, {"slot", std::string(slot)}};
    } else if (command == "scope") {
      const auto scope = next_word(rest);
      if (scope.empty() || !trim(rest).empty()) fail(line_no, "usage: scope train|test|all");
      step.action = {{"action", "scope"}, {"scope", std::string(scope)}};
    } else {
      fail(line_no, "unknown command '" + std::string(command) + "'");
    }
    steps.push_back(std::move(step));
    if (text.empty()) break;
  }
  return steps;
}

void run_script(Session& session, const std::vector<ScriptStep>& steps,
                const std::function<void(const ViewPayload&)>& sink) {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& step = steps[i];
    try {
      if (step.emit) {
        sink(session.view(step.view, step.params));
      } else {
        session.mutate(step.action);
      }
    } catch (const Error& e) {
      auto path = "step:" + std::to_string(i + 1);
      if (!e.detail_path().empty()) path += "/" + e.detail_path();
      throw Error(e.code(), "step " + std::to_string(i + 1) + " (line " + std::to_string(step.line) + "): " + e.what(),
                  path);
    }
  }
}

}  // namespace boxer
