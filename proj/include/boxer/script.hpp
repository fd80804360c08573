#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "boxer/session.hpp"
#include "boxer/views.hpp"
#include "json.hpp"

namespace boxer {

/**
 * One line of a selection script. Either a mutation action (the same JSON
 * schema the HTTP service accepts) or a view emission.
 *
 *   set first|second <query>      combine <region> [slot]     intersect [slot]
 *   recall <index> [slot]         clear first|second          scope train|test|all
 *   emit <view> [key=value ...]   # comment
 */
struct ScriptStep {
  std::size_t line = 0;
  bool emit = false;
  nlohmann::json action;       // when !emit
  std::string view;            // when emit
  ViewParams params;           // when emit
};

/// Throws ParseError with detail_path `script:<line>`.
std::vector<ScriptStep> parse_script(std::string_view text);

/// Runs the steps against `session`, handing each emitted payload to `sink`.
/// The first failing step rethrows as an Error whose detail_path names the
/// step (`step:<index>`, 1-based, then the original path).
void run_script(Session& session, const std::vector<ScriptStep>& steps,
                const std::function<void(const ViewPayload&)>& sink);

}  // namespace boxer
