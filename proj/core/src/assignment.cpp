#include "traceview/assignment.hpp"

#include "traceview/error.hpp"

namespace traceview {

std::string describe_scope(const AssignmentKey& key) {
  if (key.scope == ScopeLevel::application) return "application";
  return std::string(to_string(key.scope)) + ":" + key.instance;
}

std::pair<ScopeLevel, std::string> parse_scope_spec(std::string_view text) {
  if (text == "application") return {ScopeLevel::application, {}};
  auto colon = text.find(':');
  if (colon != std::string_view::npos) {
    auto level = parse_scope_level(text.substr(0, colon));
    auto instance = text.substr(colon + 1);
    if (level && *level != ScopeLevel::application && !instance.empty()) {
      return {*level, std::string(instance)};
    }
  }
  throw ValidationError("scope must be 'application', 'relation:<name>' or 'view:<id>', got '" +
                        std::string(text) + "'");
}

}  // namespace traceview
