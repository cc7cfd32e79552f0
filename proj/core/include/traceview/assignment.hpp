#pragma once

#include <compare>
#include <map>
#include <string>
#include <string_view>

#include "traceview/schema.hpp"

namespace traceview {

/// Where a preference value applies: the application, one relation (by
/// name) or one view (by id). Ordered by (scope, instance, pref id).
struct AssignmentKey {
  std::string pref_id;
  ScopeLevel scope = ScopeLevel::application;
  std::string instance;  // empty iff scope == application

  static AssignmentKey application(std::string pref_id) {
    return {std::move(pref_id), ScopeLevel::application, {}};
  }
  static AssignmentKey relation(std::string pref_id, std::string name) {
    return {std::move(pref_id), ScopeLevel::relation, std::move(name)};
  }
  static AssignmentKey view(std::string pref_id, std::string id) {
    return {std::move(pref_id), ScopeLevel::view, std::move(id)};
  }

  friend bool operator==(const AssignmentKey&, const AssignmentKey&) = default;
  friend std::strong_ordering operator<=>(const AssignmentKey& a, const AssignmentKey& b) {
    if (auto c = a.scope <=> b.scope; c != 0) return c;
    if (auto c = a.instance <=> b.instance; c != 0) return c;
    return a.pref_id <=> b.pref_id;
  }
};

/// "application", "relation:<name>" or "view:<id>".
std::string describe_scope(const AssignmentKey& key);
/// Parses the describe_scope() form into (scope, instance).
std::pair<ScopeLevel, std::string> parse_scope_spec(std::string_view text);

/// Canonical values keyed in canonical order.
using AssignmentMap = std::map<AssignmentKey, std::string>;

}  // namespace traceview
