#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace traceview {

using TimePoint = std::chrono::sys_seconds;

/// Injectable source of "now" for saved-at stamps.
using Clock = std::function<TimePoint()>;

Clock system_clock();
Clock fixed_clock(TimePoint at);
/// Honours TRACEVIEW_CLOCK when set, otherwise the system clock.
Clock clock_from_environment();

/// UTC ISO 8601, second precision: 2012-05-01T10:00:00Z.
std::string format_timestamp(TimePoint t);
std::optional<TimePoint> parse_timestamp(std::string_view text);

/// Closed interval of calendar days covered by an ISO date of reduced
/// precision: "2010" covers 2010-01-01..2010-12-31, "2010-02" covers Feb.
struct DateSpan {
  std::chrono::year_month_day first;
  std::chrono::year_month_day last;
};

std::optional<DateSpan> parse_iso_date(std::string_view text);
std::string format_date(std::chrono::year_month_day d);

}  // namespace traceview
