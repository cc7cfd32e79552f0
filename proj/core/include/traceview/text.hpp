#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace traceview {

/// Splits on every separator; "" yields one empty item.
std::vector<std::string> split(std::string_view text, char separator);
std::string join(const std::vector<std::string>& items, std::string_view separator);

/// Finite decimal, the whole string consumed.
std::optional<double> parse_decimal(std::string_view text);
/// Shortest text that reads back as the same double; -0 prints as 0.
std::string format_decimal(double value);
/// Rounded to `digits` fractional digits with trailing zeros trimmed.
std::string format_fixed_trimmed(double value, int digits);

/// Valid UTF-8 without control characters other than tab, CR and LF.
bool is_storable_text(std::string_view text);

/// Percent-encodes '%' and every character in `reserved`.
std::string percent_escape(std::string_view text, std::string_view reserved);
std::optional<std::string> percent_unescape(std::string_view text);

}  // namespace traceview
