#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace traceview::csv {

using Record = std::vector<std::string>;

/// RFC 4180 reader: comma separated, optional double-quoted fields with ""
/// escapes, CRLF or LF line ends. A trailing newline does not add a record.
std::vector<Record> parse(std::string_view text);
std::vector<Record> read_file(const std::filesystem::path& path);

std::string quote_field(std::string_view field);

}  // namespace traceview::csv
