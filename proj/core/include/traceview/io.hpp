#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace traceview {

/// Writes through a temporary sibling file and renames it into place, so
/// readers see the old bytes or the new bytes, never a prefix.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace traceview
