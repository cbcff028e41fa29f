#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace botscan {

/// Reads a whole file. Throws Error(io) naming the path when it is missing or
/// unreadable.
std::string read_file(const std::filesystem::path& path);

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace botscan
