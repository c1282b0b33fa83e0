#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cfprobe {

std::string to_lower(std::string_view text);
std::string_view trim(std::string_view text);
bool starts_with_ci(std::string_view text, std::string_view prefix);

/// Splits on runs of ASCII whitespace, dropping empty pieces.
std::vector<std::string_view> split_ws(std::string_view text);

/// Whole file as bytes. Throws std::runtime_error if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes via a temporary sibling then renames. Throws std::runtime_error.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace cfprobe
