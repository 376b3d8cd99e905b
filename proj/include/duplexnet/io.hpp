#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace duplexnet {

/// Writes via a temporary sibling file and rename, so readers never see a
/// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// Splits one CSV record on commas and trims surrounding whitespace.
std::vector<std::string> split_csv_line(std::string_view line);

/// 17 significant digits; "nan" for NaN.
std::string format_double(double value);

}  // namespace duplexnet
