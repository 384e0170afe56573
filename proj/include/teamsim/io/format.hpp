#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace teamsim::io {

enum class OutputFormat { Csv, Json };

std::string_view to_string(OutputFormat f);
std::optional<OutputFormat> parse_format(std::string_view s);

// Six significant digits, '.' separator, no locale. Zero prints as "0".
std::string num(double v);

// The double that num(v) denotes, so JSON output carries the same digits.
double round6(double v);

// Creates the directory (and parents). Throws IoError.
void ensure_dir(const std::filesystem::path& dir);

// Writes `text` to `path` in binary mode. Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view text);

// Whole file as a string. Throws IoError.
std::string read_file(const std::filesystem::path& path);

}  // namespace teamsim::io
