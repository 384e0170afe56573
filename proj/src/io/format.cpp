#include "teamsim/io/format.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <fmt/format.h>

#include "teamsim/errors.hpp"

namespace teamsim::io {

std::string_view to_string(OutputFormat f) {
  return f == OutputFormat::Csv ? "csv" : "json";
}

std::optional<OutputFormat> parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  return std::nullopt;
}

std::string num(double v) {
  if (v == 0.0) return "0";  // also folds -0
  return fmt::format("{:.6g}", v);
}

double round6(double v) {
  if (v == 0.0) return 0.0;
  if (!std::isfinite(v)) return v;
  const std::string s = num(v);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError(fmt::format("cannot create directory {}: {}", dir.string(),
                              ec ? ec.message() : "not a directory"));
  }
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError(fmt::format("write to {} failed", path.string()));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("read from {} failed", path.string()));
  return ss.str();
}

}  // namespace teamsim::io
