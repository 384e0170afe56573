#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "teamsim/des/config.hpp"
#include "teamsim/domain/types.hpp"
#include "teamsim/io/fit.hpp"
#include "teamsim/scenario.hpp"

namespace teamsim::io {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// ISO-8601: YYYY-MM-DD, optionally followed by 'T' or ' ' and
// HH:MM[:SS[.fff]], optionally followed by 'Z' or +HH:MM / -HH:MM.
// Times are normalized to UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text);

// YYYY-MM-DDTHH:MM:SS.mmmZ
std::string format_timestamp(Timestamp t);

// Days between two timestamps.
double days_between(Timestamp from, Timestamp to);

struct TicketRecord {
  Timestamp opened_at;
  std::optional<Timestamp> closed_at;
  WorkType work_type = WorkType::Incident;
  Priority priority = Priority::P3;
  std::string assignment_group;
  std::optional<double> touch_hours;
};

// Header names that hold each canonical field.
struct ColumnMapping {
  std::string opened_at = "opened_at";
  std::string closed_at = "closed_at";
  std::string work_type = "work_type";
  std::string priority = "priority";
  std::string assignment_group = "assignment_group";
  std::string touch_hours = "touch_hours";
};

// Applies "field=header" to the mapping. Throws ConfigError for unknown
// fields or malformed text.
void apply_mapping(ColumnMapping& mapping, std::string_view assignment);

struct RecordError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

struct ClassFit {
  WorkType work_type = WorkType::Incident;
  Priority priority = Priority::P3;
  std::size_t records = 0;
  std::size_t zero_gaps = 0;        // identical opened_at values, skipped
  std::optional<FitResult> arrival;  // rate per day
  std::optional<FitResult> service;  // rate per hour
  double service_mean_hours = 0.0;
};

struct IngestResult {
  std::vector<TicketRecord> records;
  std::vector<RecordError> errors;
  std::vector<std::string> warnings;
  std::vector<ClassFit> fits;  // classes in work type then priority order
  // Empirical priority frequencies per work type that has records.
  std::map<WorkType, std::array<double, kPriorityCount>> priority_mix;
  std::size_t rows = 0;  // data rows seen
};

// Rows that fail to parse are listed in `errors`; the whole input is
// rejected with DataError when more than 10% of rows fail or a mapped
// required column is missing from the header.
IngestResult ingest_tickets(std::istream& in, const ColumnMapping& mapping = {},
                            ServiceTimeSource source = ServiceTimeSource::Touch);
IngestResult ingest_tickets(const std::filesystem::path& path,
                            const ColumnMapping& mapping = {},
                            ServiceTimeSource source = ServiceTimeSource::Touch);

// Generating rates and mixes for a synthetic ticket export.
struct SynthSpec {
  std::string start = "2024-01-01T00:00:00Z";
  double span_days = 182.0;
  std::uint64_t seed = 1;
  std::string assignment_group = "it-operations";
  double queue_mean_days = 1.0;  // open time on top of touch time
  std::vector<des::GeneratorConfig> generators;
};

// Rate per day of each (work type, priority) class implied by the spec.
std::map<std::pair<WorkType, Priority>, double> class_rates(const SynthSpec& spec);

// Ticket export text: one independent Poisson stream per class, records
// sorted by opened_at. Deterministic per seed; span 0 gives the header only.
std::string generate_synthetic(const SynthSpec& spec);

// Writes generate_synthetic(spec) to `path`. Throws IoError.
void generate_synthetic(const SynthSpec& spec, const std::filesystem::path& path);

inline constexpr std::string_view kTicketHeader =
    "opened_at,closed_at,work_type,priority,assignment_group,touch_hours";

}  // namespace teamsim::io
