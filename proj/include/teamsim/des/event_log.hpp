#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "teamsim/domain/types.hpp"

namespace teamsim::des {

enum class LogKind : std::uint8_t {
  Bootstrap,
  Arrival,
  Incident,
  Dispatch,
  Start,
  Stop,
  Complete,
  DeadLetter,
};

std::string_view to_string(LogKind kind);

struct LogRecord {
  double time = 0.0;
  LogKind kind = LogKind::Bootstrap;
  ItemId item = -1;
  EngineerId engineer = -1;
  std::string detail;  // semicolon-separated key=value pairs, no commas
};

// Append-only record of everything that happened in one replication.
class EventLog {
 public:
  void append(double time, LogKind kind, ItemId item, EngineerId engineer,
              std::string detail = {}) {
    records_.push_back({time, kind, item, engineer, std::move(detail)});
  }

  const std::vector<LogRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  // One line per record: time,event_kind,item_id,engineer_id,detail with
  // time printed to 6 decimal places.
  void write(std::ostream& out) const;
  std::string str() const;

 private:
  std::vector<LogRecord> records_;
};

std::string format_record(const LogRecord& record);

}  // namespace teamsim::des
