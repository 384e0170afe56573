#include "teamsim/des/event_log.hpp"

#include <sstream>

#include <fmt/format.h>

namespace teamsim::des {

std::string_view to_string(LogKind kind) {
  switch (kind) {
    case LogKind::Bootstrap: return "bootstrap";
    case LogKind::Arrival: return "arrival";
    case LogKind::Incident: return "incident";
    case LogKind::Dispatch: return "dispatch";
    case LogKind::Start: return "start";
    case LogKind::Stop: return "stop";
    case LogKind::Complete: return "complete";
    case LogKind::DeadLetter: return "dead_letter";
  }
  return "?";
}

std::string format_record(const LogRecord& r) {
  return fmt::format("{:.6f},{},{},{},{}", r.time, to_string(r.kind), r.item,
                     r.engineer, r.detail);
}

void EventLog::write(std::ostream& out) const {
  for (const auto& r : records_) out << format_record(r) << '\n';
}

std::string EventLog::str() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

}  // namespace teamsim::des
