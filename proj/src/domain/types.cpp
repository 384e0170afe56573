#include "teamsim/domain/types.hpp"

namespace teamsim {

std::string_view to_string(Priority p) {
  switch (p) {
    case Priority::P1: return "P1";
    case Priority::P2: return "P2";
    case Priority::P3: return "P3";
  }
  return "?";
}

std::string_view to_string(WorkType t) {
  switch (t) {
    case WorkType::ProjectTask: return "project_task";
    case WorkType::ServiceRequest: return "service_request";
    case WorkType::Incident: return "incident";
    case WorkType::ReworkIncident: return "rework_incident";
  }
  return "?";
}

std::optional<Priority> parse_priority(std::string_view s) {
  for (auto p : kAllPriorities) {
    if (to_string(p) == s) return p;
  }
  if (s == "p1") return Priority::P1;
  if (s == "p2") return Priority::P2;
  if (s == "p3") return Priority::P3;
  return std::nullopt;
}

std::optional<WorkType> parse_work_type(std::string_view s) {
  for (auto t : kAllWorkTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::string_view to_string(Affinity a) {
  return a == Affinity::ProjectPrimary ? "project" : "operational";
}

std::optional<Affinity> parse_affinity(std::string_view s) {
  if (s == "project") return Affinity::ProjectPrimary;
  if (s == "operational") return Affinity::OperationalPrimary;
  return std::nullopt;
}

double WorkItem::time_in_queue() const {
  double total = 0.0;
  for (const auto& e : queue_episodes) {
    if (e.leave) total += *e.leave - e.enter;
  }
  return total;
}

}  // namespace teamsim
