#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace teamsim {

// Simulated time is measured in days; service effort in hours.
inline constexpr double kHoursPerDay = 8.0;

using ItemId = std::int64_t;
using EngineerId = int;

// P1 is the most urgent. The enumerator value is the rank (0 = highest).
enum class Priority : std::uint8_t { P1 = 0, P2 = 1, P3 = 2 };
inline constexpr std::size_t kPriorityCount = 3;
inline constexpr std::array<Priority, kPriorityCount> kAllPriorities{
    Priority::P1, Priority::P2, Priority::P3};

constexpr std::size_t rank(Priority p) { return static_cast<std::size_t>(p); }

// True when `a` is strictly more urgent than `b`.
constexpr bool outranks(Priority a, Priority b) { return rank(a) < rank(b); }

enum class WorkType : std::uint8_t {
  ProjectTask = 0,
  ServiceRequest = 1,
  Incident = 2,
  ReworkIncident = 3,
};
inline constexpr std::size_t kWorkTypeCount = 4;
inline constexpr std::array<WorkType, kWorkTypeCount> kAllWorkTypes{
    WorkType::ProjectTask, WorkType::ServiceRequest, WorkType::Incident,
    WorkType::ReworkIncident};

constexpr std::size_t index(WorkType t) { return static_cast<std::size_t>(t); }

// Project work versus everything that arrives as a ticket.
constexpr bool is_operational(WorkType t) { return t != WorkType::ProjectTask; }

std::string_view to_string(Priority p);
std::string_view to_string(WorkType t);
std::optional<Priority> parse_priority(std::string_view s);
std::optional<WorkType> parse_work_type(std::string_view s);

inline constexpr int kDefaultSkillLevels = 3;

struct SkillSpec {
  std::string skill_type;
  int skill_level = 1;  // 1..kDefaultSkillLevels, higher is more skilled

  friend bool operator==(const SkillSpec&, const SkillSpec&) = default;
};

struct QueueEpisode {
  double enter = 0.0;
  std::optional<double> leave;
};

struct WorkItem {
  ItemId id = 0;
  WorkType work_type = WorkType::Incident;
  Priority priority = Priority::P3;
  SkillSpec required;
  double arrival_time = 0.0;       // days
  double service_demand = 0.0;     // hours
  double remaining_service = 0.0;  // hours
  double penalty_hours = 0.0;      // switching penalties charged so far
  int stop_count = 0;
  int reassignment_count = 0;
  std::vector<QueueEpisode> queue_episodes;
  std::optional<double> completion_time;

  // Engineers that abandoned this item for lack of skill level.
  std::vector<EngineerId> skill_stopped_by;
  // Engineer whose skill check already ran for the current assignment.
  std::optional<EngineerId> skill_checked_by;

  double time_in_queue() const;
};

enum class Affinity : std::uint8_t { ProjectPrimary, OperationalPrimary };

std::string_view to_string(Affinity a);
std::optional<Affinity> parse_affinity(std::string_view s);

struct Engineer {
  EngineerId id = 0;
  SkillSpec skill;
  Affinity affinity = Affinity::OperationalPrimary;
  double capacity_factor = 1.0;  // (0, 1]
  std::optional<ItemId> serving;

  bool idle() const { return !serving.has_value(); }
  bool prefers(WorkType t) const {
    return (affinity == Affinity::ProjectPrimary) == !is_operational(t);
  }
};

}  // namespace teamsim
