#pragma once

#include <cstdint>
#include <queue>
#include <vector>

namespace teamsim::des {

enum class EventKind : std::uint8_t {
  Arrival,          // target = generator index
  ServiceComplete,  // target = engineer index
  InterruptTick,    // target = engineer index
  SkillStop,        // target = engineer index
  QueueSample,      // target = day
};

struct ScheduledEvent {
  double time = 0.0;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::Arrival;
  int target = 0;
  // Service events carry the engineer's assignment token; a stale token
  // means the service they belong to was stopped.
  std::uint64_t token = 0;
};

// Future event list ordered by (time, insertion sequence).
class EventCalendar {
 public:
  void schedule(double time, EventKind kind, int target,
                std::uint64_t token = 0);

  bool empty() const { return heap_.empty(); }
  const ScheduledEvent& peek() const { return heap_.top(); }

  // Advances the clock to the next event. Throws EngineError if the event
  // lies in the past.
  ScheduledEvent pop();

  double now() const { return now_; }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const ScheduledEvent& a, const ScheduledEvent& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.sequence > b.sequence;
    }
  };

  std::priority_queue<ScheduledEvent, std::vector<ScheduledEvent>, Later>
      heap_;
  std::uint64_t next_sequence_ = 0;
  double now_ = 0.0;
};

}  // namespace teamsim::des
