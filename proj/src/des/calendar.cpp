#include "teamsim/des/calendar.hpp"

#include <string>

#include "teamsim/errors.hpp"

namespace teamsim::des {

void EventCalendar::schedule(double time, EventKind kind, int target,
                             std::uint64_t token) {
  if (time < now_) {
    throw EngineError("event scheduled in the past at t=" +
                      std::to_string(time));
  }
  heap_.push(ScheduledEvent{time, next_sequence_++, kind, target, token});
}

ScheduledEvent EventCalendar::pop() {
  ScheduledEvent ev = heap_.top();
  heap_.pop();
  if (ev.time < now_) {
    throw EngineError("event calendar moved backwards");
  }
  now_ = ev.time;
  return ev;
}

}  // namespace teamsim::des
