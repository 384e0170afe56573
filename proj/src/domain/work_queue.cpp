#include "teamsim/domain/work_queue.hpp"

#include <string>

#include "teamsim/errors.hpp"

namespace teamsim {

void WorkQueue::push(WorkItem item, double now) {
  if (!ids_.insert(item.id).second) {
    throw EngineError("work item " + std::to_string(item.id) +
                      " pushed twice into the same queue");
  }
  item.queue_episodes.push_back(QueueEpisode{now, std::nullopt});
  ++by_priority_[rank(item.priority)];
  Key key{item.priority, item.arrival_time, item.id};
  items_.emplace(key, std::move(item));
}

WorkItem WorkQueue::take(const_iterator pos, double now) {
  auto node = items_.extract(pos);
  WorkItem item = std::move(node.mapped());
  ids_.erase(item.id);
  --by_priority_[rank(item.priority)];
  if (!item.queue_episodes.empty() && !item.queue_episodes.back().leave) {
    item.queue_episodes.back().leave = now;
  }
  return item;
}

std::optional<WorkItem> WorkQueue::pop_best(double now) {
  if (items_.empty()) return std::nullopt;
  return take(items_.begin(), now);
}

const WorkItem* WorkQueue::peek_best() const {
  return items_.empty() ? nullptr : &items_.begin()->second;
}

}  // namespace teamsim
