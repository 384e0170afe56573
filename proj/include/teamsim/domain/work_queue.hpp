#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <tuple>
#include <unordered_set>

#include "teamsim/domain/types.hpp"

namespace teamsim {

// Priority-then-FIFO queue of work items. Ordering: priority (P1 first),
// then earliest arrival_time, then lowest id. Pushing opens a queue episode
// on the item and popping closes it, so items carry their own waiting
// history wherever they travel.
class WorkQueue {
 public:
  struct Key {
    Priority priority;
    double arrival_time;
    ItemId id;

    friend bool operator<(const Key& a, const Key& b) {
      return std::tie(a.priority, a.arrival_time, a.id) <
             std::tie(b.priority, b.arrival_time, b.id);
    }
  };

  using Storage = std::map<Key, WorkItem>;
  using const_iterator = Storage::const_iterator;

  // Throws EngineError if an item with the same id is already queued.
  void push(WorkItem item, double now);

  std::optional<WorkItem> pop_best(double now);

  // Removes the entry at `pos`; returns it with its episode closed.
  WorkItem take(const_iterator pos, double now);

  const WorkItem* peek_best() const;

  bool contains(ItemId id) const { return ids_.contains(id); }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::size_t count(Priority p) const { return by_priority_[rank(p)]; }

  const_iterator begin() const { return items_.begin(); }
  const_iterator end() const { return items_.end(); }

 private:
  Storage items_;
  std::unordered_set<ItemId> ids_;
  std::array<std::size_t, kPriorityCount> by_priority_{};
};

}  // namespace teamsim
