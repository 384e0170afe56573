#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "teamsim/domain/types.hpp"

namespace teamsim::des {

inline constexpr std::size_t kClassCount = kWorkTypeCount * kPriorityCount;

constexpr std::size_t class_index(WorkType t, Priority p) {
  return index(t) * kPriorityCount + rank(p);
}

struct CompletionSample {
  double completed_at = 0.0;   // day of completion
  double duration = 0.0;       // completion - arrival, days
  double time_in_queue = 0.0;  // days
};

struct ClassStats {
  std::int64_t count_arrived = 0;
  std::int64_t count_completed = 0;
  std::int64_t in_queue_at_end = 0;
  std::int64_t in_service_at_end = 0;
  std::int64_t dead_lettered = 0;

  double mean_completion_days = 0.0;
  double median_completion_days = 0.0;
  double p90_completion_days = 0.0;
  double mean_time_in_queue_days = 0.0;

  // Raw samples, kept so replications merge exactly. Sorted by finalize().
  std::vector<CompletionSample> samples;

  // Mean completion duration of the items finished during each day
  // (index d covers (d-1, d]); carries the previous value forward on days
  // without completions. Values are quantized to 2^-20 days so that series
  // differences are exact in binary floating point.
  std::vector<double> daily_completion_days;
};

struct DesTotals {
  std::int64_t arrived = 0;
  std::int64_t completed = 0;
  std::int64_t stop_count = 0;
  std::int64_t reassignment_count = 0;
  std::int64_t rework_incidents_generated = 0;
  std::int64_t preemption_count = 0;
  std::int64_t interruption_count = 0;
  std::int64_t skill_stop_count = 0;
  std::int64_t dead_letter_count = 0;
};

// Queue lengths sampled at integer days 0..floor(horizon).
struct QueueSeries {
  std::vector<double> team;
  std::vector<std::vector<double>> individual;  // [engineer][day]
  std::array<std::vector<double>, kPriorityCount> waiting_by_priority;
  std::vector<double> in_system;
};

struct DesStats {
  double horizon = 0.0;
  int replications = 1;

  std::array<ClassStats, kClassCount> by_class;
  std::array<ClassStats, kPriorityCount> by_priority;
  DesTotals totals;

  // Per-day rates: count / (horizon * replications).
  double completions_per_day = 0.0;
  double project_completions_per_day = 0.0;
  double ops_completions_per_day = 0.0;
  double rework_incidents_per_day = 0.0;
  double preemptions_per_day = 0.0;
  double stops_per_day = 0.0;

  // Time averages over [0, horizon].
  double time_avg_in_system = 0.0;
  double time_avg_in_queue = 0.0;

  QueueSeries queues;

  ClassStats& of(WorkType t, Priority p) { return by_class[class_index(t, p)]; }
  const ClassStats& of(WorkType t, Priority p) const {
    return by_class[class_index(t, p)];
  }
  const ClassStats& of(Priority p) const { return by_priority[rank(p)]; }
};

// Number of daily points kept for a horizon: days 0..floor(horizon).
std::size_t day_count(double horizon);

// Rebuilds per-priority aggregates, summaries, rates and daily series from
// the raw samples and counters.
void finalize(DesStats& stats);

// Merges replications in index order. Counters and samples are pooled,
// time averages and queue series are averaged.
DesStats merge(std::span<const DesStats> replications);

}  // namespace teamsim::des
