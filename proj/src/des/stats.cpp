#include "teamsim/des/stats.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace teamsim::des {

namespace {

constexpr double kSeriesQuantum = 0x1.0p-20;

double quantize(double v) { return std::round(v / kSeriesQuantum) * kSeriesQuantum; }

// Linear interpolation between closest ranks.
double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

void summarize(ClassStats& cls, std::size_t days) {
  std::sort(cls.samples.begin(), cls.samples.end(),
            [](const CompletionSample& a, const CompletionSample& b) {
              return std::tie(a.completed_at, a.duration, a.time_in_queue) <
                     std::tie(b.completed_at, b.duration, b.time_in_queue);
            });

  std::vector<double> durations;
  durations.reserve(cls.samples.size());
  double sum = 0.0;
  double queue_sum = 0.0;
  for (const auto& s : cls.samples) {
    durations.push_back(s.duration);
    sum += s.duration;
    queue_sum += s.time_in_queue;
  }
  const auto n = static_cast<double>(cls.samples.size());
  cls.mean_completion_days = cls.samples.empty() ? 0.0 : sum / n;
  cls.mean_time_in_queue_days = cls.samples.empty() ? 0.0 : queue_sum / n;
  std::sort(durations.begin(), durations.end());
  cls.median_completion_days = percentile(durations, 0.5);
  cls.p90_completion_days = percentile(durations, 0.9);

  cls.daily_completion_days.assign(days, 0.0);
  std::size_t next = 0;
  double carried = 0.0;
  for (std::size_t d = 0; d < days; ++d) {
    double day_sum = 0.0;
    std::size_t day_n = 0;
    while (next < cls.samples.size() &&
           cls.samples[next].completed_at <= static_cast<double>(d)) {
      day_sum += cls.samples[next].duration;
      ++day_n;
      ++next;
    }
    if (day_n > 0) carried = quantize(day_sum / static_cast<double>(day_n));
    cls.daily_completion_days[d] = carried;
  }
}

}  // namespace

std::size_t day_count(double horizon) {
  return horizon > 0.0 ? static_cast<std::size_t>(std::floor(horizon)) + 1 : 0;
}

void finalize(DesStats& stats) {
  const std::size_t days = day_count(stats.horizon);

  for (auto& agg : stats.by_priority) agg = ClassStats{};
  for (auto t : kAllWorkTypes) {
    for (auto p : kAllPriorities) {
      const auto& cls = stats.of(t, p);
      auto& agg = stats.by_priority[rank(p)];
      agg.count_arrived += cls.count_arrived;
      agg.count_completed += cls.count_completed;
      agg.in_queue_at_end += cls.in_queue_at_end;
      agg.in_service_at_end += cls.in_service_at_end;
      agg.dead_lettered += cls.dead_lettered;
      agg.samples.insert(agg.samples.end(), cls.samples.begin(),
                         cls.samples.end());
    }
  }
  for (auto& cls : stats.by_class) summarize(cls, days);
  for (auto& cls : stats.by_priority) summarize(cls, days);

  std::int64_t project_done = 0;
  for (auto p : kAllPriorities) {
    project_done += stats.of(WorkType::ProjectTask, p).count_completed;
  }

  const double exposure =
      stats.horizon > 0.0 ? stats.horizon * stats.replications : 0.0;
  auto rate = [&](std::int64_t count) {
    return exposure > 0.0 ? static_cast<double>(count) / exposure : 0.0;
  };
  const auto& t = stats.totals;
  stats.completions_per_day = rate(t.completed);
  stats.project_completions_per_day = rate(project_done);
  stats.ops_completions_per_day = rate(t.completed - project_done);
  stats.rework_incidents_per_day = rate(t.rework_incidents_generated);
  stats.preemptions_per_day = rate(t.preemption_count);
  stats.stops_per_day = rate(t.stop_count);
}

DesStats merge(std::span<const DesStats> replications) {
  DesStats out;
  if (replications.empty()) return out;
  out.horizon = replications.front().horizon;
  out.replications = 0;

  const std::size_t engineers = replications.front().queues.individual.size();
  const std::size_t days = day_count(out.horizon);
  auto& q = out.queues;
  q.team.assign(days, 0.0);
  q.in_system.assign(days, 0.0);
  q.individual.assign(engineers, std::vector<double>(days, 0.0));
  for (auto& w : q.waiting_by_priority) w.assign(days, 0.0);

  auto add_series = [](std::vector<double>& into, const std::vector<double>& v) {
    for (std::size_t i = 0; i < into.size() && i < v.size(); ++i) into[i] += v[i];
  };

  for (const auto& r : replications) {
    out.replications += r.replications;
    for (std::size_t c = 0; c < kClassCount; ++c) {
      auto& dst = out.by_class[c];
      const auto& src = r.by_class[c];
      dst.count_arrived += src.count_arrived;
      dst.count_completed += src.count_completed;
      dst.in_queue_at_end += src.in_queue_at_end;
      dst.in_service_at_end += src.in_service_at_end;
      dst.dead_lettered += src.dead_lettered;
      dst.samples.insert(dst.samples.end(), src.samples.begin(),
                         src.samples.end());
    }
    auto& t = out.totals;
    const auto& s = r.totals;
    t.arrived += s.arrived;
    t.completed += s.completed;
    t.stop_count += s.stop_count;
    t.reassignment_count += s.reassignment_count;
    t.rework_incidents_generated += s.rework_incidents_generated;
    t.preemption_count += s.preemption_count;
    t.interruption_count += s.interruption_count;
    t.skill_stop_count += s.skill_stop_count;
    t.dead_letter_count += s.dead_letter_count;

    out.time_avg_in_system += r.time_avg_in_system;
    out.time_avg_in_queue += r.time_avg_in_queue;
    add_series(q.team, r.queues.team);
    add_series(q.in_system, r.queues.in_system);
    for (std::size_t e = 0; e < engineers && e < r.queues.individual.size(); ++e) {
      add_series(q.individual[e], r.queues.individual[e]);
    }
    for (std::size_t p = 0; p < kPriorityCount; ++p) {
      add_series(q.waiting_by_priority[p], r.queues.waiting_by_priority[p]);
    }
  }

  const auto n = static_cast<double>(replications.size());
  out.time_avg_in_system /= n;
  out.time_avg_in_queue /= n;
  auto scale = [n](std::vector<double>& v) {
    for (auto& x : v) x /= n;
  };
  scale(q.team);
  scale(q.in_system);
  for (auto& v : q.individual) scale(v);
  for (auto& v : q.waiting_by_priority) scale(v);

  finalize(out);
  return out;
}

}  // namespace teamsim::des
