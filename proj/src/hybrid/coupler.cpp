#include "teamsim/hybrid/coupler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "teamsim/errors.hpp"

namespace teamsim::hybrid {

namespace {

constexpr double kMinCapacityFactor = 0.5;

template <typename Fn>
auto with_cycle(int cycle, Fn&& fn) -> decltype(fn()) {
  auto tag = [cycle](const std::exception& e) {
    return fmt::format("cycle {}: {}", cycle, e.what());
  };
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(tag(e));
  } catch (const DataError& e) {
    throw DataError(tag(e));
  } catch (const IoError& e) {
    throw IoError(tag(e));
  } catch (const EngineError& e) {
    throw EngineError(tag(e));
  }
}

}  // namespace

FeedForward extract_feedforward(const des::DesStats& stats, double horizon) {
  if (!(horizon > 0.0)) {
    throw ConfigError(fmt::format("feed-forward horizon must be > 0, got {}",
                                  horizon));
  }
  const double exposure = horizon * std::max(1, stats.replications);
  std::int64_t project_done = 0;
  for (auto p : kAllPriorities) {
    project_done += stats.of(WorkType::ProjectTask, p).count_completed;
  }
  const auto& t = stats.totals;
  FeedForward ff;
  ff.project_completion_rate = static_cast<double>(project_done) / exposure;
  ff.ops_completion_rate =
      static_cast<double>(t.completed - project_done) / exposure;
  ff.rework_generation_rate =
      static_cast<double>(t.rework_incidents_generated) / exposure;
  ff.preemption_rate = static_cast<double>(t.preemption_count) / exposure;
  return ff;
}

sd::SdParams calibrate(const sd::SdParams& base, const sd::SdState& initial,
                       const FeedForward& ff, const FeedForward& baseline) {
  sd::SdParams p = base;
  if (ff.project_completion_rate > 0.0 && initial.project_wip > 0.0) {
    p.project_completion_time = initial.project_wip / ff.project_completion_rate;
  }
  if (ff.ops_completion_rate > 0.0 && initial.ops_wip > 0.0) {
    p.ops_completion_time = initial.ops_wip / ff.ops_completion_rate;
  }
  const double completions = ff.project_completion_rate + ff.ops_completion_rate;
  if (completions > 0.0) {
    p.base_error_frac =
        std::clamp(ff.rework_generation_rate / completions, 0.0, 0.95);
  }
  if (baseline.preemption_rate > 0.0) {
    p.s_base = base.s_base * ff.preemption_rate / baseline.preemption_rate;
  }
  return p;
}

SdSummary summarize(const sd::SdTrajectory& traj) {
  SdSummary s;
  if (traj.empty()) return s;
  // Means are taken about the first point so a constant series comes back
  // exactly; identity feedback then stays bit-exact.
  const auto& first = traj.points.front();
  double fatigue = 0.0, pressure = 0.0, error = 0.0, stop = 0.0;
  for (const auto& pt : traj.points) {
    fatigue += pt.state.fatigue - first.state.fatigue;
    pressure += pt.state.mgmt_pressure - first.state.mgmt_pressure;
    error += pt.aux.error_frac - first.aux.error_frac;
    stop += pt.aux.stop_multiplier - first.aux.stop_multiplier;
  }
  const auto n = static_cast<double>(traj.points.size());
  s.mean_fatigue = first.state.fatigue + fatigue / n;
  s.mean_mgmt_pressure = first.state.mgmt_pressure + pressure / n;
  s.mean_error_frac = first.aux.error_frac + error / n;
  s.mean_stop_multiplier = first.aux.stop_multiplier + stop / n;
  s.final_error_frac = traj.back().aux.error_frac;
  return s;
}

des::DesModifiers extract_feedback(const sd::SdTrajectory& traj,
                                   const sd::SdParams& params, double i_base) {
  if (traj.empty()) throw ConfigError("feedback needs a nonempty trajectory");
  const SdSummary s = summarize(traj);
  des::DesModifiers m;
  if (params.base_error_frac > 0.0) {
    m.rework_multiplier = s.mean_error_frac / params.base_error_frac;
  } else if (s.mean_error_frac > 0.0) {
    throw ConfigError(
        "base_error_frac is 0 but the trajectory has errors; rework "
        "multiplier is undefined");
  }
  m.capacity_factor = std::clamp(
      1.0 - params.k_capacity * s.mean_mgmt_pressure, kMinCapacityFactor, 1.0);
  m.interrupt_rate = i_base * std::max(0.0, s.mean_stop_multiplier - 1.0);
  return m;
}

double max_relative_change(const des::DesModifiers& a,
                           const des::DesModifiers& b) {
  auto rel = [](double x, double y) {
    const double scale = std::max(std::abs(x), std::abs(y));
    return scale > 0.0 ? std::abs(x - y) / scale : 0.0;
  };
  return std::max({rel(a.rework_multiplier, b.rework_multiplier),
                   rel(a.capacity_factor, b.capacity_factor),
                   rel(a.interrupt_rate, b.interrupt_rate)});
}

DifferenceSeries difference(const des::DesStats& cycle,
                            const des::DesStats& baseline) {
  auto diff = [](const std::vector<double>& x, const std::vector<double>& b) {
    std::vector<double> d(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      d[i] = x[i] - (i < b.size() ? b[i] : 0.0);
    }
    return d;
  };
  DifferenceSeries out;
  for (std::size_t c = 0; c < des::kClassCount; ++c) {
    out.by_class[c] = diff(cycle.by_class[c].daily_completion_days,
                           baseline.by_class[c].daily_completion_days);
  }
  for (std::size_t p = 0; p < kPriorityCount; ++p) {
    out.by_priority[p] = diff(cycle.by_priority[p].daily_completion_days,
                              baseline.by_priority[p].daily_completion_days);
  }
  return out;
}

HybridReport run_hybrid(const Scenario& scenario, int cycles_max,
                        std::uint64_t seed, double tol, HybridOptions options) {
  validate(scenario);
  if (cycles_max < 1) throw ConfigError("cycles_max must be >= 1");
  if (!(tol > 0.0)) throw ConfigError("tol must be > 0");

  HybridReport report;
  des::DesModifiers modifiers = des::DesModifiers::identity();
  des::DesOptions des_options;
  des_options.keep_log = options.keep_logs;

  for (int k = 0; k < cycles_max; ++k) {
    CycleRecord rec;
    rec.cycle_index = k;
    rec.seed = seed + static_cast<std::uint64_t>(k);
    rec.modifiers_in = modifiers;

    with_cycle(k, [&] {
      auto des_result = des::run_replications(scenario.des, modifiers, rec.seed,
                                              scenario.horizon,
                                              scenario.replications, des_options);
      rec.des_stats = std::move(des_result.stats);
      rec.event_log = std::move(des_result.log);
      rec.feed_forward = extract_feedforward(rec.des_stats, scenario.horizon);
      const FeedForward& baseline = report.cycles.empty()
                                        ? rec.feed_forward
                                        : report.cycles.front().feed_forward;
      rec.sd_params = calibrate(scenario.sd, scenario.sd_initial,
                                rec.feed_forward, baseline);
      rec.trajectory = sd::run_sd(scenario.sd_initial, rec.sd_params,
                                  scenario.horizon, scenario.sd_dt);
      rec.sd_summary = summarize(rec.trajectory);
      rec.modifiers_out = extract_feedback(rec.trajectory, rec.sd_params,
                                           scenario.des.knobs.i_base);
      return 0;
    });

    report.differences.push_back(
        report.cycles.empty()
            ? difference(rec.des_stats, rec.des_stats)
            : difference(rec.des_stats, report.cycles.front().des_stats));
    modifiers = rec.modifiers_out;
    const bool settled =
        !report.cycles.empty() &&
        max_relative_change(rec.modifiers_out,
                            report.cycles.back().modifiers_out) < tol;
    report.cycles.push_back(std::move(rec));
    if (settled) {
      report.converged = true;
      break;
    }
  }
  return report;
}

}  // namespace teamsim::hybrid
