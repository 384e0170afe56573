#include "teamsim/io/report.hpp"

#include <algorithm>
#include <type_traits>

#include <fmt/format.h>

#include "teamsim/errors.hpp"

namespace teamsim::io {

namespace {

template <typename C, typename F>
void visit_class(const std::string& prefix, C& c, F&& f) {
  f(prefix + ".count_arrived", c.count_arrived);
  f(prefix + ".count_completed", c.count_completed);
  f(prefix + ".in_queue_at_end", c.in_queue_at_end);
  f(prefix + ".in_service_at_end", c.in_service_at_end);
  f(prefix + ".dead_lettered", c.dead_lettered);
  f(prefix + ".mean_completion_days", c.mean_completion_days);
  f(prefix + ".median_completion_days", c.median_completion_days);
  f(prefix + ".p90_completion_days", c.p90_completion_days);
  f(prefix + ".mean_time_in_queue_days", c.mean_time_in_queue_days);
}

std::string class_key(WorkType t, Priority p) {
  return fmt::format("class.{}.{}", to_string(t), to_string(p));
}

// Every scalar field in export order. S is DesStats, possibly const.
template <typename S, typename F>
void visit_scalars(S& s, F&& f) {
  f(std::string("horizon"), s.horizon);
  f(std::string("replications"), s.replications);
  auto& t = s.totals;
  f(std::string("totals.arrived"), t.arrived);
  f(std::string("totals.completed"), t.completed);
  f(std::string("totals.stop_count"), t.stop_count);
  f(std::string("totals.reassignment_count"), t.reassignment_count);
  f(std::string("totals.preemption_count"), t.preemption_count);
  f(std::string("totals.interruption_count"), t.interruption_count);
  f(std::string("totals.skill_stop_count"), t.skill_stop_count);
  f(std::string("totals.dead_letter_count"), t.dead_letter_count);
  f(std::string("totals.rework_incidents_generated"), t.rework_incidents_generated);
  f(std::string("rates.completions_per_day"), s.completions_per_day);
  f(std::string("rates.project_completions_per_day"), s.project_completions_per_day);
  f(std::string("rates.ops_completions_per_day"), s.ops_completions_per_day);
  f(std::string("rates.rework_incidents_per_day"), s.rework_incidents_per_day);
  f(std::string("rates.preemptions_per_day"), s.preemptions_per_day);
  f(std::string("rates.stops_per_day"), s.stops_per_day);
  f(std::string("time_avg_in_system"), s.time_avg_in_system);
  f(std::string("time_avg_in_queue"), s.time_avg_in_queue);
  for (auto p : kAllPriorities) {
    visit_class(fmt::format("priority.{}", to_string(p)), s.by_priority[rank(p)], f);
  }
  for (auto t2 : kAllWorkTypes) {
    for (auto p : kAllPriorities) {
      visit_class(class_key(t2, p), s.by_class[des::class_index(t2, p)], f);
    }
  }
}

// Fixed-count series; per-engineer queues are handled separately.
template <typename S, typename F>
void visit_series(S& s, F&& f) {
  f(std::string("queue.team"), s.queues.team);
  f(std::string("queue.in_system"), s.queues.in_system);
  for (auto p : kAllPriorities) {
    f(fmt::format("queue.waiting.{}", to_string(p)),
      s.queues.waiting_by_priority[rank(p)]);
  }
  for (auto p : kAllPriorities) {
    f(fmt::format("daily_completion.{}", to_string(p)),
      s.by_priority[rank(p)].daily_completion_days);
  }
  for (auto t : kAllWorkTypes) {
    for (auto p : kAllPriorities) {
      f(fmt::format("daily_completion.{}.{}", to_string(t), to_string(p)),
        s.by_class[des::class_index(t, p)].daily_completion_days);
    }
  }
}

Json number(double v) { return round6(v); }

Json series_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(round6(x));
  return a;
}

std::string scalar_text(double v) { return num(v); }
std::string scalar_text(std::int64_t v) { return std::to_string(v); }
std::string scalar_text(int v) { return std::to_string(v); }

double at(const std::vector<double>& v, std::size_t i) {
  return i < v.size() ? v[i] : 0.0;
}

Json sd_state_out(const sd::SdState& s) {
  return {{"project_backlog", number(s.project_backlog)},
          {"project_wip", number(s.project_wip)},
          {"project_completed", number(s.project_completed)},
          {"ops_backlog", number(s.ops_backlog)},
          {"ops_wip", number(s.ops_wip)},
          {"ops_completed", number(s.ops_completed)},
          {"rework_pool", number(s.rework_pool)},
          {"fatigue", number(s.fatigue)},
          {"mgmt_pressure", number(s.mgmt_pressure)}};
}

void write_log(const des::EventLog& log, const std::filesystem::path& path) {
  write_file(path, log.str());
}

}  // namespace

Json des_stats_json(const des::DesStats& stats) {
  Json out = Json::object();
  visit_scalars(stats, [&](const std::string& key, const auto& v) {
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
      out[key] = number(v);
    } else {
      out[key] = v;
    }
  });
  visit_series(stats, [&](const std::string& key, const std::vector<double>& v) {
    out[key] = series_json(v);
  });
  for (std::size_t e = 0; e < stats.queues.individual.size(); ++e) {
    out[fmt::format("queue.engineer.{}", e)] = series_json(stats.queues.individual[e]);
  }
  return out;
}

des::DesStats des_stats_from_json(const Json& flat) {
  if (!flat.is_object()) throw ConfigError("DES stats document must be an object");
  des::DesStats s;
  auto need = [&](const std::string& key) -> const Json& {
    auto it = flat.find(key);
    if (it == flat.end()) throw ConfigError(fmt::format("DES stats lack '{}'", key));
    return *it;
  };
  visit_scalars(s, [&](const std::string& key, auto& v) {
    const Json& j = need(key);
    using T = std::decay_t<decltype(v)>;
    if constexpr (std::is_floating_point_v<T>) {
      if (!j.is_number()) throw ConfigError(fmt::format("'{}' must be a number", key));
    } else {
      if (!j.is_number_integer()) {
        throw ConfigError(fmt::format("'{}' must be an integer", key));
      }
    }
    v = j.get<T>();
  });
  auto read_series = [&](const std::string& key, std::vector<double>& v) {
    const Json& j = need(key);
    if (!j.is_array()) throw ConfigError(fmt::format("'{}' must be an array", key));
    v.clear();
    for (const auto& x : j) {
      if (!x.is_number()) throw ConfigError(fmt::format("'{}' holds a non-number", key));
      v.push_back(x.get<double>());
    }
  };
  visit_series(s, read_series);
  for (std::size_t e = 0;; ++e) {
    const auto key = fmt::format("queue.engineer.{}", e);
    if (!flat.contains(key)) break;
    s.queues.individual.emplace_back();
    read_series(key, s.queues.individual.back());
  }
  return s;
}

std::string des_stats_csv(const des::DesStats& stats) {
  std::string out = "key,value\n";
  visit_scalars(stats, [&](const std::string& key, const auto& v) {
    out += key + "," + scalar_text(v) + "\n";
  });
  return out;
}

std::string queues_csv(const des::DesStats& stats) {
  const auto& q = stats.queues;
  std::string out = "day,team,waiting_P1,waiting_P2,waiting_P3,in_system";
  for (std::size_t e = 0; e < q.individual.size(); ++e) {
    out += fmt::format(",engineer_{}", e);
  }
  out += '\n';
  for (std::size_t d = 0; d < q.team.size(); ++d) {
    out += fmt::format("{},{},{},{},{},{}", d, num(q.team[d]),
                       num(at(q.waiting_by_priority[0], d)),
                       num(at(q.waiting_by_priority[1], d)),
                       num(at(q.waiting_by_priority[2], d)), num(at(q.in_system, d)));
    for (const auto& ind : q.individual) out += "," + num(at(ind, d));
    out += '\n';
  }
  return out;
}

std::string daily_completion_csv(const des::DesStats& stats) {
  std::string out = "day,P1,P2,P3";
  for (auto t : kAllWorkTypes) {
    for (auto p : kAllPriorities) {
      out += fmt::format(",{}.{}", to_string(t), to_string(p));
    }
  }
  out += '\n';
  const std::size_t days = stats.by_priority[0].daily_completion_days.size();
  for (std::size_t d = 0; d < days; ++d) {
    out += std::to_string(d);
    for (const auto& c : stats.by_priority) out += "," + num(at(c.daily_completion_days, d));
    for (const auto& c : stats.by_class) out += "," + num(at(c.daily_completion_days, d));
    out += '\n';
  }
  return out;
}

void emit_des(const des::DesStats& stats, const des::EventLog* log,
              std::uint64_t seed, OutputFormat format,
              const std::filesystem::path& dir) {
  ensure_dir(dir);
  if (format == OutputFormat::Json) {
    write_file(dir / "stats.json", des_stats_json(stats).dump(2) + "\n");
  } else {
    write_file(dir / "stats.csv", des_stats_csv(stats));
    write_file(dir / "queues.csv", queues_csv(stats));
    write_file(dir / "daily_completion.csv", daily_completion_csv(stats));
  }
  if (log) write_log(*log, dir / fmt::format("eventlog_seed{}.ndjson", seed));
}

std::vector<std::string> trajectory_columns() {
  return {"time",
          "project_backlog", "project_wip", "project_completed",
          "ops_backlog", "ops_wip", "ops_completed", "rework_pool",
          "fatigue", "mgmt_pressure",
          "work_pressure", "stop_multiplier", "stop_rate", "productivity_factor",
          "error_frac", "project_completion_rate", "ops_completion_rate",
          "implied_cycle_time", "timeliness_gap", "quality_gap",
          "clamped_total"};
}

namespace {

std::vector<double> trajectory_row(const sd::TrajectoryPoint& pt) {
  const auto& s = pt.state;
  const auto& a = pt.aux;
  return {pt.time,
          s.project_backlog, s.project_wip, s.project_completed,
          s.ops_backlog, s.ops_wip, s.ops_completed, s.rework_pool,
          s.fatigue, s.mgmt_pressure,
          a.work_pressure, a.stop_multiplier, a.stop_rate, a.productivity_factor,
          a.error_frac, a.project_completion_rate, a.ops_completion_rate,
          a.implied_cycle_time, a.timeliness_gap, a.quality_gap,
          pt.clamped_total};
}

}  // namespace

std::string trajectory_csv(const sd::SdTrajectory& traj) {
  std::string out;
  const auto cols = trajectory_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const auto& pt : traj.points) {
    const auto row = trajectory_row(pt);
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + num(row[i]);
    out += '\n';
  }
  return out;
}

Json trajectory_json(const sd::SdTrajectory& traj) {
  const auto cols = trajectory_columns();
  std::vector<std::vector<double>> series(cols.size());
  for (const auto& pt : traj.points) {
    const auto row = trajectory_row(pt);
    for (std::size_t i = 0; i < row.size(); ++i) series[i].push_back(row[i]);
  }
  Json s = Json::object();
  for (std::size_t i = 0; i < cols.size(); ++i) s[cols[i]] = series_json(series[i]);
  return {{"dt", number(traj.dt)}, {"series", s}};
}

void emit_sd(const sd::SdTrajectory& traj, OutputFormat format,
             const std::filesystem::path& dir) {
  ensure_dir(dir);
  if (format == OutputFormat::Json) {
    write_file(dir / "trajectory.json", trajectory_json(traj).dump(2) + "\n");
  } else {
    write_file(dir / "trajectory.csv", trajectory_csv(traj));
  }
}

Json modifiers_json(const des::DesModifiers& m) {
  return {{"rework_multiplier", number(m.rework_multiplier)},
          {"capacity_factor", number(m.capacity_factor)},
          {"interrupt_rate", number(m.interrupt_rate)}};
}

Json hybrid_json(const hybrid::HybridReport& report) {
  Json cycles = Json::array();
  for (const auto& c : report.cycles) {
    const auto& ff = c.feed_forward;
    const auto& sm = c.sd_summary;
    Json params = Json::object();
    const Json raw_params = to_json(c.sd_params);
    for (const auto& [k, v] : raw_params.items()) {
      params[k] = number(v.get<double>());
    }
    cycles.push_back(
        {{"cycle_index", c.cycle_index},
         {"seed", c.seed},
         {"modifiers_in", modifiers_json(c.modifiers_in)},
         {"feed_forward",
          {{"project_completion_rate", number(ff.project_completion_rate)},
           {"ops_completion_rate", number(ff.ops_completion_rate)},
           {"rework_generation_rate", number(ff.rework_generation_rate)},
           {"preemption_rate", number(ff.preemption_rate)}}},
         {"sd_params", params},
         {"sd_summary",
          {{"mean_fatigue", number(sm.mean_fatigue)},
           {"mean_mgmt_pressure", number(sm.mean_mgmt_pressure)},
           {"mean_error_frac", number(sm.mean_error_frac)},
           {"mean_stop_multiplier", number(sm.mean_stop_multiplier)},
           {"final_error_frac", number(sm.final_error_frac)}}},
         {"sd_final", c.trajectory.empty() ? Json(nullptr)
                                           : sd_state_out(c.trajectory.back().state)},
         {"modifiers_out", modifiers_json(c.modifiers_out)},
         {"des", des_stats_json(c.des_stats)}});
  }
  return {{"converged", report.converged},
          {"cycle_count", report.cycles.size()},
          {"cycles", cycles}};
}

std::string hybrid_cycles_csv(const hybrid::HybridReport& report) {
  std::string out =
      "cycle,seed,rework_multiplier_in,capacity_factor_in,interrupt_rate_in,"
      "stop_count,reassignment_count,preemption_count,rework_incidents_per_day,"
      "mean_completion_P1,mean_completion_P2,mean_completion_P3,completed_P3,"
      "mean_fatigue,mean_mgmt_pressure,rework_multiplier_out,capacity_factor_out,"
      "interrupt_rate_out\n";
  for (const auto& c : report.cycles) {
    const auto& s = c.des_stats;
    out += fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", c.cycle_index,
        c.seed, num(c.modifiers_in.rework_multiplier),
        num(c.modifiers_in.capacity_factor), num(c.modifiers_in.interrupt_rate),
        s.totals.stop_count, s.totals.reassignment_count, s.totals.preemption_count,
        num(s.rework_incidents_per_day), num(s.of(Priority::P1).mean_completion_days),
        num(s.of(Priority::P2).mean_completion_days),
        num(s.of(Priority::P3).mean_completion_days),
        s.of(Priority::P3).count_completed, num(c.sd_summary.mean_fatigue),
        num(c.sd_summary.mean_mgmt_pressure), num(c.modifiers_out.rework_multiplier),
        num(c.modifiers_out.capacity_factor), num(c.modifiers_out.interrupt_rate));
  }
  return out;
}

std::string difference_csv(const std::vector<double>& series) {
  std::string out = "day,delta_days\n";
  for (std::size_t d = 0; d < series.size(); ++d) {
    out += fmt::format("{},{}\n", d, num(series[d]));
  }
  return out;
}

void emit_hybrid(const hybrid::HybridReport& report, OutputFormat format,
                 const std::filesystem::path& dir) {
  ensure_dir(dir);
  write_file(dir / "cycles.json", hybrid_json(report).dump(2) + "\n");
  if (format == OutputFormat::Csv) {
    write_file(dir / "cycles.csv", hybrid_cycles_csv(report));
  }
  for (std::size_t k = 0; k < report.differences.size(); ++k) {
    for (auto p : kAllPriorities) {
      write_file(dir / fmt::format("diff_p{}_cycle{}.csv", rank(p) + 1, k),
                 difference_csv(report.differences[k].by_priority[rank(p)]));
    }
  }
  if (!report.differences.empty()) {
    for (auto p : kAllPriorities) {
      write_file(dir / fmt::format("diff_p{}.csv", rank(p) + 1),
                 difference_csv(report.differences.back().by_priority[rank(p)]));
    }
  }
  for (const auto& c : report.cycles) {
    if (c.event_log.size() == 0) continue;
    write_log(c.event_log, dir / fmt::format("eventlog_cycle{}.ndjson", c.cycle_index));
  }
}

Json ingest_json(const IngestResult& r) {
  Json fits = Json::array();
  for (const auto& f : r.fits) {
    Json j = {{"work_type", to_string(f.work_type)},
              {"priority", to_string(f.priority)},
              {"records", f.records},
              {"zero_gaps", f.zero_gaps}};
    if (f.arrival) {
      j["arrival_rate_per_day"] = number(f.arrival->rate);
      j["arrival_gaps"] = f.arrival->n;
      j["arrival_ks"] = number(f.arrival->ks_distance);
    } else {
      j["arrival_rate_per_day"] = nullptr;
    }
    if (f.service) {
      j["service_mean_hours"] = number(f.service_mean_hours);
      j["service_samples"] = f.service->n;
      j["service_ks"] = number(f.service->ks_distance);
    } else {
      j["service_mean_hours"] = nullptr;
    }
    fits.push_back(j);
  }
  Json mix = Json::object();
  for (const auto& [t, m] : r.priority_mix) {
    mix[std::string(to_string(t))] = {number(m[0]), number(m[1]), number(m[2])};
  }
  Json errors = Json::array();
  for (const auto& e : r.errors) errors.push_back({{"line", e.line}, {"message", e.message}});
  return {{"rows", r.rows},
          {"records", r.records.size()},
          {"fits", fits},
          {"priority_mix", mix},
          {"errors", errors},
          {"warnings", r.warnings}};
}

std::string ingest_csv(const IngestResult& r) {
  std::string out =
      "work_type,priority,records,zero_gaps,arrival_rate_per_day,arrival_ks,"
      "service_mean_hours,service_ks\n";
  for (const auto& f : r.fits) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", to_string(f.work_type),
                       to_string(f.priority), f.records, f.zero_gaps,
                       f.arrival ? num(f.arrival->rate) : "",
                       f.arrival ? num(f.arrival->ks_distance) : "",
                       f.service ? num(f.service_mean_hours) : "",
                       f.service ? num(f.service->ks_distance) : "");
  }
  return out;
}

}  // namespace teamsim::io
