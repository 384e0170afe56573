#include "teamsim/sd/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "teamsim/errors.hpp"

namespace teamsim::sd {

namespace {

constexpr double kEpsilon = 1e-9;
constexpr double kMinProductivity = 0.1;
constexpr double kMaxErrorFrac = 0.95;

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

// Scale applied to a stock's outflows so one step cannot overdraw it.
double drain_scale(double stock, double outflow, double dt) {
  const double demand = outflow * dt;
  return demand > stock && demand > 0.0 ? stock / demand : 1.0;
}

}  // namespace

void validate(const SdParams& p) {
  require(nonneg(p.project_arrivals) && nonneg(p.ops_arrivals),
          "SD arrivals must be >= 0");
  require(positive(p.project_completion_time) && positive(p.ops_completion_time),
          "SD completion times must be > 0");
  require(nonneg(p.team_capacity_hours), "team_capacity_hours must be >= 0");
  require(positive(p.project_effort_hours) && positive(p.ops_effort_hours),
          "effort hours must be > 0");
  require(positive(p.desired_backlog), "desired_backlog must be > 0");
  require(positive(p.fatigue_time) && positive(p.mgmt_delay) &&
              positive(p.rework_delay),
          "SD time constants must be > 0");
  require(nonneg(p.s_base), "s_base must be >= 0");
  require(std::isfinite(p.base_error_frac) && p.base_error_frac >= 0.0 &&
              p.base_error_frac < 1.0,
          "base_error_frac must lie in [0, 1)");
  require(positive(p.quality_target) && positive(p.target_cycle_time),
          "quality and timeliness targets must be > 0");
  for (double g : {p.k_fatigue_error, p.k_fatigue_prod, p.k_pressure_stop,
                   p.k_switch, p.k_capacity, p.k_assist, p.g_m}) {
    require(nonneg(g), "SD gains must be >= 0");
  }
}

Auxiliaries auxiliaries(const SdState& s, const SdParams& p) {
  Auxiliaries a;
  a.work_pressure = (s.project_backlog + s.ops_backlog) / p.desired_backlog;
  a.stop_multiplier = std::max(
      0.0, 1.0 + (p.k_pressure_stop - p.k_assist) * s.mgmt_pressure);
  a.stop_rate = p.s_base * a.stop_multiplier;
  const double switching = std::max(0.0, 1.0 - p.k_switch * a.stop_rate);
  const double tiredness = std::max(0.0, 1.0 - p.k_fatigue_prod * s.fatigue);
  a.productivity_factor = std::max(kMinProductivity, switching * tiredness);
  a.error_frac = std::min(
      kMaxErrorFrac, p.base_error_frac * (1.0 + p.k_fatigue_error * s.fatigue));
  a.project_completion_rate =
      s.project_wip / p.project_completion_time * a.productivity_factor;
  a.ops_completion_rate =
      s.ops_wip / p.ops_completion_time * a.productivity_factor;

  const double outstanding =
      s.project_backlog + s.project_wip + s.ops_backlog + s.ops_wip;
  const double throughput = a.project_completion_rate + a.ops_completion_rate;
  a.implied_cycle_time = outstanding / std::max(kEpsilon, throughput);
  a.timeliness_gap =
      std::max(0.0, a.implied_cycle_time / p.target_cycle_time - 1.0);
  a.quality_gap =
      std::max(0.0, a.error_frac - p.quality_target) / p.quality_target;
  return a;
}

SdState sd_step(const SdState& s, const SdParams& p, double dt,
                double* clamped) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError(fmt::format("SD step dt must be > 0, got {}", dt));
  }
  const Auxiliaries a = auxiliaries(s, p);

  // Team capacity is split between the chains in proportion to backlog.
  const double backlog = s.project_backlog + s.ops_backlog;
  const double project_share = backlog > 0.0 ? s.project_backlog / backlog : 0.5;
  const double effective_hours = p.team_capacity_hours * a.productivity_factor;
  const double project_pickup =
      std::min(s.project_backlog / dt,
               project_share * effective_hours / p.project_effort_hours);
  const double ops_pickup =
      std::min(s.ops_backlog / dt,
               (1.0 - project_share) * effective_hours / p.ops_effort_hours);

  double project_completion = a.project_completion_rate;
  double project_stopped = a.stop_rate * s.project_wip;
  double ops_completion = a.ops_completion_rate;
  double ops_stopped = a.stop_rate * s.ops_wip;
  double rework_drain = s.rework_pool / p.rework_delay;

  double removed = 0.0;
  auto clamp_outflows = [&](double stock, std::initializer_list<double*> flows) {
    double total = 0.0;
    for (double* f : flows) total += *f;
    const double k = drain_scale(stock, total, dt);
    if (k < 1.0) {
      removed += total * (1.0 - k) * dt;
      for (double* f : flows) *f *= k;
    }
  };
  clamp_outflows(s.project_wip, {&project_completion, &project_stopped});
  clamp_outflows(s.ops_wip, {&ops_completion, &ops_stopped});
  clamp_outflows(s.rework_pool, {&rework_drain});
  if (clamped) *clamped += removed;

  const double project_errors = a.error_frac * project_completion;
  const double ops_errors = a.error_frac * ops_completion;

  SdState n = s;
  n.project_backlog += (p.project_arrivals + project_stopped + project_errors -
                        project_pickup) * dt;
  n.project_wip += (project_pickup - project_completion - project_stopped) * dt;
  n.project_completed += (project_completion - project_errors) * dt;

  n.ops_backlog +=
      (p.ops_arrivals + ops_stopped + rework_drain - ops_pickup) * dt;
  n.ops_wip += (ops_pickup - ops_completion - ops_stopped) * dt;
  n.ops_completed += (ops_completion - ops_errors) * dt;
  n.rework_pool += (ops_errors - rework_drain) * dt;

  n.fatigue += dt * (std::max(0.0, a.work_pressure - 1.0) - s.fatigue) /
               p.fatigue_time;
  n.mgmt_pressure +=
      dt * (p.g_m * (a.quality_gap + a.timeliness_gap) - s.mgmt_pressure) /
      p.mgmt_delay;

  // Rounding can leave -1e-17 where a stock was drained exactly.
  for (double* v : {&n.project_backlog, &n.project_wip, &n.ops_backlog,
                    &n.ops_wip, &n.rework_pool, &n.fatigue, &n.mgmt_pressure}) {
    *v = std::max(0.0, *v);
  }
  return n;
}

namespace {

void check_finite(const TrajectoryPoint& pt) {
  const std::pair<const char*, double> values[] = {
      {"work_pressure", pt.aux.work_pressure},
      {"stop_rate", pt.aux.stop_rate},
      {"productivity_factor", pt.aux.productivity_factor},
      {"error_frac", pt.aux.error_frac},
      {"project_completion_rate", pt.aux.project_completion_rate},
      {"ops_completion_rate", pt.aux.ops_completion_rate},
      {"implied_cycle_time", pt.aux.implied_cycle_time},
      {"timeliness_gap", pt.aux.timeliness_gap},
      {"quality_gap", pt.aux.quality_gap},
      {"project_backlog", pt.state.project_backlog},
      {"project_wip", pt.state.project_wip},
      {"project_completed", pt.state.project_completed},
      {"ops_backlog", pt.state.ops_backlog},
      {"ops_wip", pt.state.ops_wip},
      {"ops_completed", pt.state.ops_completed},
      {"rework_pool", pt.state.rework_pool},
      {"fatigue", pt.state.fatigue},
      {"mgmt_pressure", pt.state.mgmt_pressure},
  };
  for (const auto& [name, v] : values) {
    if (!std::isfinite(v)) {
      throw EngineError(
          fmt::format("SD produced non-finite {} at t={:.6f}", name, pt.time));
    }
  }
}

}  // namespace

SdTrajectory run_sd(const SdState& initial, const SdParams& params,
                    double horizon, double dt) {
  validate(params);
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigError(fmt::format("SD horizon must be > 0, got {}", horizon));
  }
  if (!(dt > 0.0) || dt > horizon) {
    throw ConfigError(fmt::format("SD dt must lie in (0, horizon], got {}", dt));
  }
  // Tolerate horizons that are an exact multiple of dt up to rounding.
  const auto steps =
      static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));

  SdTrajectory traj;
  traj.dt = dt;
  traj.points.reserve(steps + 1);
  TrajectoryPoint pt{0.0, initial, auxiliaries(initial, params), 0.0};
  check_finite(pt);
  traj.points.push_back(pt);

  double clamped = 0.0;
  SdState state = initial;
  for (std::size_t k = 1; k <= steps; ++k) {
    state = sd_step(state, params, dt, &clamped);
    pt = TrajectoryPoint{static_cast<double>(k) * dt, state,
                         auxiliaries(state, params), clamped};
    check_finite(pt);
    traj.points.push_back(pt);
  }
  return traj;
}

}  // namespace teamsim::sd
