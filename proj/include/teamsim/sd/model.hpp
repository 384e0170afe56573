#pragma once

#include <vector>

namespace teamsim::sd {

// Stocks of the single-team stock-and-flow model. Work stocks are in
// work items; fatigue and management pressure are dimensionless.
struct SdState {
  double project_backlog = 0.0;
  double project_wip = 0.0;
  double project_completed = 0.0;
  double ops_backlog = 0.0;
  double ops_wip = 0.0;
  double ops_completed = 0.0;
  double rework_pool = 0.0;  // operational errors awaiting return as incidents
  double fatigue = 0.0;
  double mgmt_pressure = 0.0;

  friend bool operator==(const SdState&, const SdState&) = default;
};

struct SdParams {
  // Inflows, items/day.
  double project_arrivals = 0.0;
  double ops_arrivals = 0.0;

  // Nominal days an item spends in WIP at full productivity.
  double project_completion_time = 5.0;
  double ops_completion_time = 1.0;

  double team_capacity_hours = 32.0;  // work-hours/day
  double project_effort_hours = 8.0;  // average effort per item
  double ops_effort_hours = 3.5;
  double desired_backlog = 20.0;

  double fatigue_time = 10.0;     // tau_f, days
  double mgmt_delay = 7.0;        // tau_m, days
  double rework_delay = 5.0;      // rework_pool drain time constant, days

  double s_base = 0.05;           // share of WIP stopped per day, unstressed
  double base_error_frac = 0.05;  // [0, 1)
  double quality_target = 0.05;   // acceptable error fraction
  double target_cycle_time = 5.0; // days

  // Gains, all >= 0.
  double k_fatigue_error = 0.0;
  double k_fatigue_prod = 0.0;
  double k_pressure_stop = 0.0;
  double k_switch = 0.0;
  double k_capacity = 0.0;
  double k_assist = 0.0;  // constructive management help, offsets stopping
  double g_m = 0.0;       // management response to quality/timeliness gaps
};

// Throws ConfigError describing the first violation.
void validate(const SdParams& params);

struct Auxiliaries {
  double work_pressure = 0.0;
  double stop_multiplier = 1.0;  // stop_rate / s_base
  double stop_rate = 0.0;
  double productivity_factor = 1.0;
  double error_frac = 0.0;
  double project_completion_rate = 0.0;
  double ops_completion_rate = 0.0;
  double implied_cycle_time = 0.0;
  double timeliness_gap = 0.0;
  double quality_gap = 0.0;
};

Auxiliaries auxiliaries(const SdState& state, const SdParams& params);

// One explicit-Euler step. Outflows are scaled down where they would drain
// a stock below zero; the amount removed is added to `*clamped` when given.
// Throws ConfigError unless dt > 0.
SdState sd_step(const SdState& state, const SdParams& params, double dt,
                double* clamped = nullptr);

struct TrajectoryPoint {
  double time = 0.0;
  SdState state;
  Auxiliaries aux;
  double clamped_total = 0.0;  // cumulative flow removed by clamping
};

struct SdTrajectory {
  double dt = 0.0;
  std::vector<TrajectoryPoint> points;

  bool empty() const { return points.empty(); }
  const TrajectoryPoint& back() const { return points.back(); }
};

// Integrates ceil(horizon/dt) steps, recording the initial state and every
// step. Throws EngineError naming the first non-finite value.
SdTrajectory run_sd(const SdState& initial, const SdParams& params,
                    double horizon, double dt);

}  // namespace teamsim::sd
