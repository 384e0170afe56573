#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "teamsim/des/engine.hpp"
#include "teamsim/scenario.hpp"
#include "teamsim/sd/model.hpp"

namespace teamsim::hybrid {

// DES rates handed to the SD model, items/day.
struct FeedForward {
  double project_completion_rate = 0.0;
  double ops_completion_rate = 0.0;
  double rework_generation_rate = 0.0;
  double preemption_rate = 0.0;

  friend bool operator==(const FeedForward&, const FeedForward&) = default;
};

// Counts divided by horizon (per replication). Throws ConfigError unless
// horizon > 0.
FeedForward extract_feedforward(const des::DesStats& stats, double horizon);

// SD parameters for the next SD run:
//   completion time per chain := initial WIP / DES completion rate
//   base_error_frac           := DES rework rate / DES completion rate
//   s_base                    := base s_base * preemption rate / baseline
//                                preemption rate (cycle 0)
// Zero rates leave the corresponding base value untouched.
sd::SdParams calibrate(const sd::SdParams& base, const sd::SdState& initial,
                       const FeedForward& ff, const FeedForward& baseline);

struct SdSummary {
  double mean_fatigue = 0.0;
  double mean_mgmt_pressure = 0.0;
  double mean_error_frac = 0.0;
  double mean_stop_multiplier = 1.0;
  double final_error_frac = 0.0;
};

SdSummary summarize(const sd::SdTrajectory& traj);

// Time means over the whole trajectory become DES modifiers:
//   rework_multiplier = mean(error_frac) / base_error_frac
//   capacity_factor   = clamp(1 - k_capacity * mean(mgmt_pressure), 0.5, 1)
//   interrupt_rate    = i_base * max(0, mean(stop_rate / s_base) - 1)
// Throws ConfigError when base_error_frac is 0 but errors occur.
des::DesModifiers extract_feedback(const sd::SdTrajectory& traj,
                                   const sd::SdParams& params, double i_base);

// Largest relative change between corresponding modifier components.
double max_relative_change(const des::DesModifiers& a,
                           const des::DesModifiers& b);

struct CycleRecord {
  int cycle_index = 0;
  std::uint64_t seed = 0;
  des::DesModifiers modifiers_in;
  des::DesStats des_stats;
  des::EventLog event_log;
  FeedForward feed_forward;
  sd::SdParams sd_params;
  sd::SdTrajectory trajectory;
  SdSummary sd_summary;
  des::DesModifiers modifiers_out;
};

// Daily completion-time deltas of one cycle against cycle 0.
struct DifferenceSeries {
  std::array<std::vector<double>, des::kClassCount> by_class;
  std::array<std::vector<double>, kPriorityCount> by_priority;
};

struct HybridReport {
  std::vector<CycleRecord> cycles;
  std::vector<DifferenceSeries> differences;  // one per cycle
  bool converged = false;
};

DifferenceSeries difference(const des::DesStats& cycle,
                            const des::DesStats& baseline);

struct HybridOptions {
  bool keep_logs = true;
};

// Cycle 0 runs the DES with identity modifiers; each cycle then feeds DES
// rates into the SD model and SD means back into the next DES run, seeded
// with seed + cycle_index. Stops after cycles_max cycles or once the
// modifiers move by less than `tol` between consecutive cycles.
HybridReport run_hybrid(const Scenario& scenario, int cycles_max,
                        std::uint64_t seed, double tol,
                        HybridOptions options = {});

}  // namespace teamsim::hybrid
