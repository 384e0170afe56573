#pragma once

#include <array>
#include <string>
#include <vector>

#include "teamsim/domain/types.hpp"

namespace teamsim::des {

// How inter-arrival gaps are drawn for a generator's daily rate.
enum class ArrivalProcess {
  Exponential,     // Poisson process
  GeometricHourly  // Bernoulli trial per working hour slot
};

struct SkillWeight {
  SkillSpec skill;
  double weight = 0.0;
};

struct GeneratorConfig {
  std::string name;
  WorkType work_type = WorkType::Incident;
  double daily_rate = 0.0;  // 0 disables the generator
  std::array<double, kPriorityCount> priority_mix{0.0, 0.0, 1.0};
  std::vector<SkillWeight> skill_mix;
  std::array<double, kPriorityCount> service_mean_hours{8.0, 8.0, 8.0};
};

// Incidents emitted when completed work turns out defective.
struct ReworkConfig {
  double p1_probability = 0.3;  // remainder are P2
  std::array<double, kPriorityCount> service_mean_hours{3.0, 4.0, 4.0};
};

struct DesKnobs {
  double base_error_prob = 0.05;
  double p_stop_skill = 0.4;
  double skill_gap_error_boost = 2.0;
  double switch_penalty_hours = 0.5;
  // Management interruptions per day per engineer for one unit of
  // stop-rate excess in the SD model.
  double i_base = 0.5;
  // Maximum committed items (in service + individual queue) an engineer may
  // hold before new team-queue work waits. 0 means unlimited.
  int assignment_depth = 1;
  ArrivalProcess arrival_process = ArrivalProcess::Exponential;
};

struct DesConfig {
  std::vector<std::string> skill_types;
  int skill_levels = kDefaultSkillLevels;  // levels run 1..skill_levels
  std::vector<GeneratorConfig> generators;
  std::vector<Engineer> engineers;
  DesKnobs knobs;
  ReworkConfig rework;
};

// Feedback payload from the SD model.
struct DesModifiers {
  double rework_multiplier = 1.0;
  double capacity_factor = 1.0;
  double interrupt_rate = 0.0;  // per busy engineer per day

  static constexpr DesModifiers identity() { return {}; }
  bool is_identity() const {
    return rework_multiplier == 1.0 && capacity_factor == 1.0 &&
           interrupt_rate == 0.0;
  }
  friend bool operator==(const DesModifiers&, const DesModifiers&) = default;
};

// Throws ConfigError describing the first violation.
void validate(const DesConfig& config);
void validate(const DesModifiers& modifiers);

}  // namespace teamsim::des
