#include "teamsim/des/config.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "teamsim/errors.hpp"

namespace teamsim::des {

namespace {

constexpr double kMixTolerance = 1e-9;

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool probability(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void validate(const DesConfig& config) {
  std::set<std::string> skills(config.skill_types.begin(),
                               config.skill_types.end());
  require(!skills.empty(), "at least one skill type must be declared");
  require(skills.size() == config.skill_types.size(),
          "skill types must be unique");
  require(!config.generators.empty(), "at least one generator is required");
  require(!config.engineers.empty(), "at least one engineer is required");

  require(config.skill_levels >= 1, "skill_levels must be >= 1");
  auto level_ok = [&](int level) {
    return level >= 1 && level <= config.skill_levels;
  };

  for (const auto& g : config.generators) {
    const std::string where = fmt::format("generator '{}'", g.name);
    require(g.work_type != WorkType::ReworkIncident,
            where + ": rework incidents come only from the error path");
    require(finite_nonneg(g.daily_rate), where + ": daily_rate must be >= 0");
    require(std::all_of(g.priority_mix.begin(), g.priority_mix.end(), probability),
            where + ": priority_mix entries must lie in [0, 1]");
    const double pm = std::accumulate(g.priority_mix.begin(), g.priority_mix.end(), 0.0);
    require(std::abs(pm - 1.0) <= kMixTolerance,
            where + fmt::format(": priority_mix sums to {}, not 1", pm));
    require(!g.skill_mix.empty(), where + ": skill_mix is empty");
    double sm = 0.0;
    for (const auto& sw : g.skill_mix) {
      require(skills.contains(sw.skill.skill_type),
              where + ": unknown skill type '" + sw.skill.skill_type + "'");
      require(level_ok(sw.skill.skill_level),
              where + ": skill level out of range");
      require(probability(sw.weight), where + ": skill weight must lie in [0, 1]");
      sm += sw.weight;
    }
    require(std::abs(sm - 1.0) <= kMixTolerance,
            where + fmt::format(": skill_mix sums to {}, not 1", sm));
    for (double h : g.service_mean_hours) {
      require(std::isfinite(h) && h > 0.0,
              where + ": service_mean_hours must be > 0");
    }
  }

  for (std::size_t i = 0; i < config.engineers.size(); ++i) {
    const auto& e = config.engineers[i];
    const std::string where = fmt::format("engineer {}", i);
    require(skills.contains(e.skill.skill_type),
            where + ": unknown skill type '" + e.skill.skill_type + "'");
    require(level_ok(e.skill.skill_level), where + ": skill level out of range");
    require(std::isfinite(e.capacity_factor) && e.capacity_factor > 0.0 &&
                e.capacity_factor <= 1.0,
            where + ": capacity_factor must lie in (0, 1]");
  }

  const auto& k = config.knobs;
  require(probability(k.base_error_prob), "base_error_prob must lie in [0, 1]");
  require(probability(k.p_stop_skill), "p_stop_skill must lie in [0, 1]");
  require(finite_nonneg(k.skill_gap_error_boost),
          "skill_gap_error_boost must be >= 0");
  require(finite_nonneg(k.switch_penalty_hours),
          "switch_penalty_hours must be >= 0");
  require(finite_nonneg(k.i_base), "i_base must be >= 0");
  require(k.assignment_depth >= 0, "assignment_depth must be >= 0");

  require(probability(config.rework.p1_probability),
          "rework p1_probability must lie in [0, 1]");
  for (double h : config.rework.service_mean_hours) {
    require(std::isfinite(h) && h > 0.0,
            "rework service_mean_hours must be > 0");
  }
}

void validate(const DesModifiers& m) {
  require(finite_nonneg(m.rework_multiplier), "rework_multiplier must be >= 0");
  require(std::isfinite(m.capacity_factor) && m.capacity_factor > 0.0 &&
              m.capacity_factor <= 1.0,
          "capacity_factor must lie in (0, 1]");
  require(finite_nonneg(m.interrupt_rate), "interrupt_rate must be >= 0");
}

}  // namespace teamsim::des
