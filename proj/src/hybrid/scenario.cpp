#include "teamsim/scenario.hpp"

#include <cmath>

#include "teamsim/errors.hpp"

namespace teamsim {

void validate(const Scenario& s) {
  des::validate(s.des);
  sd::validate(s.sd);
  if (!(s.horizon > 0.0) || !std::isfinite(s.horizon)) {
    throw ConfigError("horizon must be > 0");
  }
  if (!(s.sd_dt > 0.0) || s.sd_dt > s.horizon) {
    throw ConfigError("sd dt must lie in (0, horizon]");
  }
  if (s.replications < 1) throw ConfigError("replications must be >= 1");
  if (s.cycles_max < 1) throw ConfigError("cycles_max must be >= 1");
  if (!(s.tol > 0.0)) throw ConfigError("tol must be > 0");
  const auto& i = s.sd_initial;
  for (double v : {i.project_backlog, i.project_wip, i.project_completed,
                   i.ops_backlog, i.ops_wip, i.ops_completed, i.rework_pool,
                   i.fatigue, i.mgmt_pressure}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("initial SD stocks must be finite and >= 0");
    }
  }
}

Scenario default_scenario() {
  using des::GeneratorConfig;
  using des::SkillWeight;

  Scenario s;
  const std::string infra = "infrastructure";
  const std::string security = "security";
  s.des.skill_types = {infra, security};

  auto engineer = [&](int level, Affinity affinity) {
    Engineer e;
    e.skill = {infra, level};
    e.affinity = affinity;
    return e;
  };
  s.des.engineers = {
      engineer(3, Affinity::ProjectPrimary),
      engineer(2, Affinity::ProjectPrimary),
      engineer(2, Affinity::OperationalPrimary),
      engineer(1, Affinity::OperationalPrimary),
  };

  GeneratorConfig incidents;
  incidents.name = "incidents";
  incidents.work_type = WorkType::Incident;
  incidents.daily_rate = 3.5;
  incidents.priority_mix = {0.2, 0.5, 0.3};
  incidents.service_mean_hours = {3.0, 4.0, 4.0};
  incidents.skill_mix = {{{infra, 1}, 0.50},
                         {{infra, 2}, 0.30},
                         {{infra, 3}, 0.18},
                         {{security, 2}, 0.02}};

  GeneratorConfig requests;
  requests.name = "service_requests";
  requests.work_type = WorkType::ServiceRequest;
  requests.daily_rate = 2.0;
  requests.priority_mix = {0.05, 0.35, 0.60};
  requests.service_mean_hours = {2.0, 3.0, 3.0};
  requests.skill_mix = {{{infra, 1}, 0.60},
                        {{infra, 2}, 0.30},
                        {{infra, 3}, 0.08},
                        {{security, 2}, 0.02}};

  GeneratorConfig tasks;
  tasks.name = "project_tasks";
  tasks.work_type = WorkType::ProjectTask;
  tasks.daily_rate = 2.0;
  tasks.priority_mix = {0.10, 0.30, 0.60};
  tasks.service_mean_hours = {8.0, 8.0, 8.0};
  tasks.skill_mix = {{{infra, 1}, 0.30}, {{infra, 2}, 0.40}, {{infra, 3}, 0.30}};

  s.des.generators = {incidents, requests, tasks};
  s.des.knobs = des::DesKnobs{};
  s.des.knobs.i_base = 1.0;
  s.des.rework = des::ReworkConfig{};

  auto& p = s.sd;
  p.project_arrivals = 2.0;
  p.ops_arrivals = 5.5;
  p.project_completion_time = 5.0;
  p.ops_completion_time = 1.0;
  p.team_capacity_hours = 32.0;
  p.project_effort_hours = 8.0;
  p.ops_effort_hours = 3.5;
  p.desired_backlog = 30.0;
  p.fatigue_time = 10.0;
  p.mgmt_delay = 10.0;
  p.rework_delay = 5.0;
  p.s_base = 0.05;
  p.base_error_frac = 0.05;
  p.quality_target = 0.05;
  p.target_cycle_time = 5.0;
  p.k_fatigue_error = 0.25;
  p.k_fatigue_prod = 0.02;
  p.k_pressure_stop = 0.5;
  p.k_switch = 0.2;
  p.k_capacity = 0.15;
  p.k_assist = 0.0;
  p.g_m = 0.2;

  // Not in equilibrium at t=0: backlogs already above the desired level.
  s.sd_initial.project_backlog = 15.0;
  s.sd_initial.project_wip = 4.0;
  s.sd_initial.ops_backlog = 25.0;
  s.sd_initial.ops_wip = 4.0;
  s.sd_initial.rework_pool = 1.0;

  s.horizon = 126.0;
  s.sd_dt = 0.25;
  s.replications = 1;
  s.seed = 1;
  s.cycles_max = 5;
  s.tol = 1e-3;
  return s;
}

}  // namespace teamsim
