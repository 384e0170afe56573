#pragma once

// Small hand-built configurations shared by the unit tests.

#include <string>
#include <vector>

#include "teamsim/des/config.hpp"

namespace fixture {

using namespace teamsim;

// One generator of P3 incidents needing ("ops", 1), `engineers` level-1 ops
// engineers, no errors and no skill stops: a plain M/M/c queue.
inline des::DesConfig single_class(double daily_rate, double service_hours,
                                   int engineers) {
  des::DesConfig c;
  c.skill_types = {"ops"};
  des::GeneratorConfig g;
  g.name = "single";
  g.work_type = WorkType::Incident;
  g.daily_rate = daily_rate;
  g.priority_mix = {0.0, 0.0, 1.0};
  g.service_mean_hours = {service_hours, service_hours, service_hours};
  g.skill_mix = {{{"ops", 1}, 1.0}};
  c.generators = {g};
  for (int i = 0; i < engineers; ++i) {
    Engineer e;
    e.skill = {"ops", 1};
    c.engineers.push_back(e);
  }
  c.knobs.base_error_prob = 0.0;
  c.knobs.p_stop_skill = 0.0;
  return c;
}

inline WorkItem make_item(ItemId id, Priority p, double hours,
                          SkillSpec skill = {"ops", 1},
                          WorkType type = WorkType::Incident) {
  WorkItem w;
  w.id = id;
  w.work_type = type;
  w.priority = p;
  w.required = std::move(skill);
  w.service_demand = hours;
  w.remaining_service = hours;
  return w;
}

}  // namespace fixture
