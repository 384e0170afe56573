#pragma once

#include <cstdint>

#include "teamsim/des/config.hpp"
#include "teamsim/sd/model.hpp"

namespace teamsim {

enum class ServiceTimeSource { Touch, Elapsed };

// Everything needed to run the DES, SD and hybrid engines.
struct Scenario {
  des::DesConfig des;
  sd::SdParams sd;
  sd::SdState sd_initial;
  double horizon = 126.0;  // working days, about six months
  double sd_dt = 0.25;
  int replications = 1;
  std::uint64_t seed = 1;
  int cycles_max = 5;
  double tol = 1e-3;
  ServiceTimeSource service_time_source = ServiceTimeSource::Touch;
};

// Throws ConfigError describing the first violation.
void validate(const Scenario& scenario);

// Illustrative overloaded team: four engineers, three ticket/task
// generators, stressed SD gains. Not calibrated to any real organization.
Scenario default_scenario();

}  // namespace teamsim
