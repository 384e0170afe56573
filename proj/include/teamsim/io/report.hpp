#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "teamsim/des/engine.hpp"
#include "teamsim/hybrid/coupler.hpp"
#include "teamsim/io/format.hpp"
#include "teamsim/io/scenario.hpp"
#include "teamsim/io/tickets.hpp"
#include "teamsim/sd/model.hpp"

namespace teamsim::io {

// Flat key/value view of DesStats. Scalars use dotted keys such as
// "totals.stop_count" or "class.incident.P2.mean_completion_days"; daily
// series ("queue.team", "daily_completion.P3", ...) are arrays.
Json des_stats_json(const des::DesStats& stats);

// Inverse of des_stats_json for every exported field (raw samples are not
// exported and come back empty). Throws ConfigError on missing keys.
des::DesStats des_stats_from_json(const Json& flat);

// key,value rows for the scalar fields of des_stats_json.
std::string des_stats_csv(const des::DesStats& stats);
// day,team,waiting_P1..P3,in_system,engineer_<i>...
std::string queues_csv(const des::DesStats& stats);
// day,P1,P2,P3,<type>.<priority>...
std::string daily_completion_csv(const des::DesStats& stats);

// Writes stats.json or stats.csv/queues.csv/daily_completion.csv, plus
// eventlog_seed<seed>.ndjson when a log is given.
void emit_des(const des::DesStats& stats, const des::EventLog* log,
              std::uint64_t seed, OutputFormat format,
              const std::filesystem::path& dir);

std::vector<std::string> trajectory_columns();
std::string trajectory_csv(const sd::SdTrajectory& traj);
Json trajectory_json(const sd::SdTrajectory& traj);

// trajectory.csv or trajectory.json.
void emit_sd(const sd::SdTrajectory& traj, OutputFormat format,
             const std::filesystem::path& dir);

Json modifiers_json(const des::DesModifiers& m);
Json hybrid_json(const hybrid::HybridReport& report);
// cycle,seed,... one row per cycle.
std::string hybrid_cycles_csv(const hybrid::HybridReport& report);
// day,delta_days
std::string difference_csv(const std::vector<double>& series);

// cycles.json, diff_p<n>.csv (last cycle against cycle 0),
// diff_p<n>_cycle<k>.csv, eventlog_cycle<k>.ndjson for cycles with a log;
// cycles.csv as well for the csv format.
void emit_hybrid(const hybrid::HybridReport& report, OutputFormat format,
                 const std::filesystem::path& dir);

Json ingest_json(const IngestResult& result);
std::string ingest_csv(const IngestResult& result);

}  // namespace teamsim::io
