// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <tuple>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli_runner.hpp"
#include "oracles.hpp"
#include "teamsim/des/engine.hpp"
#include "teamsim/hybrid/coupler.hpp"
#include "teamsim/io/format.hpp"
#include "teamsim/io/scenario.hpp"
#include "teamsim/io/tickets.hpp"
#include "teamsim/scenario.hpp"

using namespace teamsim;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

des::DesConfig single_class(double rate, int engineers) {
  des::DesConfig c;
  c.skill_types = {"ops"};
  des::GeneratorConfig g;
  g.name = "single";
  g.work_type = WorkType::Incident;
  g.daily_rate = rate;
  g.priority_mix = {0.0, 0.0, 1.0};
  g.service_mean_hours = {8.0, 8.0, 8.0};  // one working day
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

// Ten seeds pooled: counts and samples merged, time averages averaged.
des::DesStats pooled_run(const des::DesConfig& cfg, double horizon) {
  des::DesOptions opt;
  opt.keep_log = false;
  std::vector<des::DesStats> runs;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    runs.push_back(des::run_des(cfg, des::DesModifiers::identity(), seed,
                                horizon, opt).stats);
  }
  return des::merge(runs);
}

double rel(double got, double want) { return std::abs(got - want) / want; }

Verdict mm1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto st = pooled_run(single_class(0.8, 1), 5e4);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double L = st.time_avg_in_system;
  const double Wq = st.of(Priority::P3).mean_time_in_queue_days;
  const double L_ref = oracle::mm1_number_in_system(0.8, 1.0);
  const double Wq_ref = oracle::mm1_wait_in_queue(0.8, 1.0);
  return {rel(L, L_ref) <= 0.05 && rel(Wq, Wq_ref) <= 0.05 && secs < 30.0,
          fmt::format("L={:.4f} (ref {:.4f}), Wq={:.4f} d (ref {:.4f}), {:.1f} s",
                      L, L_ref, Wq, Wq_ref, secs)};
}

Verdict erlang() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto st = pooled_run(single_class(3.2, 4), 5e4);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double Wq = st.of(Priority::P3).mean_time_in_queue_days;
  const double ref = oracle::mmc_wait_in_queue(4, 3.2, 1.0);
  return {rel(Wq, ref) <= 0.07 && secs < 60.0,
          fmt::format("Wq={:.4f} d, Erlang-C {:.4f} d (C={:.4f}), {:.1f} s", Wq,
                      ref, oracle::erlang_c(4, 3.2), secs)};
}

Verdict priority_order() {
  const Scenario s = default_scenario();
  des::DesOptions opt;
  opt.keep_log = false;
  int eligible = 0, ordered = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto st = des::run_des(s.des, des::DesModifiers::identity(), seed,
                                 s.horizon, opt).stats;
    bool enough = true;
    for (auto p : kAllPriorities) enough &= st.of(p).count_completed >= 100;
    if (!enough) continue;
    ++eligible;
    const double q1 = st.of(Priority::P1).mean_time_in_queue_days;
    const double q2 = st.of(Priority::P2).mean_time_in_queue_days;
    const double q3 = st.of(Priority::P3).mean_time_in_queue_days;
    ordered += q1 <= q2 && q2 <= q3;
  }
  return {eligible > 0 && ordered == eligible,
          fmt::format("{}/{} eligible seeds ordered (20 run)", ordered, eligible)};
}

Verdict baseline() {
  const Scenario s = default_scenario();
  const auto st = des::run_des(s.des, des::DesModifiers::identity(), s.seed,
                               s.horizon, {false, false}).stats;
  const double p1 = st.of(Priority::P1).mean_completion_days;
  const double p2 = st.of(Priority::P2).mean_completion_days;
  const double p3 = st.of(Priority::P3).mean_completion_days;
  const auto& q3 = st.queues.waiting_by_priority[rank(Priority::P3)];
  const auto mk = oracle::mann_kendall(q3);
  const bool rising = q3.at(126) > q3.at(63) && q3.at(63) > q3.at(1);
  return {p1 <= 1.0 && p2 <= 10.0 && rising && mk.s > 0 && mk.p_two_sided < 0.01,
          fmt::format("P1 {:.3f} d, P2 {:.3f} d, P3 {:.2f} d (not asserted); "
                      "P3 queue d1={} d63={} d126={}, Mann-Kendall z={:.2f} p={:.2g}",
                      p1, p2, p3, q3.at(1), q3.at(63), q3.at(126), mk.z,
                      mk.p_two_sided)};
}

Verdict reinforcing_loop() {
  const Scenario s = default_scenario();
  hybrid::HybridOptions opt;
  opt.keep_logs = false;
  int hits = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto r = hybrid::run_hybrid(s, 3, seed, s.tol, opt);
    if (r.cycles.size() < 2) {
      per_seed += fmt::format(" s{}:converged-early", seed);
      continue;
    }
    const auto& a = r.cycles[0].des_stats;
    const auto& b = r.cycles[1].des_stats;
    const bool stops = b.totals.stop_count > a.totals.stop_count;
    const bool p2 = b.of(Priority::P2).mean_completion_days >
                    a.of(Priority::P2).mean_completion_days;
    const bool p3 = b.of(Priority::P3).count_completed <
                    a.of(Priority::P3).count_completed;
    const bool rework = b.rework_incidents_per_day > a.rework_incidents_per_day;
    hits += stops && p2 && p3 && rework;
    per_seed += fmt::format(
        " s{}:stops{:+.0f}%,P2{:+.0f}%,P3done{:+.0f}%,rework{:+.0f}%", seed,
        100.0 * (double(b.totals.stop_count) / a.totals.stop_count - 1.0),
        100.0 * (b.of(Priority::P2).mean_completion_days /
                     a.of(Priority::P2).mean_completion_days - 1.0),
        100.0 * (double(b.of(Priority::P3).count_completed) /
                     a.of(Priority::P3).count_completed - 1.0),
        100.0 * (b.rework_incidents_per_day / a.rework_incidents_per_day - 1.0));
  }
  return {hits >= 9, fmt::format("{}/10 seeds;{}", hits, per_seed)};
}

Verdict sd_integrator() {
  // First-order lag: backlog pinned at twice the desired level.
  sd::SdParams lag;
  lag.team_capacity_hours = 0.0;
  lag.desired_backlog = 10.0;
  lag.fatigue_time = 5.0;
  sd::SdState pinned;
  pinned.project_backlog = 20.0;
  const double f = sd::run_sd(pinned, lag, 5.0, 0.05).back().state.fatigue;
  const double f_ref = oracle::first_order_lag(0.0, 1.0, 5.0, 5.0);
  const bool lag_ok = rel(f, f_ref) <= 0.02;

  const Scenario s = default_scenario();
  const auto traj = sd::run_sd(s.sd_initial, s.sd, s.horizon, 0.25);
  double worst = 0.0;
  const auto& i0 = s.sd_initial;
  for (const auto& pt : traj.points) {
    const auto& x = pt.state;
    const double pin = i0.project_backlog + i0.project_wip + i0.project_completed +
                       s.sd.project_arrivals * pt.time;
    const double oin = i0.ops_backlog + i0.ops_wip + i0.ops_completed +
                       i0.rework_pool + s.sd.ops_arrivals * pt.time;
    worst = std::max(worst, rel(x.project_backlog + x.project_wip + x.project_completed, pin));
    worst = std::max(worst, rel(x.ops_backlog + x.ops_wip + x.ops_completed + x.rework_pool, oin));
  }
  const bool clamp_free = traj.back().clamped_total == 0.0;
  const bool mass_ok = clamp_free && worst < 1e-6;

  const auto fine = sd::run_sd(s.sd_initial, s.sd, s.horizon, 0.125);
  const auto& a = traj.back().state;
  const auto& b = fine.back().state;
  double dt_change = 0.0;
  for (auto [x, y] : {std::pair{a.project_backlog, b.project_backlog},
                      {a.project_wip, b.project_wip},
                      {a.project_completed, b.project_completed},
                      {a.ops_backlog, b.ops_backlog},
                      {a.ops_wip, b.ops_wip},
                      {a.ops_completed, b.ops_completed},
                      {a.rework_pool, b.rework_pool},
                      {a.fatigue, b.fatigue},
                      {a.mgmt_pressure, b.mgmt_pressure}}) {
    const double scale = std::max(std::abs(x), std::abs(y));
    if (scale > 0.0) dt_change = std::max(dt_change, std::abs(x - y) / scale);
  }
  return {lag_ok && mass_ok && dt_change < 0.01,
          fmt::format("lag {:.5f} vs {:.5f}; mass residual {:.2g}{}; dt-halving "
                      "max change {:.3f}%",
                      f, f_ref, worst, clamp_free ? "" : " (clamping active)",
                      100.0 * dt_change)};
}

Verdict identity_fixed_point() {
  Scenario s = default_scenario();
  auto& p = s.sd;
  p.k_fatigue_error = p.k_fatigue_prod = p.k_pressure_stop = p.k_switch =
      p.k_capacity = p.k_assist = p.g_m = 0.0;
  const auto r = hybrid::run_hybrid(s, 2, s.seed, 1e-6);
  if (r.cycles.size() < 2) return {false, "cycle 1 missing"};
  const auto& c1 = r.cycles[1];
  const auto alone = des::run_des(s.des, des::DesModifiers::identity(), c1.seed,
                                  s.horizon);
  const std::string a = c1.event_log.str();
  const std::string b = alone.log.str();
  return {c1.modifiers_in.is_identity() && a == b,
          fmt::format("seed {}, {} log bytes, identity modifiers: {}", c1.seed,
                      a.size(), c1.modifiers_in.is_identity() ? "yes" : "no")};
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "teamsim_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path scenario = root / "scenario.json";
  io::save_scenario(default_scenario(), scenario);
  const fs::path spec = root / "synth.json";
  io::SynthSpec ss;
  ss.span_days = 90.0;
  ss.generators = default_scenario().des.generators;
  io::write_file(spec, io::to_json(ss).dump(2) + "\n");

  const std::string sc = cli::quote(scenario.string());
  std::vector<std::string> failures;
  std::size_t files = 0;
  for (const char* format : {"json", "csv"}) {
    std::map<std::string, std::string> first;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = root / fmt::format("{}_{}", format, rep);
      const fs::path logs = root / fmt::format("logs_{}_{}", format, rep);
      fs::create_directories(dir);
      auto q = [&](const fs::path& p) { return cli::quote(p.string()); };
      const std::string f = fmt::format("--format {} ", format);
      const std::vector<std::string> commands{
          f + "validate " + sc,
          f + "defaults",
          f + "synth " + q(spec) + " " + q(dir / "tickets.csv"),
          f + "fit " + q(dir / "tickets.csv") + " --out " + q(dir / "fit"),
          f + "fit " + q(dir / "tickets.csv"),
          f + "des " + sc + " --reps 3 --out " + q(dir / "des"),
          f + "des " + sc + " --horizon 20",
          f + "sd " + sc + " --out " + q(dir / "sd"),
          f + "sd " + sc + " --dt 1",
          f + "hybrid " + sc + " --cycles 3 --out " + q(dir / "hybrid"),
      };
      for (std::size_t i = 0; i < commands.size(); ++i) {
        const auto r = cli::run(commands[i], logs);
        if (r.exit_code != 0) failures.push_back(commands[i]);
        io::write_file(dir / fmt::format("stdout_{}.txt", i), r.out);
      }
      auto snap = cli::snapshot(dir);
      if (rep == 0) {
        first = std::move(snap);
        files += first.size();
      } else if (snap != first) {
        failures.push_back(fmt::format("{} outputs differ", format));
      }
    }
  }
  std::string detail = fmt::format("{} files compared across 2 runs", files);
  for (const auto& f : failures) detail += "; failed: " + f;
  return {failures.empty(), detail};
}

Verdict calibration_round_trip() {
  // A busy desk: every class gets thousands of records over six months, so
  // sampling noise sits well inside the 5% band.
  io::SynthSpec spec;
  spec.span_days = 182.0;
  spec.seed = 2024;
  for (auto [name, type, rate] :
       {std::tuple{"incidents", WorkType::Incident, 300.0},
        std::tuple{"requests", WorkType::ServiceRequest, 300.0},
        std::tuple{"tasks", WorkType::ProjectTask, 300.0}}) {
    des::GeneratorConfig g;
    g.name = name;
    g.work_type = type;
    g.daily_rate = rate;
    g.priority_mix = {0.2, 0.3, 0.5};
    g.service_mean_hours = {3.0, 4.0, 8.0};
    g.skill_mix = {{{"ops", 1}, 1.0}};
    spec.generators.push_back(g);
  }
  const auto rates = io::class_rates(spec);
  std::istringstream in(io::generate_synthetic(spec));
  const auto result = io::ingest_tickets(in);

  int checked = 0, within = 0;
  double worst = 0.0;
  for (const auto& f : result.fits) {
    if (f.records < 200 || !f.arrival) continue;
    ++checked;
    const double e = rel(f.arrival->rate, rates.at({f.work_type, f.priority}));
    worst = std::max(worst, e);
    within += e <= 0.05;
  }
  return {checked > 0 && within == checked && result.errors.empty(),
          fmt::format("{}/{} classes within 5% ({} records, worst {:.2f}%)",
                      within, checked, result.records.size(), 100.0 * worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"M/M/1 oracle", mm1},
      {"Erlang-C oracle", erlang},
      {"priority ordering", priority_order},
      {"baseline qualitative behaviour", baseline},
      {"reinforcing loop", reinforcing_loop},
      {"SD integrator", sd_integrator},
      {"identity-modifier fixed point", identity_fixed_point},
      {"CLI determinism", determinism},
      {"calibration round trip", calibration_round_trip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    fmt::print("{} criterion {}: {} | {}\n", v.pass ? "PASS" : "FAIL", i + 1,
               criteria[i].first, v.detail);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
