// teamsim: command-line front end for the DES, SD and hybrid engines.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "teamsim/errors.hpp"
#include "teamsim/io/report.hpp"
#include "teamsim/io/scenario.hpp"
#include "teamsim/io/tickets.hpp"

namespace {

using namespace teamsim;

enum Exit { kOk = 0, kConfig = 1, kIo = 2, kEngine = 3 };

void out(const std::string& text) {
  std::fwrite(text.data(), 1, text.size(), stdout);
}

Scenario load(const std::string& path) {
  return io::load_scenario(path, io::process_environment());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid DES/SD simulator of a skill-based IT team"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format_text = "json";
  app.add_option("--format", format_text, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));

  // fit
  auto* fit = app.add_subcommand("fit", "Fit arrival and service rates to a ticket export");
  std::string fit_path, fit_scenario, fit_out, fit_source;
  std::vector<std::string> fit_map;
  fit->add_option("tickets", fit_path, "Ticket CSV")->required();
  fit->add_option("--map", fit_map, "Column mapping field=header (repeatable)");
  fit->add_option("--service-time", fit_source, "touch or elapsed")
      ->check(CLI::IsMember({"touch", "elapsed"}));
  fit->add_option("--scenario", fit_scenario,
                  "Scenario whose service_time_source applies");
  fit->add_option("--out", fit_out, "Output directory");

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic ticket export");
  std::string synth_spec, synth_out;
  std::optional<std::uint64_t> synth_seed;
  std::optional<double> synth_span;
  synth->add_option("spec", synth_spec, "Synthetic spec JSON")->required();
  synth->add_option("out", synth_out, "Ticket CSV to write")->required();
  synth->add_option("--seed", synth_seed, "Override the spec seed");
  synth->add_option("--span", synth_span, "Override the span in days");

  // des
  auto* des_cmd = app.add_subcommand("des", "Run the discrete-event model");
  std::string des_scenario, des_out;
  std::optional<std::uint64_t> des_seed;
  std::optional<double> des_horizon;
  std::optional<int> des_reps;
  des_cmd->add_option("scenario", des_scenario, "Scenario JSON")->required();
  des_cmd->add_option("--seed", des_seed, "Seed");
  des_cmd->add_option("--horizon", des_horizon, "Horizon in working days");
  des_cmd->add_option("--reps", des_reps, "Replications");
  des_cmd->add_option("--out", des_out, "Output directory");

  // sd
  auto* sdc = app.add_subcommand("sd", "Run the system-dynamics model");
  std::string sd_scenario, sd_out;
  std::optional<double> sd_dt;
  sdc->add_option("scenario", sd_scenario, "Scenario JSON")->required();
  sdc->add_option("--dt", sd_dt, "Euler step in days");
  sdc->add_option("--out", sd_out, "Output directory");

  // hybrid
  auto* hyb = app.add_subcommand("hybrid", "Run coupled DES/SD cycles");
  std::string hyb_scenario, hyb_out;
  std::optional<int> hyb_cycles;
  std::optional<double> hyb_tol;
  std::optional<std::uint64_t> hyb_seed;
  hyb->add_option("scenario", hyb_scenario, "Scenario JSON")->required();
  hyb->add_option("--cycles", hyb_cycles, "Maximum cycles");
  hyb->add_option("--tol", hyb_tol, "Convergence tolerance on modifiers");
  hyb->add_option("--seed", hyb_seed, "Seed");
  hyb->add_option("--out", hyb_out, "Output directory");

  // validate
  auto* val = app.add_subcommand("validate", "Check a scenario file");
  std::string val_scenario;
  val->add_option("scenario", val_scenario, "Scenario JSON")->required();

  // defaults
  auto* defaults = app.add_subcommand("defaults", "Print the built-in scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  const auto format = *io::parse_format(format_text);
  try {
    if (*fit) {
      io::ColumnMapping mapping;
      for (const auto& m : fit_map) io::apply_mapping(mapping, m);
      auto source = ServiceTimeSource::Touch;
      if (!fit_scenario.empty()) source = load(fit_scenario).service_time_source;
      if (!fit_source.empty()) {
        source = fit_source == "touch" ? ServiceTimeSource::Touch
                                       : ServiceTimeSource::Elapsed;
      }
      const auto result = io::ingest_tickets(fit_path, mapping, source);
      for (const auto& e : result.errors) {
        std::cerr << fmt::format("warning: line {}: {}\n", e.line, e.message);
      }
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      const std::string text = format == io::OutputFormat::Json
                                   ? io::ingest_json(result).dump(2) + "\n"
                                   : io::ingest_csv(result);
      if (fit_out.empty()) {
        out(text);
      } else {
        io::ensure_dir(fit_out);
        io::write_file(std::filesystem::path(fit_out) /
                           (format == io::OutputFormat::Json ? "fit.json" : "fit.csv"),
                       text);
      }
    } else if (*synth) {
      auto spec = io::load_synth_spec(synth_spec);
      if (synth_seed) spec.seed = *synth_seed;
      if (synth_span) spec.span_days = *synth_span;
      io::generate_synthetic(spec, synth_out);
    } else if (*des_cmd) {
      Scenario s = load(des_scenario);
      if (des_seed) s.seed = *des_seed;
      if (des_horizon) s.horizon = *des_horizon;
      if (des_reps) s.replications = *des_reps;
      validate(s);
      des::DesOptions opts;
      opts.keep_log = !des_out.empty();
      auto r = des::run_replications(s.des, des::DesModifiers::identity(), s.seed,
                                     s.horizon, s.replications, opts);
      if (des_out.empty()) {
        out(format == io::OutputFormat::Json
                ? io::des_stats_json(r.stats).dump(2) + "\n"
                : io::des_stats_csv(r.stats));
      } else {
        io::emit_des(r.stats, &r.log, s.seed, format, des_out);
      }
    } else if (*sdc) {
      Scenario s = load(sd_scenario);
      if (sd_dt) s.sd_dt = *sd_dt;
      validate(s);
      const auto traj = sd::run_sd(s.sd_initial, s.sd, s.horizon, s.sd_dt);
      if (sd_out.empty()) {
        out(format == io::OutputFormat::Json ? io::trajectory_json(traj).dump(2) + "\n"
                                             : io::trajectory_csv(traj));
      } else {
        io::emit_sd(traj, format, sd_out);
      }
    } else if (*hyb) {
      Scenario s = load(hyb_scenario);
      if (hyb_cycles) s.cycles_max = *hyb_cycles;
      if (hyb_tol) s.tol = *hyb_tol;
      if (hyb_seed) s.seed = *hyb_seed;
      validate(s);
      hybrid::HybridOptions opts;
      opts.keep_logs = !hyb_out.empty();
      const auto report = hybrid::run_hybrid(s, s.cycles_max, s.seed, s.tol, opts);
      if (hyb_out.empty()) {
        out(format == io::OutputFormat::Json ? io::hybrid_json(report).dump(2) + "\n"
                                             : io::hybrid_cycles_csv(report));
      } else {
        io::emit_hybrid(report, format, hyb_out);
      }
    } else if (*val) {
      const Scenario s = load(val_scenario);
      out(fmt::format("ok: {} generators, {} engineers, horizon {} days\n",
                      s.des.generators.size(), s.des.engineers.size(), s.horizon));
    } else if (*defaults) {
      out(io::dump_scenario(default_scenario()));
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const EngineError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kEngine;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kEngine;
  }
  return kOk;
}
