#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "teamsim/des/random.hpp"
#include "teamsim/errors.hpp"
#include "teamsim/hybrid/coupler.hpp"
#include "teamsim/io/fit.hpp"
#include "teamsim/io/format.hpp"
#include "teamsim/io/report.hpp"
#include "teamsim/io/scenario.hpp"
#include "teamsim/io/tickets.hpp"

using namespace teamsim;
using namespace teamsim::io;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory under the build tree.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("teamsim_test_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

IngestResult ingest_text(const std::string& text,
                         ServiceTimeSource src = ServiceTimeSource::Touch) {
  std::istringstream in(text);
  return ingest_tickets(in, ColumnMapping{}, src);
}

SynthSpec two_per_day(std::uint64_t seed, double span) {
  SynthSpec spec;
  spec.seed = seed;
  spec.span_days = span;
  des::GeneratorConfig g;
  g.name = "incidents";
  g.work_type = WorkType::Incident;
  g.daily_rate = 2.0;
  g.priority_mix = {0.0, 1.0, 0.0};
  g.skill_mix = {{{"ops", 1}, 1.0}};
  spec.generators = {g};
  return spec;
}

}  // namespace

// --- fitting ---------------------------------------------------------------------

TEST_CASE("fit_rate examples") {
  const std::vector<double> a{2, 2, 2};
  CHECK(fit_rate(a).rate == doctest::Approx(0.5));
  CHECK(fit_rate(a).n == 3);
  const std::vector<double> b{1, 2, 3, 4};
  CHECK(fit_rate(b).rate == doctest::Approx(0.4));
}

TEST_CASE("fit_rate recovers a sampled exponential") {
  des::RandomStream rng(1300);
  std::vector<double> gaps(100'000);
  for (auto& g : gaps) g = rng.exponential(1.3);
  const auto fit = fit_rate(gaps);
  CHECK(fit.rate >= 1.28);
  CHECK(fit.rate <= 1.32);
  CHECK(fit.ks_distance < 0.01);
}

TEST_CASE("fit_rate rejects short or nonpositive input") {
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(fit_rate(one), DataError);
  const std::vector<double> bad{1.0, 2.0, 0.0, 3.0};
  try {
    fit_rate(bad);
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("gap 2") != std::string::npos);
  }
  const std::vector<double> negative{1.0, -2.0};
  CHECK_THROWS_AS(fit_rate(negative), DataError);
}

TEST_CASE("fit_rate is scale consistent") {
  des::RandomStream rng(8);
  std::vector<double> gaps(1000);
  for (auto& g : gaps) g = rng.exponential(0.7);
  const auto base = fit_rate(gaps);
  for (double c : {0.25, 2.0, 8.0, 1024.0}) {
    std::vector<double> scaled = gaps;
    for (auto& g : scaled) g *= c;
    const auto f = fit_rate(scaled);
    CHECK(f.rate == base.rate / c);
    CHECK(f.ks_distance == doctest::Approx(base.ks_distance).epsilon(1e-12));
  }
  for (double c : {0.3, 3.7, 86400.0}) {
    std::vector<double> scaled = gaps;
    for (auto& g : scaled) g *= c;
    CHECK(fit_rate(scaled).rate == doctest::Approx(base.rate / c).epsilon(1e-12));
  }
}

// --- timestamps and ingestion ------------------------------------------------------

TEST_CASE("ISO-8601 timestamps") {
  const auto t0 = parse_timestamp("2024-01-01T00:00:00Z");
  REQUIRE(t0);
  CHECK(format_timestamp(*t0) == "2024-01-01T00:00:00.000Z");
  CHECK(parse_timestamp("2024-01-01") == t0);
  CHECK(parse_timestamp("2024-01-01T02:00:00+02:00") == t0);

  const auto t1 = parse_timestamp("2024-01-03 12:00");
  REQUIRE(t1);
  CHECK(days_between(*t0, *t1) == doctest::Approx(2.5));
  const auto ms = parse_timestamp("2024-02-29T23:59:59.250Z");
  REQUIRE(ms);
  CHECK(format_timestamp(*ms) == "2024-02-29T23:59:59.250Z");

  CHECK_FALSE(parse_timestamp("yesterday"));
  CHECK_FALSE(parse_timestamp("2023-02-29"));
  CHECK_FALSE(parse_timestamp("2024-13-01T00:00:00Z"));
}

TEST_CASE("header-only ticket file") {
  const auto r = ingest_text(std::string(kTicketHeader) + "\n");
  CHECK(r.records.empty());
  CHECK(r.fits.empty());
  CHECK(r.errors.empty());
  REQUIRE_FALSE(r.warnings.empty());
}

TEST_CASE("three records two days apart") {
  const std::string text = std::string(kTicketHeader) +
                           "\n2024-01-01T00:00:00Z,,incident,P2,ops,2\n"
                           "2024-01-05T00:00:00Z,,incident,P2,ops,4\n"
                           "2024-01-03T00:00:00Z,,incident,P2,ops,3\n";
  const auto r = ingest_text(text);
  REQUIRE(r.records.size() == 3);
  REQUIRE(r.fits.size() == 1);
  const auto& f = r.fits[0];
  CHECK(f.work_type == WorkType::Incident);
  CHECK(f.priority == Priority::P2);
  REQUIRE(f.arrival);
  CHECK(f.arrival->rate == doctest::Approx(0.5));
  CHECK(f.arrival->n == 2);
  CHECK(f.service_mean_hours == doctest::Approx(3.0));
  CHECK(r.priority_mix.at(WorkType::Incident)[1] == 1.0);
}

TEST_CASE("elapsed service time comes from the timestamps") {
  const std::string text = std::string(kTicketHeader) +
                           "\n2024-01-01T00:00:00Z,2024-01-01T06:00:00Z,service_request,P3,ops,\n"
                           "2024-01-02T00:00:00Z,2024-01-02T02:00:00Z,service_request,P3,ops,\n"
                           "2024-01-04T00:00:00Z,2024-01-04T04:00:00Z,service_request,P3,ops,\n";
  const auto r = ingest_text(text, ServiceTimeSource::Elapsed);
  REQUIRE(r.fits.size() == 1);
  CHECK(r.fits[0].service_mean_hours == doctest::Approx(4.0));
  CHECK(r.fits[0].arrival->rate == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("bad rows are listed until they exceed 10%") {
  std::string good;
  for (int d = 1; d <= 9; ++d) {
    good += "2024-01-0" + std::to_string(d) + "T00:00:00Z,,incident,P1,ops,1\n";
  }
  const std::string header = std::string(kTicketHeader) + "\n";

  SUBCASE("one bad row in ten") {
    const auto r = ingest_text(header + good + "not-a-date,,incident,P1,ops,1\n");
    CHECK(r.records.size() == 9);
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].line == 11);
  }

  SUBCASE("two bad rows in eleven") {
    CHECK_THROWS_AS(ingest_text(header + good +
                                "2024-01-10T00:00:00Z,,incident,P7,ops,1\n"
                                "2024-01-11T00:00:00Z,,rework_incident,P1,ops,1\n"),
                    DataError);
  }
}

TEST_CASE("ingestion needs the mapped required columns") {
  CHECK_THROWS_AS(ingest_text("opened_at,work_type\n2024-01-01,incident\n"),
                  DataError);
  CHECK_THROWS_AS(ingest_text(""), DataError);

  std::istringstream in("created,kind,prio\n2024-01-01,incident,P1\n"
                        "2024-01-02,incident,P1\n2024-01-04,incident,P1\n");
  ColumnMapping m;
  apply_mapping(m, "opened_at=created");
  apply_mapping(m, "work_type=kind");
  apply_mapping(m, "priority=prio");
  const auto r = ingest_tickets(in, m);
  CHECK(r.records.size() == 3);
  CHECK_THROWS_AS(apply_mapping(m, "colour=x"), ConfigError);
  CHECK_THROWS_AS(apply_mapping(m, "opened_at"), ConfigError);
}

// --- synthetic data ----------------------------------------------------------------

TEST_CASE("synthetic record counts follow the Poisson mean") {
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    total += static_cast<double>(lines(generate_synthetic(two_per_day(seed, 126.0))).size() - 1);
  }
  const double mean = total / 20.0;
  CHECK(mean >= 240.0);
  CHECK(mean <= 264.0);
}

TEST_CASE("synthetic output edge cases") {
  CHECK(generate_synthetic(two_per_day(3, 0.0)) == std::string(kTicketHeader) + "\n");
  CHECK(generate_synthetic(two_per_day(3, 50.0)) ==
        generate_synthetic(two_per_day(3, 50.0)));
  CHECK(generate_synthetic(two_per_day(3, 50.0)) !=
        generate_synthetic(two_per_day(4, 50.0)));

  const fs::path dir = scratch("synth");
  generate_synthetic(two_per_day(3, 50.0), dir / "a.csv");
  generate_synthetic(two_per_day(3, 50.0), dir / "b.csv");
  CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
  CHECK_THROWS_AS(generate_synthetic(two_per_day(3, 5.0), dir / "missing" / "x.csv"),
                  IoError);
}

TEST_CASE("synth then ingest recovers class rates") {
  // Thousands of records per class keep sampling noise well under 5%.
  SynthSpec spec = two_per_day(21, 182.0);
  spec.generators[0].daily_rate = 400.0;
  spec.generators[0].priority_mix = {0.2, 0.3, 0.5};
  const auto result = ingest_text(generate_synthetic(spec));
  CHECK(result.errors.empty());
  const auto rates = class_rates(spec);
  std::size_t checked = 0;
  for (const auto& f : result.fits) {
    if (f.records < 200) continue;
    REQUIRE(f.arrival);
    const double want = rates.at({f.work_type, f.priority});
    CHECK(f.arrival->rate == doctest::Approx(want).epsilon(0.05));
    ++checked;
  }
  CHECK(checked == 3);
}

// --- scenarios -----------------------------------------------------------------------

TEST_CASE("scenario JSON round trip") {
  const Scenario s = default_scenario();
  const Json doc = to_json(s);
  const Scenario back = scenario_from_json(doc);
  CHECK(to_json(back).dump() == doc.dump());
  CHECK(dump_scenario(back) == dump_scenario(s));
}

TEST_CASE("scenario JSON rejects unknown keys and wrong types") {
  Json doc = to_json(default_scenario());
  SUBCASE("unknown key") {
    doc["des"]["knobs"]["p_stop"] = 0.1;
    try {
      scenario_from_json(doc);
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("des.knobs.p_stop") != std::string::npos);
    }
  }
  SUBCASE("wrong type") {
    doc["sd"]["g_m"] = "high";
    CHECK_THROWS_AS(scenario_from_json(doc), ConfigError);
  }
  SUBCASE("invalid content") {
    doc["horizon"] = -1.0;
    CHECK_THROWS_AS(scenario_from_json(doc), ConfigError);
  }
  SUBCASE("missing keys keep defaults") {
    const Scenario s = scenario_from_json(Json::parse(
        R"({"des": {"skill_types": ["ops"],
                    "generators": [{"name": "g", "daily_rate": 1.0,
                                    "skill_mix": [{"skill_type": "ops", "skill_level": 1, "weight": 1.0}]}],
                    "engineers": [{"skill_type": "ops", "skill_level": 1}]}})"));
    CHECK(s.horizon == 126.0);
    CHECK(s.des.knobs.switch_penalty_hours == 0.5);
  }
}

TEST_CASE("environment overrides") {
  Json doc = to_json(default_scenario());
  apply_env_overrides(doc, {{"TEAMSIM_SD__G_M", "0.3"},
                            {"TEAMSIM_des__Engineers__0__skill_level", "2"},
                            {"TEAMSIM_DES__KNOBS__ARRIVAL_PROCESS", "geometric_hourly"},
                            {"teamsim_sd__k_switch", "9"},
                            {"PATH", "/usr/bin"}});
  const Scenario s = scenario_from_json(doc);
  CHECK(s.sd.g_m == 0.3);
  CHECK(s.des.engineers[0].skill.skill_level == 2);
  CHECK(s.des.knobs.arrival_process == des::ArrivalProcess::GeometricHourly);
  CHECK(s.sd.k_switch == default_scenario().sd.k_switch);  // prefix is case-sensitive

  Json fresh = to_json(default_scenario());
  CHECK_THROWS_AS(apply_env_overrides(fresh, {{"TEAMSIM_SD__NOPE", "1"}}), ConfigError);
  CHECK_THROWS_AS(apply_env_overrides(fresh, {{"TEAMSIM_DES__ENGINEERS__9__AFFINITY", "project"}}),
                  ConfigError);
}

TEST_CASE("scenario files") {
  const fs::path dir = scratch("scenario");
  save_scenario(default_scenario(), dir / "s.json");
  const Scenario s = load_scenario(dir / "s.json", {{"TEAMSIM_HORIZON", "30"}});
  CHECK(s.horizon == 30.0);
  CHECK_THROWS_AS(load_scenario(dir / "absent.json"), IoError);
  write_file(dir / "broken.json", "{ \"horizon\": ");
  CHECK_THROWS_AS(load_scenario(dir / "broken.json"), ConfigError);
}

TEST_CASE("the shipped default scenario matches the built-in one") {
  CHECK(read_file(fs::path(TEAMSIM_SOURCE_DIR) / "scenarios" / "default.json") ==
        dump_scenario(default_scenario()));
  const SynthSpec spec =
      load_synth_spec(fs::path(TEAMSIM_SOURCE_DIR) / "scenarios" / "synth.json");
  CHECK_FALSE(spec.generators.empty());
}

// --- reports -------------------------------------------------------------------------

TEST_CASE("number formatting") {
  CHECK(num(0.0) == "0");
  CHECK(num(-0.0) == "0");
  CHECK(num(1.0) == "1");
  CHECK(num(1.23456789) == "1.23457");
  CHECK(num(123456789.0) == "1.23457e+08");
  CHECK(num(0.000125) == "0.000125");
  CHECK(round6(1.23456789) == 1.23457);
  CHECK(parse_format("csv") == OutputFormat::Csv);
  CHECK(parse_format("json") == OutputFormat::Json);
  CHECK_FALSE(parse_format("xml"));
}

TEST_CASE("all-zero stats emit zero fields") {
  des::DesStats st;
  st.horizon = 2.0;
  st.queues.individual.resize(2);
  des::finalize(st);
  for (auto fmt_ : {OutputFormat::Json, OutputFormat::Csv}) {
    const fs::path dir = scratch(std::string("zero_") + std::string(to_string(fmt_)));
    emit_des(st, nullptr, 1, fmt_, dir);
    if (fmt_ == OutputFormat::Json) {
      const Json doc = Json::parse(read_file(dir / "stats.json"));
      for (const auto& [key, value] : doc.items()) {
        if (key == "horizon" || key == "replications") continue;
        if (value.is_array()) {
          for (const auto& v : value) CHECK(v == 0);
        } else {
          CAPTURE(key);
          CHECK(value == 0);
        }
      }
    } else {
      CHECK(fs::exists(dir / "queues.csv"));
      CHECK(fs::exists(dir / "daily_completion.csv"));
      const auto rows = lines(read_file(dir / "stats.csv"));
      REQUIRE(rows.size() > 1);
      CHECK(rows[0] == "key,value");
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto value = rows[i].substr(rows[i].find(',') + 1);
        if (rows[i].starts_with("horizon,") || rows[i].starts_with("replications,")) continue;
        CAPTURE(rows[i]);
        CHECK(value == "0");
      }
    }
  }
}

TEST_CASE("stats JSON round trip and repeat emission") {
  const Scenario s = default_scenario();
  const auto run = des::run_des(s.des, des::DesModifiers::identity(), 3, 40.0);
  const Json doc = des_stats_json(run.stats);
  const des::DesStats back = des_stats_from_json(Json::parse(doc.dump()));
  CHECK(des_stats_json(back) == doc);

  const fs::path a = scratch("emit_a"), b = scratch("emit_b");
  emit_des(run.stats, &run.log, 3, OutputFormat::Csv, a);
  emit_des(run.stats, &run.log, 3, OutputFormat::Csv, b);
  for (const char* f : {"stats.csv", "queues.csv", "daily_completion.csv",
                        "eventlog_seed3.ndjson"}) {
    CAPTURE(f);
    CHECK(read_file(a / f) == read_file(b / f));
  }
  CHECK(read_file(a / "eventlog_seed3.ndjson") == run.log.str());
}

TEST_CASE("hybrid reports") {
  Scenario s = default_scenario();
  s.horizon = 30.0;

  SUBCASE("one cycle gives zero differences") {
    const auto r = hybrid::run_hybrid(s, 1, 1, 1e-3);
    const fs::path dir = scratch("hybrid1");
    emit_hybrid(r, OutputFormat::Json, dir);
    for (int p = 1; p <= 3; ++p) {
      const auto rows = lines(read_file(dir / ("diff_p" + std::to_string(p) + ".csv")));
      REQUIRE(rows.size() == 32);
      CHECK(rows[0] == "day,delta_days");
      for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i] == std::to_string(i - 1) + ",0");
      }
    }
    CHECK(fs::exists(dir / "cycles.json"));
    CHECK(fs::exists(dir / "eventlog_cycle0.ndjson"));
  }

  SUBCASE("JSON re-parses to the same document") {
    const auto r = hybrid::run_hybrid(s, 3, 1, 1e-3);
    const Json doc = hybrid_json(r);
    CHECK(Json::parse(doc.dump()) == doc);
    CHECK(doc["cycle_count"] == r.cycles.size());
    CHECK(doc["cycles"][0]["modifiers_in"]["rework_multiplier"] == 1.0);

    const fs::path a = scratch("hyb_a"), b = scratch("hyb_b");
    emit_hybrid(r, OutputFormat::Csv, a);
    emit_hybrid(r, OutputFormat::Csv, b);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
      const auto name = entry.path().filename();
      CHECK(read_file(a / name) == read_file(b / name));
      ++files;
    }
    CHECK(files == 1 + 1 + 3 + 3 * r.cycles.size() + r.cycles.size());
  }

  SUBCASE("unwritable destination") {
    const auto r = hybrid::run_hybrid(s, 1, 1, 1e-3);
    const fs::path dir = scratch("hybrid_blocked");
    write_file(dir / "file", "x");
    CHECK_THROWS_AS(emit_hybrid(r, OutputFormat::Json, dir / "file" / "sub"), IoError);
  }
}

TEST_CASE("SD trajectory export") {
  const Scenario s = default_scenario();
  const auto traj = sd::run_sd(s.sd_initial, s.sd, 10.0, 0.25);
  const auto rows = lines(trajectory_csv(traj));
  REQUIRE(rows.size() == 42);
  std::string header;
  for (const auto& c : trajectory_columns()) header += (header.empty() ? "" : ",") + c;
  CHECK(rows[0] == header);
  CHECK(rows[1].starts_with("0,"));
  const Json doc = trajectory_json(traj);
  CHECK(doc["series"]["time"].size() == 41);
}
