#include "teamsim/io/scenario.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <limits>
#include <set>
#include <type_traits>

#include <fmt/format.h>

#include "teamsim/errors.hpp"
#include "teamsim/io/format.hpp"

extern char** environ;

namespace teamsim::io {

namespace {

// Strict view of one JSON object: typed reads, unknown keys rejected.
class Obj {
 public:
  Obj(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("{} must be an object", where()));
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    read(*it, key, out);
  }

  // Nested object or array, nullptr when absent.
  const Json* sub(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) {
        throw ConfigError(fmt::format("unknown key '{}'", child(k)));
      }
    }
  }

 private:
  std::string where() const { return path_.empty() ? "document" : "'" + path_ + "'"; }

  [[noreturn]] void bad(const std::string& key, std::string_view expected) const {
    throw ConfigError(fmt::format("'{}' must be {}", child(key), expected));
  }

  void read(const Json& v, const std::string& key, double& out) const {
    if (!v.is_number()) bad(key, "a number");
    out = v.get<double>();
  }
  void read(const Json& v, const std::string& key, int& out) const {
    if (!v.is_number_integer()) bad(key, "an integer");
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
      bad(key, "an integer in range");
    }
    out = static_cast<int>(x);
  }
  void read(const Json& v, const std::string& key, std::uint64_t& out) const {
    if (!v.is_number_unsigned()) bad(key, "a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  void read(const Json& v, const std::string& key, std::string& out) const {
    if (!v.is_string()) bad(key, "a string");
    out = v.get<std::string>();
  }
  void read(const Json& v, const std::string& key,
            std::array<double, kPriorityCount>& out) const {
    if (!v.is_array() || v.size() != kPriorityCount) {
      bad(key, "an array of 3 numbers (P1, P2, P3)");
    }
    for (std::size_t i = 0; i < kPriorityCount; ++i) {
      if (!v[i].is_number()) bad(key, "an array of 3 numbers (P1, P2, P3)");
      out[i] = v[i].get<double>();
    }
  }

  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename E, typename Parse>
E parse_enum(Obj& o, const std::string& key, E fallback, Parse parse,
             std::string_view choices) {
  const Json* v = o.sub(key);
  if (!v) return fallback;
  auto parsed = v->is_string() ? parse(v->get<std::string>()) : std::nullopt;
  if (!parsed) {
    throw ConfigError(fmt::format("'{}' must be one of {}, got {}", o.child(key),
                                  choices, v->dump()));
  }
  return *parsed;
}

std::optional<des::ArrivalProcess> parse_arrival(std::string_view s) {
  if (s == "exponential") return des::ArrivalProcess::Exponential;
  if (s == "geometric_hourly") return des::ArrivalProcess::GeometricHourly;
  return std::nullopt;
}

std::string_view to_string(des::ArrivalProcess a) {
  return a == des::ArrivalProcess::Exponential ? "exponential" : "geometric_hourly";
}

std::optional<ServiceTimeSource> parse_source(std::string_view s) {
  if (s == "touch") return ServiceTimeSource::Touch;
  if (s == "elapsed") return ServiceTimeSource::Elapsed;
  return std::nullopt;
}

std::string_view to_string(ServiceTimeSource s) {
  return s == ServiceTimeSource::Touch ? "touch" : "elapsed";
}

const Json& array_at(Obj& o, const std::string& key, const Json* v) {
  if (!v->is_array()) {
    throw ConfigError(fmt::format("'{}' must be an array", o.child(key)));
  }
  return *v;
}

Json mix_json(const std::array<double, kPriorityCount>& a) {
  return Json::array({a[0], a[1], a[2]});
}

Json generator_json(const des::GeneratorConfig& g) {
  Json skills = Json::array();
  for (const auto& s : g.skill_mix) {
    skills.push_back({{"skill_type", s.skill.skill_type},
                      {"skill_level", s.skill.skill_level},
                      {"weight", s.weight}});
  }
  return {{"name", g.name},
          {"work_type", to_string(g.work_type)},
          {"daily_rate", g.daily_rate},
          {"priority_mix", mix_json(g.priority_mix)},
          {"service_mean_hours", mix_json(g.service_mean_hours)},
          {"skill_mix", skills}};
}

des::GeneratorConfig generator_from(const Json& j, const std::string& path) {
  Obj o(j, path);
  des::GeneratorConfig g;
  o.get("name", g.name);
  g.work_type = parse_enum(o, "work_type", g.work_type, parse_work_type,
                           "project_task, service_request, incident");
  o.get("daily_rate", g.daily_rate);
  o.get("priority_mix", g.priority_mix);
  o.get("service_mean_hours", g.service_mean_hours);
  if (const Json* mix = o.sub("skill_mix")) {
    const auto& arr = array_at(o, "skill_mix", mix);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj s(arr[i], fmt::format("{}.skill_mix.{}", path, i));
      des::SkillWeight w;
      s.get("skill_type", w.skill.skill_type);
      s.get("skill_level", w.skill.skill_level);
      s.get("weight", w.weight);
      s.finish();
      g.skill_mix.push_back(w);
    }
  }
  o.finish();
  return g;
}

Json sd_params_json(const sd::SdParams& p) {
  return {{"project_arrivals", p.project_arrivals},
          {"ops_arrivals", p.ops_arrivals},
          {"project_completion_time", p.project_completion_time},
          {"ops_completion_time", p.ops_completion_time},
          {"team_capacity_hours", p.team_capacity_hours},
          {"project_effort_hours", p.project_effort_hours},
          {"ops_effort_hours", p.ops_effort_hours},
          {"desired_backlog", p.desired_backlog},
          {"fatigue_time", p.fatigue_time},
          {"mgmt_delay", p.mgmt_delay},
          {"rework_delay", p.rework_delay},
          {"s_base", p.s_base},
          {"base_error_frac", p.base_error_frac},
          {"quality_target", p.quality_target},
          {"target_cycle_time", p.target_cycle_time},
          {"k_fatigue_error", p.k_fatigue_error},
          {"k_fatigue_prod", p.k_fatigue_prod},
          {"k_pressure_stop", p.k_pressure_stop},
          {"k_switch", p.k_switch},
          {"k_capacity", p.k_capacity},
          {"k_assist", p.k_assist},
          {"g_m", p.g_m}};
}

sd::SdParams sd_params_from(const Json& j, const std::string& path) {
  Obj o(j, path);
  sd::SdParams p;
  o.get("project_arrivals", p.project_arrivals);
  o.get("ops_arrivals", p.ops_arrivals);
  o.get("project_completion_time", p.project_completion_time);
  o.get("ops_completion_time", p.ops_completion_time);
  o.get("team_capacity_hours", p.team_capacity_hours);
  o.get("project_effort_hours", p.project_effort_hours);
  o.get("ops_effort_hours", p.ops_effort_hours);
  o.get("desired_backlog", p.desired_backlog);
  o.get("fatigue_time", p.fatigue_time);
  o.get("mgmt_delay", p.mgmt_delay);
  o.get("rework_delay", p.rework_delay);
  o.get("s_base", p.s_base);
  o.get("base_error_frac", p.base_error_frac);
  o.get("quality_target", p.quality_target);
  o.get("target_cycle_time", p.target_cycle_time);
  o.get("k_fatigue_error", p.k_fatigue_error);
  o.get("k_fatigue_prod", p.k_fatigue_prod);
  o.get("k_pressure_stop", p.k_pressure_stop);
  o.get("k_switch", p.k_switch);
  o.get("k_capacity", p.k_capacity);
  o.get("k_assist", p.k_assist);
  o.get("g_m", p.g_m);
  o.finish();
  return p;
}

Json sd_state_json(const sd::SdState& s) {
  return {{"project_backlog", s.project_backlog},
          {"project_wip", s.project_wip},
          {"project_completed", s.project_completed},
          {"ops_backlog", s.ops_backlog},
          {"ops_wip", s.ops_wip},
          {"ops_completed", s.ops_completed},
          {"rework_pool", s.rework_pool},
          {"fatigue", s.fatigue},
          {"mgmt_pressure", s.mgmt_pressure}};
}

sd::SdState sd_state_from(const Json& j, const std::string& path) {
  Obj o(j, path);
  sd::SdState s;
  o.get("project_backlog", s.project_backlog);
  o.get("project_wip", s.project_wip);
  o.get("project_completed", s.project_completed);
  o.get("ops_backlog", s.ops_backlog);
  o.get("ops_wip", s.ops_wip);
  o.get("ops_completed", s.ops_completed);
  o.get("rework_pool", s.rework_pool);
  o.get("fatigue", s.fatigue);
  o.get("mgmt_pressure", s.mgmt_pressure);
  o.finish();
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

Json parse_json(const std::string& text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("{} is not valid JSON: {}", what, e.what()));
  }
}

}  // namespace

Json to_json(const sd::SdParams& params) { return sd_params_json(params); }

Json to_json(const Scenario& s) {
  Json generators = Json::array();
  for (const auto& g : s.des.generators) generators.push_back(generator_json(g));
  Json engineers = Json::array();
  for (const auto& e : s.des.engineers) {
    engineers.push_back({{"skill_type", e.skill.skill_type},
                         {"skill_level", e.skill.skill_level},
                         {"affinity", to_string(e.affinity)},
                         {"capacity_factor", e.capacity_factor}});
  }
  const auto& k = s.des.knobs;
  Json des = {
      {"skill_types", s.des.skill_types},
      {"skill_levels", s.des.skill_levels},
      {"generators", generators},
      {"engineers", engineers},
      {"knobs",
       {{"base_error_prob", k.base_error_prob},
        {"p_stop_skill", k.p_stop_skill},
        {"skill_gap_error_boost", k.skill_gap_error_boost},
        {"switch_penalty_hours", k.switch_penalty_hours},
        {"i_base", k.i_base},
        {"assignment_depth", k.assignment_depth},
        {"arrival_process", to_string(k.arrival_process)}}},
      {"rework",
       {{"p1_probability", s.des.rework.p1_probability},
        {"service_mean_hours", mix_json(s.des.rework.service_mean_hours)}}}};
  return {{"horizon", s.horizon},
          {"replications", s.replications},
          {"seed", s.seed},
          {"cycles_max", s.cycles_max},
          {"tol", s.tol},
          {"sd_dt", s.sd_dt},
          {"service_time_source", to_string(s.service_time_source)},
          {"des", des},
          {"sd", sd_params_json(s.sd)},
          {"sd_initial", sd_state_json(s.sd_initial)}};
}

Scenario scenario_from_json(const Json& doc) {
  Obj o(doc, "");
  Scenario s;
  o.get("horizon", s.horizon);
  o.get("replications", s.replications);
  o.get("seed", s.seed);
  o.get("cycles_max", s.cycles_max);
  o.get("tol", s.tol);
  o.get("sd_dt", s.sd_dt);
  s.service_time_source = parse_enum(o, "service_time_source", s.service_time_source,
                                     parse_source, "touch, elapsed");
  if (const Json* d = o.sub("des")) {
    Obj des(*d, "des");
    if (const Json* types = des.sub("skill_types")) {
      const auto& arr = array_at(des, "skill_types", types);
      for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_string()) {
          throw ConfigError(fmt::format("'des.skill_types.{}' must be a string", i));
        }
        s.des.skill_types.push_back(arr[i].get<std::string>());
      }
    }
    des.get("skill_levels", s.des.skill_levels);
    if (const Json* gens = des.sub("generators")) {
      const auto& arr = array_at(des, "generators", gens);
      for (std::size_t i = 0; i < arr.size(); ++i) {
        s.des.generators.push_back(
            generator_from(arr[i], fmt::format("des.generators.{}", i)));
      }
    }
    if (const Json* engs = des.sub("engineers")) {
      const auto& arr = array_at(des, "engineers", engs);
      for (std::size_t i = 0; i < arr.size(); ++i) {
        Obj e(arr[i], fmt::format("des.engineers.{}", i));
        Engineer eng;
        eng.id = static_cast<EngineerId>(i);
        e.get("skill_type", eng.skill.skill_type);
        e.get("skill_level", eng.skill.skill_level);
        eng.affinity = parse_enum(e, "affinity", eng.affinity, parse_affinity,
                                  "project, operational");
        e.get("capacity_factor", eng.capacity_factor);
        e.finish();
        s.des.engineers.push_back(eng);
      }
    }
    if (const Json* kn = des.sub("knobs")) {
      Obj k(*kn, "des.knobs");
      auto& knobs = s.des.knobs;
      k.get("base_error_prob", knobs.base_error_prob);
      k.get("p_stop_skill", knobs.p_stop_skill);
      k.get("skill_gap_error_boost", knobs.skill_gap_error_boost);
      k.get("switch_penalty_hours", knobs.switch_penalty_hours);
      k.get("i_base", knobs.i_base);
      k.get("assignment_depth", knobs.assignment_depth);
      knobs.arrival_process =
          parse_enum(k, "arrival_process", knobs.arrival_process, parse_arrival,
                     "exponential, geometric_hourly");
      k.finish();
    }
    if (const Json* rw = des.sub("rework")) {
      Obj r(*rw, "des.rework");
      r.get("p1_probability", s.des.rework.p1_probability);
      r.get("service_mean_hours", s.des.rework.service_mean_hours);
      r.finish();
    }
    des.finish();
  }
  if (const Json* p = o.sub("sd")) s.sd = sd_params_from(*p, "sd");
  if (const Json* i = o.sub("sd_initial")) s.sd_initial = sd_state_from(*i, "sd_initial");
  o.finish();
  validate(s);
  return s;
}

void apply_env_overrides(Json& doc,
                         const std::vector<std::pair<std::string, std::string>>& env) {
  for (const auto& [name, value] : env) {
    if (!name.starts_with(kEnvPrefix)) continue;
    const std::string path = name.substr(kEnvPrefix.size());
    Json* node = &doc;
    std::string walked;
    std::size_t pos = 0;
    while (true) {
      const auto next = path.find("__", pos);
      const std::string seg =
          lower(path.substr(pos, next == std::string::npos ? std::string::npos
                                                           : next - pos));
      walked += walked.empty() ? seg : "." + seg;
      if (node->is_object()) {
        auto it = node->find(seg);
        if (seg.empty() || it == node->end()) {
          throw ConfigError(fmt::format("{}: unknown scenario key '{}'", name, walked));
        }
        node = &*it;
      } else if (node->is_array()) {
        std::size_t idx = 0;
        auto [p, ec] = std::from_chars(seg.data(), seg.data() + seg.size(), idx);
        if (ec != std::errc{} || p != seg.data() + seg.size() || idx >= node->size()) {
          throw ConfigError(fmt::format("{}: no element '{}'", name, walked));
        }
        node = &(*node)[idx];
      } else {
        throw ConfigError(fmt::format("{}: '{}' has no children", name, walked));
      }
      if (next == std::string::npos) break;
      pos = next + 2;
    }
    Json parsed = Json::parse(value, nullptr, false);
    *node = parsed.is_discarded() ? Json(value) : parsed;
  }
}

std::vector<std::pair<std::string, std::string>> process_environment() {
  std::vector<std::pair<std::string, std::string>> out;
  for (char** e = environ; e && *e; ++e) {
    std::string_view kv(*e);
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    out.emplace_back(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Scenario load_scenario(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, std::string>>& env) {
  const Json doc = parse_json(read_file(path), path.string());
  Scenario s = scenario_from_json(doc);
  const bool overridden = std::any_of(env.begin(), env.end(), [](const auto& kv) {
    return kv.first.starts_with(kEnvPrefix);
  });
  if (!overridden) return s;
  Json full = to_json(s);
  apply_env_overrides(full, env);
  return scenario_from_json(full);
}

std::string dump_scenario(const Scenario& scenario) {
  return to_json(scenario).dump(2) + "\n";
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  write_file(path, dump_scenario(scenario));
}

Json to_json(const SynthSpec& spec) {
  Json generators = Json::array();
  for (const auto& g : spec.generators) generators.push_back(generator_json(g));
  return {{"start", spec.start},
          {"span_days", spec.span_days},
          {"seed", spec.seed},
          {"assignment_group", spec.assignment_group},
          {"queue_mean_days", spec.queue_mean_days},
          {"generators", generators}};
}

SynthSpec synth_spec_from_json(const Json& doc) {
  Obj o(doc, "");
  SynthSpec spec;
  o.get("start", spec.start);
  o.get("span_days", spec.span_days);
  o.get("seed", spec.seed);
  o.get("assignment_group", spec.assignment_group);
  o.get("queue_mean_days", spec.queue_mean_days);
  if (const Json* gens = o.sub("generators")) {
    const auto& arr = array_at(o, "generators", gens);
    for (std::size_t i = 0; i < arr.size(); ++i) {
      spec.generators.push_back(generator_from(arr[i], fmt::format("generators.{}", i)));
    }
  }
  o.finish();
  return spec;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  return synth_spec_from_json(parse_json(read_file(path), path.string()));
}

}  // namespace teamsim::io
