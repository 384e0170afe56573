#include "teamsim/io/tickets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "teamsim/des/random.hpp"
#include "teamsim/des/stats.hpp"
#include "teamsim/errors.hpp"
#include "teamsim/io/format.hpp"

namespace teamsim::io {

namespace {

using std::chrono::milliseconds;

constexpr double kMsPerDay = 86'400'000.0;
constexpr double kMaxFailedShare = 0.10;

template <typename T>
bool parse_fixed(std::string_view s, std::size_t pos, std::size_t len, T& out) {
  if (pos + len > s.size()) return false;
  const char* b = s.data() + pos;
  auto [p, ec] = std::from_chars(b, b + len, out);
  return ec == std::errc{} && p == b + len;
}

bool parse_double(std::string_view s, double& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Splits one CSV line; fields may be double-quoted with "" escapes.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string class_label(WorkType t, Priority p) {
  return fmt::format("{}/{}", to_string(t), to_string(p));
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  s = trim(s);
  int y = 0;
  unsigned mo = 0, d = 0;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-' || !parse_fixed(s, 0, 4, y) ||
      !parse_fixed(s, 5, 2, mo) || !parse_fixed(s, 8, 2, d)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{mo},
                                        std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  Timestamp t = std::chrono::sys_days{ymd};

  std::size_t pos = 10;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (!parse_fixed(s, pos + 1, 2, hh) || s.size() < pos + 6 ||
        s[pos + 3] != ':' || !parse_fixed(s, pos + 4, 2, mm)) {
      return std::nullopt;
    }
    pos += 6;
    if (pos < s.size() && s[pos] == ':') {
      if (!parse_fixed(s, pos + 1, 2, ss)) return std::nullopt;
      pos += 3;
    }
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    t += std::chrono::hours{hh} + std::chrono::minutes{mm} +
         std::chrono::seconds{ss};
    if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
      std::size_t end = pos + 1;
      while (end < s.size() && s[end] >= '0' && s[end] <= '9') ++end;
      if (end == pos + 1) return std::nullopt;
      // Milliseconds; further digits are truncated.
      int ms = 0, scale = 100;
      for (std::size_t i = pos + 1; i < end && scale > 0; ++i, scale /= 10) {
        ms += (s[i] - '0') * scale;
      }
      t += milliseconds{ms};
      pos = end;
    }
    if (pos < s.size()) {
      if (s[pos] == 'Z' && pos + 1 == s.size()) {
        pos += 1;
      } else if ((s[pos] == '+' || s[pos] == '-') && s.size() == pos + 6 &&
                 s[pos + 3] == ':') {
        int oh = 0, om = 0;
        if (!parse_fixed(s, pos + 1, 2, oh) || !parse_fixed(s, pos + 4, 2, om)) {
          return std::nullopt;
        }
        const auto offset = std::chrono::hours{oh} + std::chrono::minutes{om};
        t += s[pos] == '+' ? -offset : offset;
        pos = s.size();
      } else {
        return std::nullopt;
      }
    }
  }
  if (pos != s.size()) return std::nullopt;
  return t;
}

std::string format_timestamp(Timestamp t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day};
  auto rest = t - day;
  const auto h = std::chrono::duration_cast<std::chrono::hours>(rest);
  rest -= h;
  const auto m = std::chrono::duration_cast<std::chrono::minutes>(rest);
  rest -= m;
  const auto sec = std::chrono::duration_cast<std::chrono::seconds>(rest);
  rest -= sec;
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}.{:03d}Z",
                     static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()), h.count(), m.count(),
                     sec.count(), rest.count());
}

double days_between(Timestamp from, Timestamp to) {
  return static_cast<double>((to - from).count()) / kMsPerDay;
}

void apply_mapping(ColumnMapping& m, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == assignment.size()) {
    throw ConfigError(fmt::format("column mapping '{}' is not field=header",
                                  assignment));
  }
  const auto field = assignment.substr(0, eq);
  std::string header(assignment.substr(eq + 1));
  if (field == "opened_at") m.opened_at = header;
  else if (field == "closed_at") m.closed_at = header;
  else if (field == "work_type") m.work_type = header;
  else if (field == "priority") m.priority = header;
  else if (field == "assignment_group") m.assignment_group = header;
  else if (field == "touch_hours") m.touch_hours = header;
  else throw ConfigError(fmt::format("unknown ticket field '{}'", field));
}

IngestResult ingest_tickets(std::istream& in, const ColumnMapping& mapping,
                            ServiceTimeSource source) {
  IngestResult result;
  std::string line;
  if (!std::getline(in, line)) throw DataError("ticket file has no header row");
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  const auto header = split_csv(trim(line));

  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    return std::nullopt;
  };
  auto required = [&](const std::string& name) {
    auto c = column(name);
    if (!c) throw DataError(fmt::format("ticket header lacks column '{}'", name));
    return *c;
  };
  const std::size_t c_open = required(mapping.opened_at);
  const std::size_t c_type = required(mapping.work_type);
  const std::size_t c_prio = required(mapping.priority);
  const auto c_close = column(mapping.closed_at);
  const auto c_group = column(mapping.assignment_group);
  const auto c_touch = column(mapping.touch_hours);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++result.rows;
    auto fail = [&](std::string message) {
      result.errors.push_back({line_no, std::move(message)});
    };
    const auto fields = split_csv(trim(line));
    if (fields.size() != header.size()) {
      fail(fmt::format("expected {} fields, found {}", header.size(),
                       fields.size()));
      continue;
    }
    TicketRecord rec;
    auto opened = parse_timestamp(fields[c_open]);
    if (!opened) {
      fail(fmt::format("unparseable opened_at '{}'", fields[c_open]));
      continue;
    }
    rec.opened_at = *opened;
    if (c_close && !trim(fields[*c_close]).empty()) {
      auto closed = parse_timestamp(fields[*c_close]);
      if (!closed) {
        fail(fmt::format("unparseable closed_at '{}'", fields[*c_close]));
        continue;
      }
      if (*closed < *opened) {
        fail("closed_at precedes opened_at");
        continue;
      }
      rec.closed_at = *closed;
    }
    auto type = parse_work_type(trim(fields[c_type]));
    if (!type || *type == WorkType::ReworkIncident) {
      fail(fmt::format("unknown work_type '{}'", fields[c_type]));
      continue;
    }
    rec.work_type = *type;
    auto prio = parse_priority(trim(fields[c_prio]));
    if (!prio) {
      fail(fmt::format("unknown priority '{}'", fields[c_prio]));
      continue;
    }
    rec.priority = *prio;
    if (c_group) rec.assignment_group = std::string(trim(fields[*c_group]));
    if (c_touch && !trim(fields[*c_touch]).empty()) {
      double h = 0.0;
      if (!parse_double(trim(fields[*c_touch]), h) || !(h > 0.0) ||
          !std::isfinite(h)) {
        fail(fmt::format("touch_hours '{}' is not a positive number",
                         fields[*c_touch]));
        continue;
      }
      rec.touch_hours = h;
    }
    result.records.push_back(std::move(rec));
  }

  if (result.rows > 0 && static_cast<double>(result.errors.size()) >
                             kMaxFailedShare * static_cast<double>(result.rows)) {
    const auto& first = result.errors.front();
    throw DataError(fmt::format(
        "{} of {} ticket rows failed (limit 10%); first at line {}: {}",
        result.errors.size(), result.rows, first.line, first.message));
  }
  if (result.records.empty()) {
    result.warnings.push_back("no ticket records; nothing to fit");
    return result;
  }
  if (source == ServiceTimeSource::Touch && !c_touch) {
    result.warnings.push_back("no touch_hours column; service times not fitted");
  }
  if (source == ServiceTimeSource::Elapsed && !c_close) {
    result.warnings.push_back("no closed_at column; service times not fitted");
  }

  std::map<std::pair<WorkType, Priority>, std::vector<const TicketRecord*>> classes;
  std::map<WorkType, std::array<std::size_t, kPriorityCount>> per_type;
  for (const auto& r : result.records) {
    classes[{r.work_type, r.priority}].push_back(&r);
    per_type[r.work_type][rank(r.priority)] += 1;
  }
  for (const auto& [type, counts] : per_type) {
    double total = 0.0;
    for (auto c : counts) total += static_cast<double>(c);
    auto& mix = result.priority_mix[type];
    for (std::size_t p = 0; p < kPriorityCount; ++p) {
      mix[p] = static_cast<double>(counts[p]) / total;
    }
  }

  for (auto& [key, members] : classes) {
    std::stable_sort(members.begin(), members.end(),
                     [](const TicketRecord* a, const TicketRecord* b) {
                       return a->opened_at < b->opened_at;
                     });
    ClassFit fit;
    fit.work_type = key.first;
    fit.priority = key.second;
    fit.records = members.size();
    std::vector<double> gaps;
    for (std::size_t i = 1; i < members.size(); ++i) {
      const double g = days_between(members[i - 1]->opened_at, members[i]->opened_at);
      if (g > 0.0) gaps.push_back(g);
      else ++fit.zero_gaps;
    }
    const auto label = class_label(key.first, key.second);
    if (fit.zero_gaps > 0) {
      result.warnings.push_back(fmt::format(
          "{}: skipped {} zero gaps from identical opened_at", label, fit.zero_gaps));
    }
    if (gaps.size() >= 2) {
      fit.arrival = fit_rate(gaps);
    } else {
      result.warnings.push_back(
          fmt::format("{}: fewer than 2 gaps, arrival rate not fitted", label));
    }

    std::vector<double> service;
    for (const auto* r : members) {
      if (source == ServiceTimeSource::Touch) {
        if (r->touch_hours) service.push_back(*r->touch_hours);
      } else if (r->closed_at) {
        const double h = days_between(r->opened_at, *r->closed_at) * 24.0;
        if (h > 0.0) service.push_back(h);
      }
    }
    if (service.size() >= 2) {
      fit.service = fit_rate(service);
      fit.service_mean_hours = 1.0 / fit.service->rate;
    }
    result.fits.push_back(fit);
  }
  return result;
}

IngestResult ingest_tickets(const std::filesystem::path& path,
                            const ColumnMapping& mapping,
                            ServiceTimeSource source) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open ticket file {}", path.string()));
  return ingest_tickets(in, mapping, source);
}

std::map<std::pair<WorkType, Priority>, double> class_rates(const SynthSpec& spec) {
  std::map<std::pair<WorkType, Priority>, double> rates;
  for (const auto& g : spec.generators) {
    for (auto p : kAllPriorities) {
      const double r = g.daily_rate * g.priority_mix[rank(p)];
      if (r > 0.0) rates[{g.work_type, p}] += r;
    }
  }
  return rates;
}

namespace {

void validate(const SynthSpec& spec) {
  if (!parse_timestamp(spec.start)) {
    throw ConfigError(fmt::format("synth start '{}' is not ISO-8601", spec.start));
  }
  if (!(spec.span_days >= 0.0) || !std::isfinite(spec.span_days)) {
    throw ConfigError("synth span_days must be >= 0");
  }
  if (!(spec.queue_mean_days >= 0.0) || !std::isfinite(spec.queue_mean_days)) {
    throw ConfigError("synth queue_mean_days must be >= 0");
  }
  if (spec.assignment_group.find_first_of("\r\n") != std::string::npos) {
    throw ConfigError("synth assignment_group must be one line");
  }
  for (const auto& g : spec.generators) {
    if (g.work_type == WorkType::ReworkIncident) {
      throw ConfigError(fmt::format("synth generator '{}': rework incidents are "
                                    "derived, not generated", g.name));
    }
    if (!(g.daily_rate >= 0.0) || !std::isfinite(g.daily_rate)) {
      throw ConfigError(fmt::format("synth generator '{}': daily_rate must be >= 0",
                                    g.name));
    }
    double sum = 0.0;
    for (double w : g.priority_mix) {
      if (!(w >= 0.0)) {
        throw ConfigError(fmt::format(
            "synth generator '{}': priority_mix entries must be >= 0", g.name));
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ConfigError(fmt::format(
          "synth generator '{}': priority_mix sums to {}, not 1", g.name, sum));
    }
    for (double h : g.service_mean_hours) {
      if (!(h > 0.0) || !std::isfinite(h)) {
        throw ConfigError(fmt::format(
            "synth generator '{}': service_mean_hours must be > 0", g.name));
      }
    }
  }
}

struct SynthRow {
  double opened = 0.0;  // days from start
  std::size_t cls = 0;
  double touch_hours = 0.0;
  double open_days = 0.0;
};

}  // namespace

std::string generate_synthetic(const SynthSpec& spec) {
  validate(spec);
  const Timestamp start = *parse_timestamp(spec.start);

  // Mean touch hours per class, weighted by each generator's share.
  struct Class {
    WorkType type;
    Priority priority;
    double rate = 0.0;
    double touch_weighted = 0.0;
  };
  std::vector<Class> classes;
  for (auto t : kAllWorkTypes) {
    for (auto p : kAllPriorities) classes.push_back({t, p});
  }
  for (const auto& g : spec.generators) {
    for (auto p : kAllPriorities) {
      const double r = g.daily_rate * g.priority_mix[rank(p)];
      auto& c = classes[des::class_index(g.work_type, p)];
      c.rate += r;
      c.touch_weighted += r * g.service_mean_hours[rank(p)];
    }
  }

  std::vector<SynthRow> rows;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const auto& c = classes[k];
    if (!(c.rate > 0.0)) continue;
    const double touch_mean = c.touch_weighted / c.rate;
    des::RandomStream rng(des::mix_seed(spec.seed, k));
    double t = rng.exponential(c.rate);
    while (t < spec.span_days) {
      SynthRow row;
      row.opened = t;
      row.cls = k;
      row.touch_hours = rng.exponential(1.0 / touch_mean);
      row.open_days = row.touch_hours / kHoursPerDay +
                      (spec.queue_mean_days > 0.0
                           ? rng.exponential(1.0 / spec.queue_mean_days)
                           : 0.0);
      rows.push_back(row);
      t += rng.exponential(c.rate);
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SynthRow& a, const SynthRow& b) {
    return a.opened < b.opened;
  });

  auto at = [&](double days) {
    return start + milliseconds{static_cast<std::int64_t>(std::llround(days * kMsPerDay))};
  };
  std::string out(kTicketHeader);
  out += '\n';
  const std::string group = csv_field(spec.assignment_group);
  for (const auto& r : rows) {
    const auto& c = classes[r.cls];
    out += fmt::format("{},{},{},{},{},{}\n", format_timestamp(at(r.opened)),
                       format_timestamp(at(r.opened + r.open_days)),
                       to_string(c.type), to_string(c.priority), group,
                       num(r.touch_hours));
  }
  return out;
}

void generate_synthetic(const SynthSpec& spec, const std::filesystem::path& path) {
  write_file(path, generate_synthetic(spec));
}

}  // namespace teamsim::io
