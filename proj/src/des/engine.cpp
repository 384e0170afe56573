#include "teamsim/des/engine.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>
#include <tuple>

#include <fmt/format.h>

#include "teamsim/errors.hpp"

namespace teamsim::des {

namespace {

// Working-hour slot used by the discrete arrival process.
constexpr double kSlotDays = 1.0 / kHoursPerDay;

std::string_view reason_label(StopReason r) {
  switch (r) {
    case StopReason::Preempt: return "preempt";
    case StopReason::Interrupt: return "interrupt";
    case StopReason::Skill: return "skill";
  }
  return "?";
}

std::string item_detail(const WorkItem& item) {
  return fmt::format("type={};priority={};skill={}:{};demand_hours={:.6f}",
                     to_string(item.work_type), to_string(item.priority),
                     item.required.skill_type, item.required.skill_level,
                     item.service_demand);
}

}  // namespace

double sample_interarrival(double rate, RandomStream& rng,
                           ArrivalProcess process) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ConfigError(fmt::format("arrival rate must be > 0, got {}", rate));
  }
  if (process == ArrivalProcess::GeometricHourly) {
    const double p = rate * kSlotDays;
    if (p >= 1.0) return kSlotDays;
    const double slots = std::ceil(std::log(rng.uniform()) / std::log1p(-p));
    return std::max(1.0, slots) * kSlotDays;
  }
  return rng.exponential(rate);
}

WorkItem generate_arrival(const GeneratorConfig& cfg, double now, ItemId id,
                          RandomStream& rng) {
  WorkItem item;
  item.id = id;
  item.work_type = cfg.work_type;
  item.arrival_time = now;
  item.priority = kAllPriorities[rng.categorical(cfg.priority_mix)];

  std::vector<double> weights;
  weights.reserve(cfg.skill_mix.size());
  for (const auto& sw : cfg.skill_mix) weights.push_back(sw.weight);
  if (!weights.empty()) item.required = cfg.skill_mix[rng.categorical(weights)].skill;

  item.service_demand =
      rng.exponential(1.0 / cfg.service_mean_hours[rank(item.priority)]);
  item.remaining_service = item.service_demand;
  return item;
}

SkillCheck skill_stop_check(const Engineer& engineer, const WorkItem& item,
                            double p_stop_skill, double skill_gap_error_boost,
                            RandomStream& rng) {
  SkillCheck check;
  if (item.required.skill_level <= engineer.skill.skill_level) return check;
  check.gap_factor = skill_gap_error_boost;
  if (rng.bernoulli(p_stop_skill)) {
    check.stop = true;
    check.stop_fraction = rng.uniform();
  }
  return check;
}

double error_probability(double base_error_prob, const DesModifiers& modifiers,
                         double gap_factor) {
  return std::min(1.0,
                  base_error_prob * modifiers.rework_multiplier * gap_factor);
}

std::optional<WorkItem> draw_rework_incident(const WorkItem& done, double now,
                                             ItemId new_id, double error_prob,
                                             const ReworkConfig& rework,
                                             RandomStream& rng) {
  if (!rng.bernoulli(error_prob)) return std::nullopt;
  WorkItem incident;
  incident.id = new_id;
  incident.work_type = WorkType::ReworkIncident;
  incident.priority =
      rng.bernoulli(rework.p1_probability) ? Priority::P1 : Priority::P2;
  incident.required = done.required;
  incident.arrival_time = now;
  incident.service_demand =
      rng.exponential(1.0 / rework.service_mean_hours[rank(incident.priority)]);
  incident.remaining_service = incident.service_demand;
  return incident;
}

// ---------------------------------------------------------------------------

TeamModel::TeamModel(DesConfig config, DesModifiers modifiers,
                     std::uint64_t seed, DesOptions options)
    : config_(std::move(config)),
      modifiers_(modifiers),
      options_(options),
      rng_(seed) {
  validate(config_);
  validate(modifiers_);
  engineers_ = config_.engineers;
  for (std::size_t i = 0; i < engineers_.size(); ++i) {
    engineers_[i].id = static_cast<EngineerId>(i);
    engineers_[i].serving.reset();
  }
  individual_.resize(engineers_.size());
  service_.resize(engineers_.size());
  stats_.queues.individual.resize(engineers_.size());
}

const WorkItem* TeamModel::in_service(EngineerId e) const {
  const auto& s = service_.at(e);
  return s.item ? &*s.item : nullptr;
}

std::optional<double> TeamModel::scheduled_completion(EngineerId e) const {
  return service_.at(e).completes_at;
}

bool TeamModel::can_take(EngineerId e, const WorkItem& item) const {
  if (engineers_[e].skill.skill_type != item.required.skill_type) return false;
  if (item.skill_stopped_by.empty()) return true;
  const auto& tried = item.skill_stopped_by;
  if (std::find(tried.begin(), tried.end(), e) == tried.end()) return true;
  // Every capable engineer already gave up on it: anyone may retry.
  for (const auto& other : engineers_) {
    if (other.skill.skill_type == item.required.skill_type &&
        std::find(tried.begin(), tried.end(), other.id) == tried.end()) {
      return false;
    }
  }
  return true;
}

int TeamModel::load(EngineerId e) const {
  return static_cast<int>(individual_[e].size()) +
         (engineers_[e].idle() ? 0 : 1);
}

bool TeamModel::has_free_engineer() const {
  const int depth = config_.knobs.assignment_depth;
  if (depth <= 0) return true;
  for (const auto& eng : engineers_) {
    if (load(eng.id) < depth) return true;
  }
  return false;
}

void TeamModel::accumulate_area(double now) {
  if (now <= last_change_) return;
  std::size_t queued = team_.size();
  for (const auto& q : individual_) queued += q.size();
  const double dt = now - last_change_;
  area_in_system_ += static_cast<double>(in_system_) * dt;
  area_in_queue_ += static_cast<double>(queued) * dt;
  last_change_ = now;
}

void TeamModel::record_arrival(const WorkItem& item) {
  ++stats_.totals.arrived;
  ++stats_.of(item.work_type, item.priority).count_arrived;
  ++in_system_;
}

void TeamModel::submit(WorkItem item, double now) {
  item.skill_checked_by.reset();
  for (const auto& eng : engineers_) {
    if (can_take(eng.id, item)) {
      team_.push(std::move(item), now);
      return;
    }
  }
  dead_letter(std::move(item), now);
}

void TeamModel::dead_letter(WorkItem item, double now) {
  ++item.reassignment_count;
  ++stats_.totals.reassignment_count;
  ++stats_.totals.dead_letter_count;
  ++stats_.of(item.work_type, item.priority).dead_lettered;
  --in_system_;
  if (options_.keep_log) {
    log_.append(now, LogKind::DeadLetter, item.id, -1,
                "skill=" + item.required.skill_type);
  }
  retire(std::move(item));
}

void TeamModel::retire(WorkItem item) {
  if (options_.keep_items) kept_items_.push_back(std::move(item));
}

void TeamModel::start_service(EngineerId e, WorkItem item, double now) {
  auto& eng = engineers_[e];
  auto& s = service_[e];

  SkillCheck check;
  if (item.skill_checked_by != e) {
    check = skill_stop_check(eng, item, config_.knobs.p_stop_skill,
                             config_.knobs.skill_gap_error_boost, rng_);
    item.skill_checked_by = e;
  }

  s.started = now;
  s.hours_per_day =
      kHoursPerDay * eng.capacity_factor * modifiers_.capacity_factor;
  ++s.token;
  const double duration = item.remaining_service / s.hours_per_day;
  double busy_until = now + duration;

  if (options_.keep_log) {
    log_.append(now, LogKind::Start, item.id, e,
                fmt::format("remaining_hours={:.6f}", item.remaining_service));
  }
  eng.serving = item.id;
  s.item = std::move(item);

  if (check.stop) {
    busy_until = now + check.stop_fraction * duration;
    s.completes_at.reset();
    calendar_.schedule(busy_until, EventKind::SkillStop, e, s.token);
  } else {
    s.completes_at = busy_until;
    calendar_.schedule(busy_until, EventKind::ServiceComplete, e, s.token);
  }

  if (modifiers_.interrupt_rate > 0.0) {
    const double at = now + rng_.exponential(modifiers_.interrupt_rate);
    if (at < busy_until) {
      calendar_.schedule(at, EventKind::InterruptTick, e, s.token);
    }
  }
}

WorkItem TeamModel::stop_service(EngineerId e, double now, StopReason reason) {
  auto& s = service_[e];
  if (!s.item) {
    throw EngineError(fmt::format("engineer {} stopped while idle", e));
  }
  WorkItem item = std::move(*s.item);
  s.item.reset();
  s.completes_at.reset();
  ++s.token;
  engineers_[e].serving.reset();

  const double done = (now - s.started) * s.hours_per_day;
  const double penalty = config_.knobs.switch_penalty_hours;
  item.remaining_service = std::max(0.0, item.remaining_service - done);
  item.remaining_service += penalty;
  item.penalty_hours += penalty;
  ++item.stop_count;
  ++stats_.totals.stop_count;

  if (options_.keep_log) {
    log_.append(now, LogKind::Stop, item.id, e,
                fmt::format("reason={}", reason_label(reason)));
  }
  return item;
}

bool TeamModel::maybe_preempt(EngineerId e, WorkItem incoming, double now) {
  const auto& s = service_.at(e);
  if (!s.item) {
    throw EngineError(fmt::format("preemption check on idle engineer {}", e));
  }
  if (!outranks(incoming.priority, s.item->priority)) {
    individual_[e].push(std::move(incoming), now);
    return false;
  }
  WorkItem displaced = stop_service(e, now, StopReason::Preempt);
  ++stats_.totals.preemption_count;
  individual_[e].push(std::move(displaced), now);
  start_service(e, std::move(incoming), now);
  return true;
}

void TeamModel::assign(EngineerId e, WorkItem item, double now) {
  if (options_.keep_log) log_.append(now, LogKind::Dispatch, item.id, e);
  if (!engineers_[e].idle()) {
    maybe_preempt(e, std::move(item), now);
    return;
  }
  if (individual_[e].empty()) {
    start_service(e, std::move(item), now);
    return;
  }
  individual_[e].push(std::move(item), now);
  start_service(e, *individual_[e].pop_best(now), now);
}

void TeamModel::dispatch(double now) {
  // Idle engineers holding committed work take the better of their own
  // queue head and the best team item they are able to work.
  for (auto& eng : engineers_) {
    const EngineerId e = eng.id;
    if (!eng.idle() || individual_[e].empty()) continue;
    const WorkItem& own = *individual_[e].peek_best();
    const WorkQueue::Key own_key{own.priority, own.arrival_time, own.id};
    auto pick = team_.end();
    for (auto it = team_.begin(); it != team_.end(); ++it) {
      if (can_take(e, it->second)) {
        pick = it;
        break;
      }
    }
    if (pick != team_.end() && pick->first < own_key) {
      WorkItem item = team_.take(pick, now);
      if (options_.keep_log) log_.append(now, LogKind::Dispatch, item.id, e);
      start_service(e, std::move(item), now);
    } else {
      start_service(e, *individual_[e].pop_best(now), now);
    }
  }

  const int depth = config_.knobs.assignment_depth;
  auto it = team_.begin();
  while (it != team_.end()) {
    const WorkItem& item = it->second;

    bool any_capable = false;
    EngineerId chosen = -1;
    std::tuple<int, bool, EngineerId> chosen_key{};
    EngineerId victim = -1;
    std::tuple<std::size_t, int, EngineerId> victim_key{};
    for (const auto& eng : engineers_) {
      if (!can_take(eng.id, item)) continue;
      any_capable = true;
      const int l = load(eng.id);
      if (depth <= 0 || l < depth) {
        std::tuple<int, bool, EngineerId> key{l, !eng.prefers(item.work_type),
                                              eng.id};
        if (chosen < 0 || key < chosen_key) {
          chosen = eng.id;
          chosen_key = key;
        }
      } else if (!eng.idle() &&
                 outranks(item.priority, service_[eng.id].item->priority)) {
        // Lowest-priority work in service is displaced first.
        std::tuple<std::size_t, int, EngineerId> key{
            kPriorityCount - rank(service_[eng.id].item->priority), l, eng.id};
        if (victim < 0 || key < victim_key) {
          victim = eng.id;
          victim_key = key;
        }
      }
    }

    auto next = std::next(it);
    if (!any_capable) {
      dead_letter(team_.take(it, now), now);
    } else if (chosen >= 0) {
      assign(chosen, team_.take(it, now), now);
    } else if (victim >= 0) {
      assign(victim, team_.take(it, now), now);
    } else if (!has_free_engineer()) {
      // Later items are no more urgent, so none of them can preempt either.
      Priority lowest = Priority::P1;
      for (const auto& s : service_) {
        if (s.item && outranks(lowest, s.item->priority)) lowest = s.item->priority;
      }
      if (!outranks(item.priority, lowest)) break;
    }
    it = next;
  }
}

std::optional<WorkItem> TeamModel::complete_service(EngineerId e, double now) {
  auto& s = service_.at(e);
  if (!s.item) {
    throw EngineError(fmt::format("completion on idle engineer {}", e));
  }
  WorkItem item = std::move(*s.item);
  s.item.reset();
  s.completes_at.reset();
  ++s.token;
  auto& eng = engineers_[e];
  eng.serving.reset();

  item.remaining_service = 0.0;
  item.completion_time = now;
  ++stats_.totals.completed;
  --in_system_;
  auto& cls = stats_.of(item.work_type, item.priority);
  ++cls.count_completed;
  cls.samples.push_back(
      {now, now - item.arrival_time, item.time_in_queue()});
  if (options_.keep_log) log_.append(now, LogKind::Complete, item.id, e);

  const double gap = item.required.skill_level > eng.skill.skill_level
                         ? config_.knobs.skill_gap_error_boost
                         : 1.0;
  const double p =
      error_probability(config_.knobs.base_error_prob, modifiers_, gap);
  auto incident =
      draw_rework_incident(item, now, next_id_, p, config_.rework, rng_);
  retire(std::move(item));
  if (!incident) return std::nullopt;

  ++next_id_;
  ++stats_.totals.rework_incidents_generated;
  record_arrival(*incident);
  if (options_.keep_log) {
    log_.append(now, LogKind::Incident, incident->id, e, item_detail(*incident));
  }
  submit(*incident, now);
  return incident;
}

void TeamModel::interrupt(EngineerId e, double now) {
  WorkItem item = stop_service(e, now, StopReason::Interrupt);
  ++stats_.totals.interruption_count;
  individual_[e].push(std::move(item), now);
}

void TeamModel::sample_queues(int day) {
  auto& q = stats_.queues;
  q.team.push_back(static_cast<double>(team_.size()));
  for (std::size_t e = 0; e < individual_.size(); ++e) {
    q.individual[e].push_back(static_cast<double>(individual_[e].size()));
  }
  for (auto p : kAllPriorities) {
    std::size_t waiting = team_.count(p);
    for (const auto& iq : individual_) waiting += iq.count(p);
    q.waiting_by_priority[rank(p)].push_back(static_cast<double>(waiting));
  }
  q.in_system.push_back(static_cast<double>(in_system_));
  check_conservation();
  (void)day;
}

void TeamModel::check_conservation() const {
  std::array<std::int64_t, kClassCount> present{};
  auto count_queue = [&](const WorkQueue& q) {
    for (const auto& [key, item] : q) {
      ++present[class_index(item.work_type, item.priority)];
    }
  };
  count_queue(team_);
  for (const auto& q : individual_) count_queue(q);
  for (const auto& s : service_) {
    if (s.item) ++present[class_index(s.item->work_type, s.item->priority)];
  }
  for (std::size_t c = 0; c < kClassCount; ++c) {
    const auto& cls = stats_.by_class[c];
    if (cls.count_arrived !=
        cls.count_completed + present[c] + cls.dead_lettered) {
      throw EngineError(fmt::format(
          "conservation violated for class {}: arrived {} != completed {} + "
          "present {} + dead-lettered {}",
          c, cls.count_arrived, cls.count_completed, present[c],
          cls.dead_lettered));
    }
  }
}

void TeamModel::handle(const ScheduledEvent& ev) {
  const double now = ev.time;
  switch (ev.kind) {
    case EventKind::QueueSample: {
      sample_queues(ev.target);
      const int next_day = ev.target + 1;
      if (static_cast<double>(next_day) <= horizon_) {
        calendar_.schedule(next_day, EventKind::QueueSample, next_day);
      }
      return;
    }
    case EventKind::Arrival: {
      const auto& gen = config_.generators[ev.target];
      WorkItem item = generate_arrival(gen, now, allocate_id(), rng_);
      record_arrival(item);
      if (options_.keep_log) {
        log_.append(now, LogKind::Arrival, item.id, -1, item_detail(item));
      }
      submit(std::move(item), now);
      calendar_.schedule(
          now + sample_interarrival(gen.daily_rate, rng_,
                                    config_.knobs.arrival_process),
          EventKind::Arrival, ev.target);
      break;
    }
    case EventKind::ServiceComplete:
      if (ev.token != service_[ev.target].token) return;
      complete_service(ev.target, now);
      break;
    case EventKind::SkillStop: {
      if (ev.token != service_[ev.target].token) return;
      WorkItem item = stop_service(ev.target, now, StopReason::Skill);
      ++item.reassignment_count;
      ++stats_.totals.reassignment_count;
      ++stats_.totals.skill_stop_count;
      item.skill_stopped_by.push_back(ev.target);
      submit(std::move(item), now);
      break;
    }
    case EventKind::InterruptTick:
      if (ev.token != service_[ev.target].token) return;
      interrupt(ev.target, now);
      break;
  }
  dispatch(now);
}

DesResult TeamModel::run(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigError(fmt::format("horizon must be > 0, got {}", horizon));
  }
  horizon_ = horizon;
  stats_.horizon = horizon;

  if (options_.keep_log) {
    log_.append(0.0, LogKind::Bootstrap, -1, -1,
                fmt::format("generators={};engineers={};horizon={:.6f}",
                            config_.generators.size(), engineers_.size(),
                            horizon));
  }
  for (std::size_t g = 0; g < config_.generators.size(); ++g) {
    const auto& gen = config_.generators[g];
    if (gen.daily_rate <= 0.0) continue;
    calendar_.schedule(sample_interarrival(gen.daily_rate, rng_,
                                           config_.knobs.arrival_process),
                       EventKind::Arrival, static_cast<int>(g));
  }
  calendar_.schedule(0.0, EventKind::QueueSample, 0);

  while (!calendar_.empty() && calendar_.peek().time <= horizon) {
    const ScheduledEvent ev = calendar_.pop();
    accumulate_area(ev.time);
    handle(ev);
  }
  accumulate_area(horizon);

  check_conservation();
  auto tally = [&](const WorkItem& item, bool in_service) {
    auto& cls = stats_.of(item.work_type, item.priority);
    (in_service ? cls.in_service_at_end : cls.in_queue_at_end) += 1;
    if (options_.keep_items) kept_items_.push_back(item);
  };
  for (const auto& [key, item] : team_) tally(item, false);
  for (const auto& q : individual_) {
    for (const auto& [key, item] : q) tally(item, false);
  }
  for (const auto& s : service_) {
    if (s.item) tally(*s.item, true);
  }

  stats_.time_avg_in_system = area_in_system_ / horizon;
  stats_.time_avg_in_queue = area_in_queue_ / horizon;
  finalize(stats_);

  DesResult result;
  result.stats = std::move(stats_);
  result.log = std::move(log_);
  result.items = std::move(kept_items_);
  return result;
}

DesResult run_des(const DesConfig& config, const DesModifiers& modifiers,
                  std::uint64_t seed, double horizon, DesOptions options) {
  TeamModel model(config, modifiers, seed, options);
  return model.run(horizon);
}

std::uint64_t replication_seed(std::uint64_t seed, int r) {
  return r == 0 ? seed : mix_seed(seed, static_cast<std::uint64_t>(r));
}

DesResult run_replications(const DesConfig& config,
                           const DesModifiers& modifiers, std::uint64_t seed,
                           double horizon, int replications,
                           DesOptions options) {
  if (replications < 1) {
    throw ConfigError("replication count must be >= 1");
  }
  if (replications == 1) return run_des(config, modifiers, seed, horizon, options);

  std::vector<std::future<DesResult>> pending;
  pending.reserve(replications);
  for (int r = 0; r < replications; ++r) {
    DesOptions opts = options;
    if (r > 0) {
      opts.keep_log = false;
      opts.keep_items = false;
    }
    pending.push_back(std::async(std::launch::async, [=, &config] {
      return run_des(config, modifiers, replication_seed(seed, r), horizon, opts);
    }));
  }
  std::vector<DesResult> done;
  done.reserve(replications);
  for (auto& f : pending) done.push_back(f.get());

  std::vector<DesStats> stats;
  stats.reserve(done.size());
  for (auto& d : done) stats.push_back(std::move(d.stats));

  DesResult merged;
  merged.stats = merge(stats);
  merged.log = std::move(done.front().log);
  merged.items = std::move(done.front().items);
  return merged;
}

}  // namespace teamsim::des
