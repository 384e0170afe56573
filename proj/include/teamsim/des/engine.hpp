#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "teamsim/des/calendar.hpp"
#include "teamsim/des/config.hpp"
#include "teamsim/des/event_log.hpp"
#include "teamsim/des/random.hpp"
#include "teamsim/des/stats.hpp"
#include "teamsim/domain/work_queue.hpp"

namespace teamsim::des {

// Gap to the next arrival in days. Throws ConfigError unless rate > 0.
double sample_interarrival(double rate, RandomStream& rng,
                           ArrivalProcess process = ArrivalProcess::Exponential);

// New item stamped with `now`; priority, skill and exponential service
// demand drawn from the generator's mixes.
WorkItem generate_arrival(const GeneratorConfig& cfg, double now, ItemId id,
                          RandomStream& rng);

struct SkillCheck {
  bool stop = false;
  double stop_fraction = 0.0;  // share of the service performed before stop
  double gap_factor = 1.0;     // error-probability multiplier at completion
};

// Run once per (item, engineer) assignment when service starts.
SkillCheck skill_stop_check(const Engineer& engineer, const WorkItem& item,
                            double p_stop_skill, double skill_gap_error_boost,
                            RandomStream& rng);

double error_probability(double base_error_prob, const DesModifiers& modifiers,
                         double gap_factor);

// Draws whether completing `done` spawns a rework incident. The incident
// inherits the skill requirement and arrives at `now`.
std::optional<WorkItem> draw_rework_incident(
    const WorkItem& done, double now, ItemId new_id, double error_prob,
    const ReworkConfig& rework, RandomStream& rng);

struct DesOptions {
  bool keep_log = true;
  bool keep_items = false;  // retain every item (finished and residual)
};

struct DesResult {
  DesStats stats;
  EventLog log;
  std::vector<WorkItem> items;
};

enum class StopReason { Preempt, Interrupt, Skill };

// One replication of the single-team queueing network: generators feed a
// team queue, engineers pull from it into individual queues and serve with
// preempt-resume. The kernel operations are public so they can be driven
// step by step; run() drives them from the event calendar.
class TeamModel {
 public:
  TeamModel(DesConfig config, DesModifiers modifiers, std::uint64_t seed,
            DesOptions options = {});

  // Entry into the team queue; dead-letters items no engineer can take.
  void submit(WorkItem item, double now);

  // Moves team-queue work onto engineers and starts idle engineers.
  void dispatch(double now);

  // Engineer must be busy. Returns true when `incoming` displaced the item
  // in service; otherwise `incoming` joins the individual queue.
  bool maybe_preempt(EngineerId engineer, WorkItem incoming, double now);

  // Finishes the item in service on `engineer`; returns the emitted rework
  // incident, if any (already routed to the team queue).
  std::optional<WorkItem> complete_service(EngineerId engineer, double now);

  // Management interruption of the item in service.
  void interrupt(EngineerId engineer, double now);

  DesResult run(double horizon);

  ItemId allocate_id() { return next_id_++; }

  const WorkQueue& team_queue() const { return team_; }
  const WorkQueue& individual_queue(EngineerId e) const {
    return individual_.at(e);
  }
  const Engineer& engineer(EngineerId e) const { return engineers_.at(e); }
  const WorkItem* in_service(EngineerId e) const;
  // Service end time of the current assignment, if it will complete.
  std::optional<double> scheduled_completion(EngineerId e) const;
  const EventLog& log() const { return log_; }
  const DesTotals& totals() const { return stats_.totals; }
  std::size_t engineer_count() const { return engineers_.size(); }

 private:
  struct Service {
    std::optional<WorkItem> item;
    double started = 0.0;
    double hours_per_day = kHoursPerDay;
    std::optional<double> completes_at;
    std::uint64_t token = 0;
  };

  bool can_take(EngineerId e, const WorkItem& item) const;
  int load(EngineerId e) const;
  bool has_free_engineer() const;

  void start_service(EngineerId e, WorkItem item, double now);
  WorkItem stop_service(EngineerId e, double now, StopReason reason);
  void assign(EngineerId e, WorkItem item, double now);
  void dead_letter(WorkItem item, double now);
  void retire(WorkItem item);
  void record_arrival(const WorkItem& item);

  void handle(const ScheduledEvent& ev);
  void sample_queues(int day);
  void check_conservation() const;
  void accumulate_area(double now);

  DesConfig config_;
  DesModifiers modifiers_;
  DesOptions options_;
  RandomStream rng_;
  EventCalendar calendar_;
  WorkQueue team_;
  std::vector<WorkQueue> individual_;
  std::vector<Engineer> engineers_;
  std::vector<Service> service_;
  EventLog log_;
  DesStats stats_;
  std::vector<WorkItem> kept_items_;
  ItemId next_id_ = 1;
  double horizon_ = 0.0;

  std::int64_t in_system_ = 0;
  double area_in_system_ = 0.0;
  double area_in_queue_ = 0.0;
  double last_change_ = 0.0;
};

DesResult run_des(const DesConfig& config, const DesModifiers& modifiers,
                  std::uint64_t seed, double horizon, DesOptions options = {});

// Seed of replication `r` within a run seeded with `seed`. Replication 0
// uses `seed` itself.
std::uint64_t replication_seed(std::uint64_t seed, int r);

// Independent replications, run concurrently and merged in index order.
// The returned log and items belong to replication 0.
DesResult run_replications(const DesConfig& config,
                           const DesModifiers& modifiers, std::uint64_t seed,
                           double horizon, int replications,
                           DesOptions options = {});

}  // namespace teamsim::des
