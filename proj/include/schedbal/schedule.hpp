#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "schedbal/instance.hpp"

namespace schedbal {

class ScheduleError : public Error {
 public:
  using Error::Error;
};

// Ordered job sequence per machine; sequences[m-1] belongs to machine m.
struct Schedule {
  std::vector<std::vector<JobId>> sequences;

  static Schedule empty(int n_machines) { return Schedule{std::vector<std::vector<JobId>>(n_machines)}; }
  const std::vector<JobId>& on(MachineId m) const { return sequences[m - 1]; }
  std::vector<JobId>& on(MachineId m) { return sequences[m - 1]; }

  friend bool operator==(const Schedule&, const Schedule&) = default;
  friend auto operator<=>(const Schedule&, const Schedule&) = default;
};

struct ObjectiveBreakdown {
  std::int64_t setup_total = 0;
  std::int64_t balance_sum_sq = 0;
  std::int64_t value_total = 0;
  std::int64_t combined = 0;

  friend bool operator==(const ObjectiveBreakdown&, const ObjectiveBreakdown&) = default;
};

std::vector<Violation> validate_schedule(const ProblemInstance& inst, const Schedule& sched);

// Throws ScheduleError if the schedule is infeasible.
ObjectiveBreakdown evaluate(const ProblemInstance& inst, const Schedule& sched);

// Objective of one machine's sequence alone; the combined objective is the
// sum of these over machines. No feasibility checks.
struct MachineCost {
  std::int64_t setup = 0;
  std::int64_t load = 0;  // t_m, processing only
  std::int64_t value = 0;
};
MachineCost machine_cost(const ProblemInstance& inst, MachineId m, const std::vector<JobId>& seq);
std::int64_t combined_of(const ObjectiveWeights& w, const MachineCost& c);

// Change of balance_sum_sq when `job` moves from machine `from` (load
// `from_load`) to machine `to` (load `to_load`).
std::int64_t relocation_balance_delta(const ProblemInstance& inst, JobId job, MachineId from,
                                      std::int64_t from_load, MachineId to, std::int64_t to_load);

struct GanttBlock {
  enum class Kind { setup, processing };
  Kind kind;
  JobId job;
  std::int64_t start;
  std::int64_t end;

  friend bool operator==(const GanttBlock&, const GanttBlock&) = default;
};

// timelines[m-1] holds machine m's blocks in time order, starting at 0.
struct GanttTimeline {
  std::vector<std::vector<GanttBlock>> machines;
};

// Zero-length setup blocks are omitted, so the first job on every machine
// starts with its processing block at time 0.
GanttTimeline to_gantt(const ProblemInstance& inst, const Schedule& sched);
std::string gantt_to_json(const GanttTimeline& g);
// 4 px per time unit horizontally, one row per machine.
std::string gantt_to_svg(const GanttTimeline& g);

// Schedule documents: {"machines": [{"machine": 1, "jobs": [2, 1]}, ...]}.
std::string serialize_schedule(const Schedule& sched);
Schedule parse_schedule(std::string_view text, int n_machines);

}  // namespace schedbal
