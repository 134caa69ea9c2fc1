#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "schedbal/bqp_qubo.hpp"
#include "schedbal/decompose.hpp"
#include "schedbal/instance.hpp"
#include "schedbal/schedule.hpp"

namespace schedbal {

enum class MoveSet { bitflip, bitflip_slotswap };

struct SolverConfig {
  std::uint64_t seed = 0;
  // Soft deadline in seconds, checked between sweeps. Results are only
  // reproducible when the deadline never fires.
  std::optional<double> time_budget;
  std::int64_t sweeps = 1000;  // one sweep = n_vars flip attempts
  int restarts = 4;
  std::optional<double> t_initial;  // default: largest |QUBO coefficient|
  double t_final = 0.1;
  MoveSet moves = MoveSet::bitflip;

  // Throws Error when sweeps/restarts/temperatures are out of range.
  void validate() const;
};

// `seconds` is wall-clock time since the solver started; `work` is a
// deterministic progress counter (sweeps or improvement steps) usable as a
// reproducible clock.
struct TracePoint {
  double seconds = 0.0;
  std::int64_t work = 0;
  std::int64_t energy = 0;
};

struct SolveResult {
  Schedule schedule;
  ObjectiveBreakdown breakdown;
  // Best combined objective of a complete feasible schedule over time;
  // non-increasing.
  std::vector<TracePoint> best_energy_trace;
  double wall_time = 0.0;
  bool feasible = false;
  std::string solver_name;
  // Model construction time, not included in wall_time.
  double build_seconds = 0.0;
  // Raw annealing traces (QUBO energies) per decomposition leaf.
  std::vector<std::vector<TracePoint>> leaf_traces;
};

class SearchSpaceTooLarge : public Error {
 public:
  using Error::Error;
};

inline constexpr std::int64_t kBruteForceLimit = 10'000'000;

// Number of distinct feasible schedules, counting stops once it exceeds
// `cap` (the returned value is then cap + 1).
std::int64_t count_schedules(const ProblemInstance& inst, std::int64_t cap = kBruteForceLimit);

// Exact minimum of the combined objective. Ties go to the lexicographically
// smallest schedule. Throws SearchSpaceTooLarge above kBruteForceLimit
// schedules.
SolveResult brute_force(const ProblemInstance& inst);

struct AnnealResult {
  Bits bits;
  std::int64_t energy = 0;
  std::vector<TracePoint> trace;  // best QUBO energy so far
  std::int64_t flips = 0;         // flip attempts performed
};

// Called at the end of every sweep that improved the best energy.
using BestCallback = std::function<void(const Bits& bits, const TracePoint& point)>;

// Metropolis single-flip sweeps with geometric cooling; returns the best
// bitstring seen over all restarts.
AnnealResult simulated_annealing(const QuboModel& qubo, const SolverConfig& config,
                                 const BestCallback& on_best = {});

// Steepest descent over adjacent swaps, relocations to any eligible
// machine/position, and segment reversals. Throws ScheduleError on an
// infeasible input.
Schedule local_improve(const ProblemInstance& inst, const Schedule& sched, std::uint64_t seed);

// Annealing on the whole QUBO, repair decode, then local improvement.
SolveResult anneal_solve(const ProblemInstance& inst, const SolverConfig& config);

// recursive_decompose -> per leaf anneal + repair -> merge -> local_improve.
SolveResult hybrid_solve(const ProblemInstance& inst, const SolverConfig& config, std::int64_t max_vars = 10000);

}  // namespace schedbal
