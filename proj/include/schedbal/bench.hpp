#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "schedbal/instance.hpp"
#include "schedbal/solvers.hpp"

namespace schedbal {

// 100 * (candidate - reference) / |reference|; positive means the candidate
// is worse under minimization. Throws Error for a zero reference.
double deviation_pct(double candidate, double reference);

// Earliest time whose energy is <= target, or nullopt if never reached.
// The trace is (time, energy) pairs; throws Error unless time is
// non-decreasing and energy non-increasing.
std::optional<double> time_to_target(std::span<const std::pair<double, double>> trace, double target);

enum class SolverKind { brute, sa, hybrid };

struct SolverSpec {
  std::string label;
  SolverKind kind = SolverKind::sa;
  SolverConfig config;  // seed is overridden per run
  std::int64_t max_vars = 10000;
};

// JSON array of {"label", "solver": "brute"|"sa"|"hybrid", and optional
// "sweeps", "restarts", "t_initial", "t_final", "time_budget", "max_vars",
// "moves": "bitflip"|"bitflip+slotswap"}.
std::vector<SolverSpec> parse_solver_specs(std::string_view text);

SolveResult run_solver(const ProblemInstance& inst, const SolverSpec& spec, std::uint64_t seed);

struct NamedInstance {
  std::string id;
  ProblemInstance instance;
};

struct BenchOptions {
  bool include_build = false;
  // Report the deterministic work counter instead of wall-clock time, so
  // repeated runs produce identical output.
  bool deterministic_clock = false;
  int jobs = 1;
};

struct BenchRecord {
  std::string instance;
  int n_jobs = 0;
  int n_machines = 0;
  std::int64_t n_vars_bqp = 0;
  std::int64_t n_vars_mip = 0;
  std::string solver;
  std::uint64_t seed = 0;
  std::optional<double> budget_s;
  std::int64_t objective = 0;
  double wall_s = 0.0;
  bool feasible = false;
  std::vector<std::pair<double, double>> trace;  // on the reporting clock
};

struct BenchFailure {
  std::string instance;
  std::string solver;
  std::uint64_t seed = 0;
  std::string message;
};

struct BenchReport {
  std::vector<BenchRecord> records;  // instance-major, then solver, then seed
  std::vector<BenchFailure> failures;
  bool deterministic_clock = false;
};

BenchReport run_benchmark(const std::vector<NamedInstance>& instances, const std::vector<SolverSpec>& solvers,
                          const std::vector<std::uint64_t>& seeds, const BenchOptions& options = {});

// Header: instance,jobs,machines,vars_bqp,vars_mip,solver,seed,budget_s,objective,wall_s,feasible
std::string records_to_csv(const BenchReport& report);

// Per instance: the best known objective, every run's deviation from it,
// and each run's time to reach every other solver's final objective.
std::string summary_to_json(const BenchReport& report);

}  // namespace schedbal
