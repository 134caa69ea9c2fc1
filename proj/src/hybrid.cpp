#include <algorithm>
#include <chrono>

#include "solver_internal.hpp"

namespace schedbal {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Appends a trace point only when it improves the last one.
void push_best(std::vector<TracePoint>& trace, const TracePoint& tp) {
  if (trace.empty() || tp.energy < trace.back().energy) trace.push_back(tp);
}

struct LeafOutcome {
  Schedule schedule;
  std::vector<TracePoint> trace;
};

// Anneal one (sub-)instance and decode with repair. When `full_trace` is
// set, feasible best bitstrings seen during annealing are reported into it
// on the solve clock (elapsed time minus model building).
LeafOutcome solve_leaf(const ProblemInstance& inst, const SolverConfig& cfg, double& build_seconds,
                       std::vector<TracePoint>* full_trace, Clock::time_point t0, std::int64_t& work) {
  const auto b0 = Clock::now();
  const BqpModel bqp = build_bqp(inst);
  const QuboModel qubo = build_qubo(bqp, derive_penalties(inst));
  build_seconds += since(b0);

  const double offset = since(t0) - build_seconds;
  const std::int64_t work0 = work;
  BestCallback cb;
  if (full_trace)
    cb = [&](const Bits& bits, const TracePoint& tp) {
      if (bqp.feasible(bits)) push_best(*full_trace, {offset + tp.seconds, work0 + tp.work, tp.energy});
    };
  AnnealResult ar = simulated_annealing(qubo, cfg, cb);
  if (!ar.trace.empty()) work += ar.trace.back().work;
  for (auto& tp : ar.trace) tp.seconds += offset;
  DecodeResult dec = decode_bitstring(bqp, ar.bits, true);
  return {std::move(dec.schedule), std::move(ar.trace)};
}

SolveResult finish(const ProblemInstance& inst, const Schedule& start_sched, const SolverConfig& cfg,
                   SolveResult r, Clock::time_point t0, std::int64_t work) {
  const auto clock = [&] { return since(t0) - r.build_seconds; };
  push_best(r.best_energy_trace, {clock(), ++work, evaluate(inst, start_sched).combined});
  r.schedule = detail::local_improve_traced(inst, start_sched, cfg.seed, [&](std::int64_t combined) {
    push_best(r.best_energy_trace, {clock(), ++work, combined});
  });
  r.breakdown = evaluate(inst, r.schedule);
  r.feasible = validate_schedule(inst, r.schedule).empty();
  r.wall_time = clock();
  return r;
}

}  // namespace

SolveResult anneal_solve(const ProblemInstance& inst, const SolverConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  SolveResult r;
  r.solver_name = "sa";
  std::int64_t work = 0;
  LeafOutcome leaf = solve_leaf(inst, config, r.build_seconds, &r.best_energy_trace, t0, work);
  r.leaf_traces.push_back(std::move(leaf.trace));
  return finish(inst, leaf.schedule, config, std::move(r), t0, work);
}

SolveResult hybrid_solve(const ProblemInstance& inst, const SolverConfig& config, std::int64_t max_vars) {
  config.validate();
  const auto t0 = Clock::now();
  SolveResult r;
  r.solver_name = "hybrid";

  const auto b0 = Clock::now();
  const std::vector<SubProblem> leaves = recursive_decompose(inst, {max_vars, config.seed});
  r.build_seconds += since(b0);

  std::int64_t total_vars = 0;
  for (const auto& leaf : leaves) total_vars += count_variables(leaf.instance);

  const bool single = leaves.size() == 1 && leaves.front().instance.n_machines == inst.n_machines &&
                      leaves.front().instance.n_jobs == inst.n_jobs;
  std::vector<std::pair<SubProblem, Schedule>> parts;
  std::int64_t work = 0;
  std::int64_t vars_done = 0;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    SolverConfig leaf_cfg = config;
    leaf_cfg.seed = config.seed ^ k;
    const std::int64_t leaf_vars = count_variables(leaves[k].instance);
    if (config.time_budget && total_vars > 0) {
      // Leaves share the budget in proportion to their size.
      const double share = *config.time_budget * static_cast<double>(vars_done + leaf_vars) / static_cast<double>(total_vars);
      leaf_cfg.time_budget = std::max(0.0, share - (since(t0) - r.build_seconds));
    }
    vars_done += leaf_vars;
    LeafOutcome out = solve_leaf(leaves[k].instance, leaf_cfg, r.build_seconds,
                                 single ? &r.best_energy_trace : nullptr, t0, work);
    r.leaf_traces.push_back(std::move(out.trace));
    parts.emplace_back(leaves[k], std::move(out.schedule));
  }
  const Schedule merged = merge_solutions(inst, parts);
  return finish(inst, merged, config, std::move(r), t0, work);
}

}  // namespace schedbal
