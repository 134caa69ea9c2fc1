#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "schedbal/instance.hpp"
#include "schedbal/schedule.hpp"

namespace schedbal {

// Nodes are machines; the weight of (a, b) counts the jobs eligible on both.
struct MachineGraph {
  std::vector<MachineId> nodes;                // ascending
  std::vector<std::vector<std::int64_t>> weight;  // by node position, symmetric, zero diagonal

  int size() const { return static_cast<int>(nodes.size()); }
  std::int64_t w(MachineId a, MachineId b) const;
  int position(MachineId m) const;
};

struct Partition {
  std::vector<MachineId> side_a;  // ascending
  std::vector<MachineId> side_b;
  std::int64_t cut_weight = 0;
};

MachineGraph build_machine_graph(const ProblemInstance& inst);

std::int64_t cut_weight(const MachineGraph& g, const std::vector<MachineId>& side_a);

// Balanced bisection by Kernighan-Lin passes. The start split alternates
// machines sorted by id and then applies seed-driven random swaps. Throws
// Error for graphs with fewer than two nodes.
Partition kernighan_lin_bisect(const MachineGraph& g, std::uint64_t seed);

// A sub-instance together with the ids its local machines and jobs had in
// the root instance: local id k maps to machine_ids[k-1] / job_ids[k-1].
struct SubProblem {
  ProblemInstance instance;
  std::vector<MachineId> machine_ids;
  std::vector<JobId> job_ids;
};

// Root problem wrapped as a SubProblem with identity id maps.
SubProblem whole_problem(const ProblemInstance& inst);

// Each job goes to the side holding its highest-value eligible machine
// (ties: lowest machine id); its eligibility is cut down to that side. A
// side may receive no jobs, in which case its instance has n_jobs == 0.
std::pair<SubProblem, SubProblem> split_instance(const SubProblem& parent, const Partition& part);
std::pair<SubProblem, SubProblem> split_instance(const ProblemInstance& inst, const Partition& part);

struct DecomposeOptions {
  std::int64_t max_vars = 10000;
  std::uint64_t seed = 0;
};

// Leaves have count_variables <= max_vars or fewer than 4 machines. Leaves
// without jobs are dropped; their machines stay idle in the merged schedule.
std::vector<SubProblem> recursive_decompose(const ProblemInstance& inst, const DecomposeOptions& options = {});

// Union of part schedules in root ids. Throws Error if parts share machines
// or the jobs are not covered exactly once.
Schedule merge_solutions(const ProblemInstance& root, const std::vector<std::pair<SubProblem, Schedule>>& parts);

}  // namespace schedbal
