#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "schedbal/instance.hpp"
#include "schedbal/schedule.hpp"

namespace schedbal {

using Bits = std::vector<std::uint8_t>;

// How many positions each machine gets.
enum class SlotRule {
  truncated,  // |T_m| = number of jobs eligible on m
  full,       // |T_m| = J
};

// x_{m,t,j}: job j is the t-th job on machine m (t is 1-based).
struct BqpVar {
  MachineId machine;
  int slot;
  JobId job;

  friend bool operator==(const BqpVar&, const BqpVar&) = default;
};

// Bijection between (machine, slot, job) triples and contiguous indices.
// Layout is machine-major, then slot, then the job's rank among the jobs
// eligible on that machine, so every (machine, slot) group is a contiguous
// index range.
class VarIndex {
 public:
  VarIndex() = default;
  VarIndex(const ProblemInstance& inst, SlotRule rule);

  int size() const { return static_cast<int>(vars_.size()); }
  const BqpVar& operator[](int i) const { return vars_[i]; }
  const std::vector<BqpVar>& vars() const { return vars_; }

  // -1 when (m, t, j) has no variable.
  int index(MachineId m, int t, JobId j) const;
  int slots(MachineId m) const { return slots_[m - 1]; }
  const std::vector<JobId>& jobs_on(MachineId m) const { return jobs_[m - 1]; }
  int machine_begin(MachineId m) const { return base_[m - 1]; }
  int machine_end(MachineId m) const { return base_[m]; }
  int slot_begin(MachineId m, int t) const { return base_[m - 1] + (t - 1) * width(m); }
  int slot_end(MachineId m, int t) const { return slot_begin(m, t) + width(m); }
  // Variables of job j, ascending.
  const std::vector<int>& job_vars(JobId j) const { return job_vars_[j - 1]; }
  int n_machines() const { return static_cast<int>(slots_.size()); }
  int n_jobs() const { return static_cast<int>(job_vars_.size()); }

 private:
  int width(MachineId m) const { return static_cast<int>(jobs_[m - 1].size()); }

  std::vector<BqpVar> vars_;
  std::vector<int> base_;                  // size M + 1
  std::vector<int> slots_;
  std::vector<std::vector<JobId>> jobs_;   // per machine, ascending
  std::vector<std::vector<int>> rank_;     // [m-1][j-1] -> rank among jobs_[m-1], or -1
  std::vector<std::vector<int>> job_vars_;
};

// Raw (unweighted) values of the three constraint penalty expressions.
struct PenaltyTerms {
  std::int64_t once = 0;      // sum_j (sum_{m,t} x - 1)^2
  std::int64_t slot = 0;      // sum_{m,t} sum_{i != j} x_i x_j
  std::int64_t ordering = 0;  // sum_{m, t>=2} S_t (S_t - S_{t-1})

  bool zero() const { return once == 0 && slot == 0 && ordering == 0; }
};

// Position-based binary quadratic program. Objective and constraints are
// held symbolically; build_qubo expands them.
class BqpModel {
 public:
  BqpModel(const ProblemInstance& inst, SlotRule rule);

  const ProblemInstance& instance() const { return inst_; }
  const VarIndex& vars() const { return index_; }
  SlotRule slot_rule() const { return rule_; }
  int n_vars() const { return index_.size(); }

  // Weighted setup + balance - value for an arbitrary bitstring.
  std::int64_t objective(std::span<const std::uint8_t> bits) const;
  PenaltyTerms penalties(std::span<const std::uint8_t> bits) const;
  // All three constraint families hold.
  bool feasible(std::span<const std::uint8_t> bits) const { return penalties(bits).zero(); }

 private:
  ProblemInstance inst_;
  SlotRule rule_;
  VarIndex index_;
};

BqpModel build_bqp(const ProblemInstance& inst, SlotRule rule = SlotRule::truncated);

std::int64_t count_variables(const ProblemInstance& inst, SlotRule rule = SlotRule::truncated);

struct PenaltyWeights {
  std::int64_t lambda1 = 1;  // each job exactly once
  std::int64_t lambda2 = 1;  // at most one job per slot
  std::int64_t lambda3 = 1;  // no gaps in a machine's sequence
};

// lambda3 = w_setup s* + 1, lambda1 = max(w_setup s*, 2 w_balance J p_max^2,
// w_value c*) + 1, lambda2 = lambda1. Throws Error on 64-bit overflow.
PenaltyWeights derive_penalties(const ProblemInstance& inst);

// Unconstrained form: energy(x) = offset + sum_i linear[i] x_i
//                                 + sum_{i<j} Q_ij x_i x_j.
// The strictly upper-triangular part is stored row-compressed; the
// diagonal lives in `linear` (x^2 = x).
struct QuboModel {
  int n_vars = 0;
  std::vector<std::int64_t> linear;
  std::vector<std::int64_t> row_start;  // n_vars + 1 entries
  std::vector<std::uint32_t> cols;
  std::vector<std::int64_t> coeffs;
  std::int64_t offset = 0;
  VarIndex var_index;
  PenaltyWeights penalties;

  std::size_t n_quadratic() const { return coeffs.size(); }
  // Q_ij for i < j, linear[i] for i == j; order of arguments is irrelevant.
  std::int64_t coefficient(int i, int j) const;
  std::int64_t max_abs_coefficient() const;
};

QuboModel build_qubo(const BqpModel& bqp, const PenaltyWeights& penalties);

std::int64_t qubo_energy(const QuboModel& qubo, std::span<const std::uint8_t> bits);

// Header "# n_vars offset", then "i j coeff" per nonzero with i <= j,
// 0-based, linear terms as "i i coeff".
std::string export_qubo_text(const QuboModel& qubo);
void write_qubo_file(const QuboModel& qubo, const std::string& path);

// Throws Error if a machine holds more jobs than it has slots.
Bits encode_schedule(const BqpModel& bqp, const Schedule& sched);

struct DecodeResult {
  Schedule schedule;
  bool feasible = false;
};

// With repair, a lit variable is kept per job (highest value), remaining
// jobs are inserted greedily at the cheapest (machine, position), and slot
// gaps are compacted; the result is then always feasible.
DecodeResult decode_bitstring(const BqpModel& bqp, std::span<const std::uint8_t> bits, bool repair);

}  // namespace schedbal
