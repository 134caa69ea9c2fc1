#pragma once

// Incremental objective changes for edits of a single machine sequence.

#include <cstdint>
#include <vector>

#include "schedbal/instance.hpp"

namespace schedbal::detail {

// Change of the combined objective when job j is inserted before position
// `pos` of machine m's sequence `seq` (current processing load `load`).
inline std::int64_t insertion_delta(const ProblemInstance& inst, MachineId m, const std::vector<JobId>& seq,
                                    std::int64_t load, JobId j, std::size_t pos) {
  const JobId prev = pos > 0 ? seq[pos - 1] : 0;
  const JobId next = pos < seq.size() ? seq[pos] : 0;
  const std::int64_t ds = inst.s(prev, j) + inst.s(j, next) - inst.s(prev, next);
  const std::int64_t p = inst.p(j, m);
  const auto& w = inst.weights;
  return w.setup * ds + w.balance * (2 * load * p + p * p) - w.value * inst.v(j, m);
}

// Change when the job at position `pos` is removed.
inline std::int64_t removal_delta(const ProblemInstance& inst, MachineId m, const std::vector<JobId>& seq,
                                  std::int64_t load, std::size_t pos) {
  const JobId j = seq[pos];
  const JobId prev = pos > 0 ? seq[pos - 1] : 0;
  const JobId next = pos + 1 < seq.size() ? seq[pos + 1] : 0;
  const std::int64_t ds = inst.s(prev, next) - inst.s(prev, j) - inst.s(j, next);
  const std::int64_t p = inst.p(j, m);
  const auto& w = inst.weights;
  return w.setup * ds + w.balance * (p * p - 2 * load * p) + w.value * inst.v(j, m);
}

}  // namespace schedbal::detail
