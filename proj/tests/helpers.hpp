#pragma once

#include <algorithm>

#include "schedbal/instance.hpp"
#include "schedbal/random.hpp"

namespace helpers {

using namespace schedbal;

// Makes job j eligible on machine m with the given processing time and value.
inline void allow(ProblemInstance& inst, JobId j, MachineId m, std::int64_t p, std::int64_t v) {
  auto& e = inst.eligible[j - 1];
  if (std::find(e.begin(), e.end(), m) == e.end()) {
    e.push_back(m);
    std::sort(e.begin(), e.end());
  }
  inst.processing[j - 1][m - 1] = p;
  inst.value[j - 1][m - 1] = v;
}

inline void set_setup(ProblemInstance& inst, JobId i, JobId j, std::int64_t s) { inst.setup[i - 1][j - 1] = s; }

// The running example: one machine, p = (3, 4), s_12 = 2, s_21 = 9, v = (5, 6).
inline ProblemInstance two_job_example(std::int64_t v1 = 5, std::int64_t v2 = 6) {
  ProblemInstance inst = ProblemInstance::with_shape(2, 1);
  allow(inst, 1, 1, 3, v1);
  allow(inst, 2, 1, 4, v2);
  set_setup(inst, 1, 2, 2);
  set_setup(inst, 2, 1, 9);
  return inst;
}

// Small instance with modest data ranges, for exhaustive checks.
inline ProblemInstance small_random(std::uint64_t seed, int jobs, int machines, double density) {
  GeneratorRanges r;
  r.processing_max = 9;
  r.setup_max = 6;
  r.value_max = 12;
  return generate_instance(jobs, machines, density, seed, r);
}

}  // namespace helpers
