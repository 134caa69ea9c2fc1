#pragma once

#include <functional>

#include "schedbal/solvers.hpp"

namespace schedbal::detail {

// Invoked after every applied move with the new combined objective.
using StepCallback = std::function<void(std::int64_t combined)>;

Schedule local_improve_traced(const ProblemInstance& inst, const Schedule& sched, std::uint64_t seed,
                              const StepCallback& on_step);

}  // namespace schedbal::detail
