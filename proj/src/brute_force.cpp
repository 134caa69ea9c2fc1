#include <algorithm>
#include <chrono>
#include <map>

#include "schedbal/solvers.hpp"

namespace schedbal {

namespace {

struct CountState {
  const ProblemInstance& inst;
  std::int64_t cap;
  std::int64_t total = 0;
  std::vector<std::int64_t> on_machine;
};

// Sum over assignments of prod_m k_m!, built one job at a time: adding a job
// to a machine holding k jobs multiplies the orderings by k + 1.
void count_rec(CountState& st, JobId j, std::int64_t orderings) {
  if (st.total > st.cap) return;
  if (j > st.inst.n_jobs) {
    st.total += orderings;
    return;
  }
  for (MachineId m : st.inst.eligible_machines(j)) {
    const std::int64_t k = ++st.on_machine[m];
    const std::int64_t next = orderings > st.cap ? st.cap + 1 : std::min(orderings * k, st.cap + 1);
    count_rec(st, j + 1, next);
    --st.on_machine[m];
    if (st.total > st.cap) return;
  }
}

struct BestOrder {
  std::int64_t setup;
  std::vector<JobId> seq;
};

class BruteForce {
 public:
  explicit BruteForce(const ProblemInstance& inst) : inst_(inst), assign_(inst.n_jobs + 1, 0) {}

  Schedule run() {
    search(1);
    return best_;
  }

 private:
  const BestOrder& best_order(MachineId m, const std::vector<JobId>& jobs) {
    auto key = std::make_pair(m, jobs);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<JobId> perm = jobs;  // ascending, so the first minimum is the lexicographically smallest
    BestOrder best{INT64_MAX, {}};
    do {
      std::int64_t s = 0;
      for (std::size_t k = 1; k < perm.size(); ++k) s += inst_.s(perm[k - 1], perm[k]);
      if (s < best.setup) best = {s, perm};
    } while (std::next_permutation(perm.begin(), perm.end()));
    return memo_.emplace(std::move(key), std::move(best)).first->second;
  }

  void evaluate_assignment() {
    const auto& w = inst_.weights;
    Schedule cand = Schedule::empty(inst_.n_machines);
    for (JobId j = 1; j <= inst_.n_jobs; ++j) cand.on(assign_[j]).push_back(j);
    std::int64_t total = 0;
    for (MachineId m = 1; m <= inst_.n_machines; ++m) {
      auto& seq = cand.on(m);
      if (seq.empty()) continue;
      const BestOrder& order = best_order(m, seq);
      std::int64_t load = 0, value = 0;
      for (JobId j : seq) {
        load += inst_.p(j, m);
        value += inst_.v(j, m);
      }
      total += w.setup * order.setup + w.balance * load * load - w.value * value;
      seq = order.seq;
    }
    if (!found_ || total < best_value_ || (total == best_value_ && cand < best_)) {
      found_ = true;
      best_value_ = total;
      best_ = std::move(cand);
    }
  }

  void search(JobId j) {
    if (j > inst_.n_jobs) {
      evaluate_assignment();
      return;
    }
    for (MachineId m : inst_.eligible_machines(j)) {
      assign_[j] = m;
      search(j + 1);
    }
  }

  const ProblemInstance& inst_;
  std::vector<MachineId> assign_;
  std::map<std::pair<MachineId, std::vector<JobId>>, BestOrder> memo_;
  bool found_ = false;
  std::int64_t best_value_ = 0;
  Schedule best_;
};

}  // namespace

std::int64_t count_schedules(const ProblemInstance& inst, std::int64_t cap) {
  CountState st{inst, cap, 0, std::vector<std::int64_t>(inst.n_machines + 1, 0)};
  count_rec(st, 1, 1);
  return std::min(st.total, cap + 1);
}

SolveResult brute_force(const ProblemInstance& inst) {
  const auto start = std::chrono::steady_clock::now();
  const std::int64_t space = count_schedules(inst, kBruteForceLimit);
  if (space > kBruteForceLimit)
    throw SearchSpaceTooLarge("brute force search space exceeds " + std::to_string(kBruteForceLimit) + " schedules");

  SolveResult r;
  r.solver_name = "brute";
  r.schedule = BruteForce(inst).run();
  r.breakdown = evaluate(inst, r.schedule);
  r.feasible = true;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.best_energy_trace.push_back({r.wall_time, 1, r.breakdown.combined});
  return r;
}

}  // namespace schedbal
