#include <algorithm>
#include <numeric>

#include "moves.hpp"
#include "schedbal/random.hpp"
#include "solver_internal.hpp"

namespace schedbal {

namespace detail {

namespace {

struct Move {
  enum class Kind { none, swap, relocate, reverse } kind = Kind::none;
  MachineId m = 0;
  std::size_t a = 0;      // swap/reverse: first position; relocate: source position
  std::size_t b = 0;      // reverse: last position; relocate: target position
  MachineId target = 0;   // relocate: target machine
  std::int64_t delta = 0;
};

class Descent {
 public:
  Descent(const ProblemInstance& inst, Schedule sched, std::uint64_t seed)
      : inst_(inst), s_(std::move(sched)), load_(inst.n_machines + 1, 0), order_(inst.n_machines) {
    for (MachineId m = 1; m <= inst.n_machines; ++m)
      for (JobId j : s_.on(m)) load_[m] += inst.p(j, m);
    std::iota(order_.begin(), order_.end(), 1);
    if (seed != 0) {
      Rng rng = make_rng(seed, 0x15);
      for (std::size_t k = order_.size(); k > 1; --k)
        std::swap(order_[k - 1], order_[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(k) - 1))]);
    }
    combined_ = evaluate(inst, s_).combined;
  }

  Schedule run(const StepCallback& on_step) {
    for (;;) {
      const Move mv = best_move();
      if (mv.kind == Move::Kind::none) break;
      apply(mv);
      combined_ += mv.delta;
      if (on_step) on_step(combined_);
    }
    return std::move(s_);
  }

 private:
  void consider(Move& best, const Move& cand) const {
    if (cand.delta < best.delta) best = cand;
  }

  Move best_move() {
    const auto& w = inst_.weights;
    Move best;  // delta 0: only strict improvements are taken
    std::vector<std::int64_t> fwd, bwd;
    for (MachineId m : order_) {
      const auto& seq = s_.on(m);
      const std::size_t n = seq.size();
      // forward/backward setup prefix sums along the sequence
      fwd.assign(n, 0);
      bwd.assign(n, 0);
      for (std::size_t k = 1; k < n; ++k) {
        fwd[k] = fwd[k - 1] + inst_.s(seq[k - 1], seq[k]);
        bwd[k] = bwd[k - 1] + inst_.s(seq[k], seq[k - 1]);
      }
      for (std::size_t k = 0; k + 1 < n; ++k) {
        const JobId prev = k > 0 ? seq[k - 1] : 0;
        const JobId next = k + 2 < n ? seq[k + 2] : 0;
        const JobId a = seq[k], b = seq[k + 1];
        const std::int64_t ds = inst_.s(prev, b) + inst_.s(b, a) + inst_.s(a, next) - inst_.s(prev, a) -
                                inst_.s(a, b) - inst_.s(b, next);
        consider(best, {Move::Kind::swap, m, k, k + 1, 0, w.setup * ds});
      }
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = k + 2; l < n; ++l) {
          const JobId prev = k > 0 ? seq[k - 1] : 0;
          const JobId next = l + 1 < n ? seq[l + 1] : 0;
          const std::int64_t before = inst_.s(prev, seq[k]) + (fwd[l] - fwd[k]) + inst_.s(seq[l], next);
          const std::int64_t after = inst_.s(prev, seq[l]) + (bwd[l] - bwd[k]) + inst_.s(seq[k], next);
          consider(best, {Move::Kind::reverse, m, k, l, 0, w.setup * (after - before)});
        }
    }
    std::vector<JobId> reduced;
    for (MachineId m : order_) {
      const auto& seq = s_.on(m);
      for (std::size_t k = 0; k < seq.size(); ++k) {
        const JobId j = seq[k];
        const std::int64_t removal = removal_delta(inst_, m, seq, load_[m], k);
        reduced = seq;
        reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(k));
        for (MachineId to : order_) {
          if (!inst_.is_eligible(j, to)) continue;
          if (to == m) {
            const std::int64_t reduced_load = load_[m] - inst_.p(j, m);
            for (std::size_t pos = 0; pos <= reduced.size(); ++pos) {
              if (pos == k) continue;
              const std::int64_t d = removal + insertion_delta(inst_, m, reduced, reduced_load, j, pos);
              consider(best, {Move::Kind::relocate, m, k, pos, to, d});
            }
          } else {
            const auto& dst = s_.on(to);
            for (std::size_t pos = 0; pos <= dst.size(); ++pos) {
              const std::int64_t d = removal + insertion_delta(inst_, to, dst, load_[to], j, pos);
              consider(best, {Move::Kind::relocate, m, k, pos, to, d});
            }
          }
        }
      }
    }
    return best;
  }

  void apply(const Move& mv) {
    auto& seq = s_.on(mv.m);
    switch (mv.kind) {
      case Move::Kind::swap:
        std::swap(seq[mv.a], seq[mv.a + 1]);
        break;
      case Move::Kind::reverse:
        std::reverse(seq.begin() + static_cast<std::ptrdiff_t>(mv.a), seq.begin() + static_cast<std::ptrdiff_t>(mv.b) + 1);
        break;
      case Move::Kind::relocate: {
        const JobId j = seq[mv.a];
        seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(mv.a));
        load_[mv.m] -= inst_.p(j, mv.m);
        auto& dst = s_.on(mv.target);
        dst.insert(dst.begin() + static_cast<std::ptrdiff_t>(mv.b), j);
        load_[mv.target] += inst_.p(j, mv.target);
        break;
      }
      case Move::Kind::none:
        break;
    }
  }

  const ProblemInstance& inst_;
  Schedule s_;
  std::vector<std::int64_t> load_;
  std::vector<MachineId> order_;
  std::int64_t combined_ = 0;
};

}  // namespace

Schedule local_improve_traced(const ProblemInstance& inst, const Schedule& sched, std::uint64_t seed,
                              const StepCallback& on_step) {
  if (auto v = validate_schedule(inst, sched); !v.empty())
    throw ScheduleError("infeasible schedule: " + v.front().to_string());
  return Descent(inst, sched, seed).run(on_step);
}

}  // namespace detail

Schedule local_improve(const ProblemInstance& inst, const Schedule& sched, std::uint64_t seed) {
  return detail::local_improve_traced(inst, sched, seed, {});
}

}  // namespace schedbal
