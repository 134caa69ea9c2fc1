#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "schedbal/detail/flip_state.hpp"
#include "schedbal/random.hpp"
#include "schedbal/solvers.hpp"

namespace schedbal {

void SolverConfig::validate() const {
  if (sweeps < 1) throw Error("sweeps must be at least 1");
  if (restarts < 1) throw Error("restarts must be at least 1");
  if (!(t_final > 0.0)) throw Error("t_final must be positive");
  if (t_initial && *t_initial < t_final) throw Error("t_initial must be at least t_final");
  if (time_budget && *time_budget < 0.0) throw Error("time_budget must be nonnegative");
}

namespace {

using Clock = std::chrono::steady_clock;

template <class Coeff>
class Annealer {
 public:
  Annealer(const QuboModel& q, const SolverConfig& cfg, const BestCallback& on_best)
      : q_(q), cfg_(cfg), on_best_(on_best), fs_(q), n_(q.n_vars) {}

  AnnealResult run() {
    AnnealResult out;
    start_ = Clock::now();
    const double t0 = cfg_.t_initial.value_or(std::max(static_cast<double>(q_.max_abs_coefficient()), cfg_.t_final));
    const double t1 = cfg_.t_final;
    if (n_ == 0) {
      out.energy = q_.offset;
      out.trace.push_back({elapsed(), 0, out.energy});
      return out;
    }
    bool have_best = false;
    for (int r = 0; r < cfg_.restarts && !stop_; ++r) {
      Rng rng = make_rng(cfg_.seed, static_cast<std::uint64_t>(r));
      init_state(rng);
      Bits run_best = fs_.bits();
      std::int64_t run_best_e = fs_.energy();
      for (std::int64_t sweep = 0; sweep < cfg_.sweeps; ++sweep) {
        if (cfg_.time_budget && elapsed() >= *cfg_.time_budget) {
          stop_ = true;
          break;
        }
        const double frac = cfg_.sweeps > 1 ? static_cast<double>(sweep) / static_cast<double>(cfg_.sweeps - 1) : 1.0;
        const double temp = t0 * std::pow(t1 / t0, frac);
        sync_ = fs_.bits();
        log_.clear();
        std::size_t best_mark = 0;
        bool improved = false;
        for (int i = 0; i < n_; ++i) {
          if (accept(fs_.delta(i), temp, rng)) {
            fs_.flip(i);
            log_.push_back(i);
            if (fs_.energy() < run_best_e) {
              run_best_e = fs_.energy();
              best_mark = log_.size();
              improved = true;
            }
          }
        }
        out.flips += n_;
        if (cfg_.moves == MoveSet::bitflip_slotswap) {
          const int attempts = slot_moves(temp, rng, run_best_e, best_mark, improved);
          out.flips += attempts;
        }
        ++work_;
        if (improved) {
          run_best = sync_;
          for (std::size_t k = 0; k < best_mark; ++k) run_best[log_[k]] ^= 1;
          if (!have_best || run_best_e < out.energy || (run_best_e == out.energy && run_best < out.bits)) {
            have_best = true;
            out.energy = run_best_e;
            out.bits = run_best;
            const TracePoint tp{elapsed(), work_, out.energy};
            out.trace.push_back(tp);
            if (on_best_) on_best_(out.bits, tp);
          }
        }
      }
      if (!have_best || run_best_e < out.energy || (run_best_e == out.energy && run_best < out.bits)) {
        have_best = true;
        out.energy = run_best_e;
        out.bits = run_best;
        const TracePoint tp{elapsed(), work_, out.energy};
        out.trace.push_back(tp);
        if (on_best_) on_best_(out.bits, tp);
      }
    }
    return out;
  }

 private:
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  void init_state(Rng& rng) {
    Bits x(n_, 0);
    for (int i = 0; i < n_; ++i) x[i] = static_cast<std::uint8_t>(rng() & 1);
    fs_.reset(std::move(x));
  }

  static bool accept(std::int64_t d, double temp, Rng& rng) {
    if (d <= 0) return true;
    const double z = static_cast<double>(d) / temp;
    if (z > 50.0) return false;
    return uniform_real(rng) < std::exp(-z);
  }

  int lit_in_slot(MachineId m, int t, int& count) const {
    const auto& idx = q_.var_index;
    int found = -1;
    count = 0;
    for (int i = idx.slot_begin(m, t); i < idx.slot_end(m, t); ++i)
      if (fs_.bits()[i]) {
        found = i;
        ++count;
      }
    return found;
  }

  // Moves a job to another slot of its machine, or swaps the jobs of two
  // slots, as one compound Metropolis step.
  int slot_moves(double temp, Rng& rng, std::int64_t& run_best_e, std::size_t& best_mark, bool& improved) {
    const auto& idx = q_.var_index;
    std::vector<MachineId> machines;
    int total_slots = 0;
    for (MachineId m = 1; m <= idx.n_machines(); ++m)
      if (idx.slots(m) >= 2) {
        machines.push_back(m);
        total_slots += idx.slots(m);
      }
    if (machines.empty()) return 0;
    int flips[4];
    for (int a = 0; a < total_slots; ++a) {
      const MachineId m = machines[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(machines.size()) - 1))];
      int t1 = static_cast<int>(uniform_int(rng, 1, idx.slots(m)));
      int t2 = static_cast<int>(uniform_int(rng, 1, idx.slots(m) - 1));
      if (t2 >= t1) ++t2;
      int c1 = 0, c2 = 0;
      const int v1 = lit_in_slot(m, t1, c1);
      const int v2 = lit_in_slot(m, t2, c2);
      if (c1 != 1 || c2 > 1) continue;
      const JobId j1 = idx[v1].job;
      int nf = 0;
      if (c2 == 0) {
        flips[nf++] = v1;
        flips[nf++] = idx.index(m, t2, j1);
      } else {
        const JobId j2 = idx[v2].job;
        if (j1 == j2) continue;
        flips[nf++] = v1;
        flips[nf++] = v2;
        flips[nf++] = idx.index(m, t1, j2);
        flips[nf++] = idx.index(m, t2, j1);
      }
      std::int64_t d = 0;
      for (int k = 0; k < nf; ++k) d += fs_.flip(flips[k]);
      if (accept(d, temp, rng)) {
        for (int k = 0; k < nf; ++k) log_.push_back(flips[k]);
        if (fs_.energy() < run_best_e) {
          run_best_e = fs_.energy();
          best_mark = log_.size();
          improved = true;
        }
      } else {
        for (int k = nf - 1; k >= 0; --k) fs_.flip(flips[k]);
      }
    }
    return total_slots;
  }

  const QuboModel& q_;
  const SolverConfig& cfg_;
  const BestCallback& on_best_;
  detail::FlipState<Coeff> fs_;
  int n_;
  Bits sync_;
  std::vector<int> log_;
  std::int64_t work_ = 0;
  bool stop_ = false;
  Clock::time_point start_;
};

}  // namespace

AnnealResult simulated_annealing(const QuboModel& qubo, const SolverConfig& config, const BestCallback& on_best) {
  config.validate();
  if (qubo.max_abs_coefficient() <= std::numeric_limits<std::int32_t>::max())
    return Annealer<std::int32_t>(qubo, config, on_best).run();
  return Annealer<std::int64_t>(qubo, config, on_best).run();
}

}  // namespace schedbal
