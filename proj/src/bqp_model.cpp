#include <algorithm>

#include "moves.hpp"
#include "schedbal/bqp_qubo.hpp"

namespace schedbal {

VarIndex::VarIndex(const ProblemInstance& inst, SlotRule rule) {
  const int M = inst.n_machines;
  const int J = inst.n_jobs;
  base_.assign(M + 1, 0);
  slots_.assign(M, 0);
  jobs_.assign(M, {});
  rank_.assign(M, std::vector<int>(J, -1));
  job_vars_.assign(J, {});
  for (MachineId m = 1; m <= M; ++m) {
    jobs_[m - 1] = inst.jobs_on(m);
    for (std::size_t r = 0; r < jobs_[m - 1].size(); ++r) rank_[m - 1][jobs_[m - 1][r] - 1] = static_cast<int>(r);
    const int k = static_cast<int>(jobs_[m - 1].size());
    slots_[m - 1] = rule == SlotRule::truncated ? k : (k > 0 ? J : 0);
    base_[m] = base_[m - 1] + slots_[m - 1] * k;
  }
  vars_.reserve(base_[M]);
  for (MachineId m = 1; m <= M; ++m)
    for (int t = 1; t <= slots_[m - 1]; ++t)
      for (JobId j : jobs_[m - 1]) {
        job_vars_[j - 1].push_back(static_cast<int>(vars_.size()));
        vars_.push_back({m, t, j});
      }
}

int VarIndex::index(MachineId m, int t, JobId j) const {
  if (m < 1 || m > n_machines() || j < 1 || j > n_jobs()) return -1;
  if (t < 1 || t > slots_[m - 1]) return -1;
  const int r = rank_[m - 1][j - 1];
  if (r < 0) return -1;
  return slot_begin(m, t) + r;
}

BqpModel::BqpModel(const ProblemInstance& inst, SlotRule rule) : inst_(inst), rule_(rule), index_(inst, rule) {}

BqpModel build_bqp(const ProblemInstance& inst, SlotRule rule) { return BqpModel(inst, rule); }

std::int64_t count_variables(const ProblemInstance& inst, SlotRule rule) {
  std::int64_t n = 0;
  for (MachineId m = 1; m <= inst.n_machines; ++m) {
    const std::int64_t k = static_cast<std::int64_t>(inst.jobs_on(m).size());
    n += (rule == SlotRule::truncated ? k : (k > 0 ? inst.n_jobs : 0)) * k;
  }
  return n;
}

std::int64_t BqpModel::objective(std::span<const std::uint8_t> bits) const {
  std::int64_t setup = 0, balance = 0, value = 0;
  std::vector<JobId> prev_lit, lit;
  for (MachineId m = 1; m <= inst_.n_machines; ++m) {
    std::int64_t load = 0;
    prev_lit.clear();
    for (int t = 1; t <= index_.slots(m); ++t) {
      lit.clear();
      for (int i = index_.slot_begin(m, t); i < index_.slot_end(m, t); ++i)
        if (bits[i]) lit.push_back(index_[i].job);
      for (JobId j : lit) {
        load += inst_.p(j, m);
        value += inst_.v(j, m);
        for (JobId i : prev_lit) setup += inst_.s(i, j);
      }
      std::swap(prev_lit, lit);
    }
    balance += load * load;
  }
  const auto& w = inst_.weights;
  return w.setup * setup + w.balance * balance - w.value * value;
}

PenaltyTerms BqpModel::penalties(std::span<const std::uint8_t> bits) const {
  PenaltyTerms p;
  for (JobId j = 1; j <= inst_.n_jobs; ++j) {
    std::int64_t c = 0;
    for (int i : index_.job_vars(j)) c += bits[i];
    p.once += (c - 1) * (c - 1);
  }
  for (MachineId m = 1; m <= inst_.n_machines; ++m) {
    std::int64_t prev = 0;
    for (int t = 1; t <= index_.slots(m); ++t) {
      std::int64_t c = 0;
      for (int i = index_.slot_begin(m, t); i < index_.slot_end(m, t); ++i) c += bits[i];
      p.slot += c * (c - 1);
      if (t >= 2) p.ordering += c * (c - prev);
      prev = c;
    }
  }
  return p;
}

Bits encode_schedule(const BqpModel& bqp, const Schedule& sched) {
  const auto& inst = bqp.instance();
  if (auto v = validate_schedule(inst, sched); !v.empty())
    throw ScheduleError("infeasible schedule: " + v.front().to_string());
  const auto& idx = bqp.vars();
  Bits bits(idx.size(), 0);
  for (MachineId m = 1; m <= inst.n_machines; ++m) {
    const auto& seq = sched.on(m);
    if (static_cast<int>(seq.size()) > idx.slots(m))
      throw Error("machine " + std::to_string(m) + " holds more jobs than it has slots");
    for (std::size_t t = 0; t < seq.size(); ++t) bits[idx.index(m, static_cast<int>(t) + 1, seq[t])] = 1;
  }
  return bits;
}

DecodeResult decode_bitstring(const BqpModel& bqp, std::span<const std::uint8_t> bits, bool repair) {
  const auto& inst = bqp.instance();
  const auto& idx = bqp.vars();
  if (static_cast<int>(bits.size()) != idx.size())
    throw Error("bitstring length " + std::to_string(bits.size()) + " does not match " +
                std::to_string(idx.size()) + " variables");

  DecodeResult result{Schedule::empty(inst.n_machines), false};

  if (bqp.feasible(bits)) {
    for (MachineId m = 1; m <= inst.n_machines; ++m)
      for (int i = idx.machine_begin(m); i < idx.machine_end(m); ++i)
        if (bits[i]) result.schedule.on(m).push_back(idx[i].job);
    result.feasible = true;
    return result;
  }

  if (!repair) {
    std::vector<bool> placed(inst.n_jobs + 1, false);
    for (MachineId m = 1; m <= inst.n_machines; ++m)
      for (int i = idx.machine_begin(m); i < idx.machine_end(m); ++i)
        if (bits[i] && !placed[idx[i].job]) {
          placed[idx[i].job] = true;
          result.schedule.on(m).push_back(idx[i].job);
        }
    return result;
  }

  // Keep one lit variable per job: the one with the highest value.
  Bits kept(idx.size(), 0);
  std::vector<bool> placed(inst.n_jobs + 1, false);
  for (JobId j = 1; j <= inst.n_jobs; ++j) {
    int best = -1;
    for (int i : idx.job_vars(j))
      if (bits[i] && (best < 0 || inst.v(j, idx[i].machine) > inst.v(j, idx[best].machine))) best = i;
    if (best >= 0) {
      kept[best] = 1;
      placed[j] = true;
    }
  }
  // Machine-major layout already orders kept variables by slot, so reading
  // them in index order compacts gaps and breaks slot collisions by job rank.
  for (MachineId m = 1; m <= inst.n_machines; ++m)
    for (int i = idx.machine_begin(m); i < idx.machine_end(m); ++i)
      if (kept[i]) result.schedule.on(m).push_back(idx[i].job);

  std::vector<std::int64_t> load(inst.n_machines + 1, 0);
  for (MachineId m = 1; m <= inst.n_machines; ++m)
    for (JobId j : result.schedule.on(m)) load[m] += inst.p(j, m);

  for (JobId j = 1; j <= inst.n_jobs; ++j) {
    if (placed[j]) continue;
    MachineId best_m = 0;
    std::size_t best_pos = 0;
    std::int64_t best_delta = 0;
    for (MachineId m : inst.eligible_machines(j)) {
      const auto& seq = result.schedule.on(m);
      for (std::size_t pos = 0; pos <= seq.size(); ++pos) {
        const std::int64_t d = detail::insertion_delta(inst, m, seq, load[m], j, pos);
        if (best_m == 0 || d < best_delta) {
          best_m = m;
          best_pos = pos;
          best_delta = d;
        }
      }
    }
    auto& seq = result.schedule.on(best_m);
    seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(best_pos), j);
    load[best_m] += inst.p(j, best_m);
  }
  result.feasible = validate_schedule(inst, result.schedule).empty();
  return result;
}

}  // namespace schedbal
