#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "schedbal/bqp_qubo.hpp"

namespace schedbal {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error("penalty weight overflows 64-bit integer range");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error("penalty weight overflows 64-bit integer range");
  return r;
}

}  // namespace

PenaltyWeights derive_penalties(const ProblemInstance& inst) {
  std::int64_t s_max = 0, c_max = 0, p_max = 0;
  for (JobId i = 1; i <= inst.n_jobs; ++i)
    for (JobId j = 1; j <= inst.n_jobs; ++j) s_max = std::max(s_max, inst.s(i, j));
  for (JobId j = 1; j <= inst.n_jobs; ++j)
    for (MachineId m : inst.eligible_machines(j)) {
      c_max = std::max(c_max, inst.v(j, m));
      p_max = std::max(p_max, inst.p(j, m));
    }
  const auto& w = inst.weights;
  const std::int64_t setup_gain = checked_mul(w.setup, s_max);
  const std::int64_t balance_gain =
      checked_mul(checked_mul(checked_mul(2, w.balance), inst.n_jobs), checked_mul(p_max, p_max));
  const std::int64_t value_gain = checked_mul(w.value, c_max);

  PenaltyWeights pw;
  pw.lambda3 = checked_add(setup_gain, 1);
  pw.lambda1 = checked_add(std::max({setup_gain, balance_gain, value_gain}), 1);
  pw.lambda2 = pw.lambda1;
  return pw;
}

std::int64_t QuboModel::coefficient(int i, int j) const {
  if (i == j) return linear[i];
  if (i > j) std::swap(i, j);
  const auto first = cols.begin() + row_start[i];
  const auto last = cols.begin() + row_start[i + 1];
  auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(j));
  if (it == last || *it != static_cast<std::uint32_t>(j)) return 0;
  return coeffs[static_cast<std::size_t>(it - cols.begin())];
}

std::int64_t QuboModel::max_abs_coefficient() const {
  std::int64_t best = 0;
  for (auto c : linear) best = std::max(best, std::abs(c));
  for (auto c : coeffs) best = std::max(best, std::abs(c));
  return best;
}

QuboModel build_qubo(const BqpModel& bqp, const PenaltyWeights& pw) {
  if (pw.lambda1 <= 0 || pw.lambda2 <= 0 || pw.lambda3 <= 0) throw Error("penalty weights must be positive");
  const auto& inst = bqp.instance();
  const auto& idx = bqp.vars();
  const auto& w = inst.weights;
  const int n = idx.size();

  QuboModel q;
  q.n_vars = n;
  q.var_index = idx;
  q.penalties = pw;
  q.offset = checked_mul(pw.lambda1, inst.n_jobs);
  q.linear.assign(n, 0);
  q.row_start.assign(n + 1, 0);

  // Upper bound on row lengths so the arrays are allocated once.
  std::size_t capacity = 0;
  for (int a = 0; a < n; ++a) {
    const auto& va = idx[a];
    capacity += static_cast<std::size_t>(idx.machine_end(va.machine) - a - 1);
    const auto& jv = idx.job_vars(va.job);
    capacity += static_cast<std::size_t>(jv.end() - std::upper_bound(jv.begin(), jv.end(), idx.machine_end(va.machine) - 1));
  }
  q.cols.reserve(capacity);
  q.coeffs.reserve(capacity);

  for (int a = 0; a < n; ++a) {
    const BqpVar va = idx[a];
    const MachineId m = va.machine;
    const std::int64_t pa = inst.p(va.job, m);

    // x^2 = x: diagonal parts of the balance square, the job penalty and the
    // ordering penalty's S_t^2.
    q.linear[a] = w.balance * pa * pa - w.value * inst.v(va.job, m) - pw.lambda1 + (va.slot >= 2 ? pw.lambda3 : 0);

    // Same-machine partners share the balance square; slot neighbours add
    // setup and ordering terms.
    const int end = idx.machine_end(m);
    for (int b = a + 1; b < end; ++b) {
      const BqpVar vb = idx[b];
      std::int64_t c = 2 * w.balance * pa * inst.p(vb.job, m);
      if (vb.job == va.job) c += 2 * pw.lambda1;
      if (vb.slot == va.slot) {
        c += 2 * pw.lambda2;
        if (va.slot >= 2) c += 2 * pw.lambda3;
      } else if (vb.slot == va.slot + 1) {
        c += w.setup * inst.s(va.job, vb.job) - pw.lambda3;
      }
      if (c != 0) {
        q.cols.push_back(static_cast<std::uint32_t>(b));
        q.coeffs.push_back(c);
      }
    }
    // The same job on later machines: once-and-only-once penalty.
    const auto& jv = idx.job_vars(va.job);
    for (auto it = std::upper_bound(jv.begin(), jv.end(), end - 1); it != jv.end(); ++it) {
      q.cols.push_back(static_cast<std::uint32_t>(*it));
      q.coeffs.push_back(2 * pw.lambda1);
    }
    q.row_start[a + 1] = static_cast<std::int64_t>(q.cols.size());
  }
  return q;
}

std::int64_t qubo_energy(const QuboModel& qubo, std::span<const std::uint8_t> bits) {
  if (static_cast<int>(bits.size()) != qubo.n_vars)
    throw Error("bitstring length " + std::to_string(bits.size()) + " does not match " +
                std::to_string(qubo.n_vars) + " variables");
  std::int64_t e = qubo.offset;
  for (int i = 0; i < qubo.n_vars; ++i) {
    if (!bits[i]) continue;
    e += qubo.linear[i];
    for (std::int64_t k = qubo.row_start[i]; k < qubo.row_start[i + 1]; ++k)
      if (bits[qubo.cols[k]]) e += qubo.coeffs[k];
  }
  return e;
}

namespace {

void write_qubo(std::ostream& out, const QuboModel& qubo) {
  out << "# " << qubo.n_vars << ' ' << qubo.offset << '\n';
  for (int i = 0; i < qubo.n_vars; ++i) {
    if (qubo.linear[i] != 0) out << i << ' ' << i << ' ' << qubo.linear[i] << '\n';
    for (std::int64_t k = qubo.row_start[i]; k < qubo.row_start[i + 1]; ++k)
      out << i << ' ' << qubo.cols[k] << ' ' << qubo.coeffs[k] << '\n';
  }
}

}  // namespace

std::string export_qubo_text(const QuboModel& qubo) {
  std::ostringstream out;
  write_qubo(out, qubo);
  return out.str();
}

void write_qubo_file(const QuboModel& qubo, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_qubo(out, qubo);
}

}  // namespace schedbal
