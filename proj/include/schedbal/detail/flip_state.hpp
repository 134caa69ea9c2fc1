#pragma once

#include <cstdint>
#include <vector>

#include "schedbal/bqp_qubo.hpp"

namespace schedbal::detail {

// Both triangles of the QUBO, so a flip touches exactly one row.
template <class Coeff>
struct SymmetricRows {
  std::vector<std::int64_t> start;
  std::vector<std::uint32_t> cols;
  std::vector<Coeff> vals;

  explicit SymmetricRows(const QuboModel& q) {
    const int n = q.n_vars;
    start.assign(n + 1, 0);
    for (int i = 0; i < n; ++i)
      for (std::int64_t k = q.row_start[i]; k < q.row_start[i + 1]; ++k) {
        ++start[i + 1];
        ++start[q.cols[k] + 1];
      }
    for (int i = 0; i < n; ++i) start[i + 1] += start[i];
    cols.resize(static_cast<std::size_t>(start[n]));
    vals.resize(static_cast<std::size_t>(start[n]));
    std::vector<std::int64_t> fill(start.begin(), start.end() - 1);
    for (int i = 0; i < n; ++i)
      for (std::int64_t k = q.row_start[i]; k < q.row_start[i + 1]; ++k) {
        const std::uint32_t j = q.cols[k];
        const auto c = static_cast<Coeff>(q.coeffs[k]);
        cols[fill[i]] = j;
        vals[fill[i]++] = c;
        cols[fill[j]] = static_cast<std::uint32_t>(i);
        vals[fill[j]++] = c;
      }
  }
};

// Bitstring with local fields h_i = linear_i + sum_k Q_ik x_k, so flipping
// bit i changes the energy by (1 - 2 x_i) h_i in O(1), and the flip itself
// costs O(row nonzeros).
template <class Coeff>
class FlipState {
 public:
  explicit FlipState(const QuboModel& q) : q_(q), rows_(q) {}

  void reset(Bits bits) {
    x_ = std::move(bits);
    const int n = q_.n_vars;
    h_.assign(n, 0);
    for (int i = 0; i < n; ++i) {
      std::int64_t f = q_.linear[i];
      for (std::int64_t k = rows_.start[i]; k < rows_.start[i + 1]; ++k)
        if (x_[rows_.cols[k]]) f += rows_.vals[k];
      h_[i] = f;
    }
    energy_ = qubo_energy(q_, x_);
  }

  std::int64_t delta(int i) const { return x_[i] ? -h_[i] : h_[i]; }

  // Flips bit i and returns the energy change.
  std::int64_t flip(int i) {
    const std::int64_t d = delta(i);
    x_[i] ^= 1;
    const std::int64_t sign = x_[i] ? 1 : -1;
    for (std::int64_t k = rows_.start[i]; k < rows_.start[i + 1]; ++k)
      h_[rows_.cols[k]] += sign * static_cast<std::int64_t>(rows_.vals[k]);
    energy_ += d;
    return d;
  }

  const Bits& bits() const { return x_; }
  std::int64_t energy() const { return energy_; }
  int size() const { return q_.n_vars; }

 private:
  const QuboModel& q_;
  SymmetricRows<Coeff> rows_;
  Bits x_;
  std::vector<std::int64_t> h_;
  std::int64_t energy_ = 0;
};

}  // namespace schedbal::detail
