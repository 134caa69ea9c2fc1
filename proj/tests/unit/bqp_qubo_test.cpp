#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "oracles.hpp"
#include "schedbal/bqp_qubo.hpp"
#include "schedbal/random.hpp"

using namespace schedbal;
using helpers::allow;

namespace {

std::vector<int> slot_counts(const ProblemInstance& inst) {
  std::vector<int> s;
  for (MachineId m = 1; m <= inst.n_machines; ++m) s.push_back(oracle::slots_truncated(inst, m));
  return s;
}

ProblemInstance full(int J, int M, std::uint64_t seed) { return helpers::small_random(seed, J, M, 1.0); }

// Random feasible schedule: shuffled jobs dealt to random eligible machines.
Schedule random_schedule(const ProblemInstance& inst, Rng& rng) {
  Schedule s = Schedule::empty(inst.n_machines);
  std::vector<JobId> jobs(inst.n_jobs);
  for (int k = 0; k < inst.n_jobs; ++k) jobs[k] = k + 1;
  for (int k = inst.n_jobs - 1; k > 0; --k) std::swap(jobs[k], jobs[uniform_int(rng, 0, k)]);
  for (JobId j : jobs) {
    const auto& e = inst.eligible_machines(j);
    s.on(e[uniform_int(rng, 0, static_cast<std::int64_t>(e.size()) - 1)]).push_back(j);
  }
  return s;
}

}  // namespace

TEST_CASE("variable counts") {
  SUBCASE("two jobs, one machine") {
    const ProblemInstance inst = helpers::two_job_example();
    const BqpModel bqp = build_bqp(inst);
    CHECK(bqp.vars().slots(1) == 2);
    CHECK(bqp.n_vars() == 4);
    CHECK(count_variables(inst) == 4);
  }
  SUBCASE("job 3 only on machine 1") {
    ProblemInstance inst = ProblemInstance::with_shape(3, 2);
    for (JobId j = 1; j <= 2; ++j)
      for (MachineId m = 1; m <= 2; ++m) allow(inst, j, m, 2, 2);
    allow(inst, 3, 1, 2, 2);
    const BqpModel bqp = build_bqp(inst);
    CHECK(bqp.vars().slots(1) == 3);
    CHECK(bqp.vars().slots(2) == 2);
    CHECK(bqp.n_vars() == 13);
    CHECK(count_variables(inst) == 13);
  }
  SUBCASE("first benchmark shape with full eligibility") {
    CHECK(count_variables(generate_instance(27, 9, 1.0, 1)) == 6561);
  }
  SUBCASE("single-machine eligibility gives a sum of squares") {
    ProblemInstance inst = ProblemInstance::with_shape(6, 3);
    const int machine_of[6] = {1, 1, 1, 2, 2, 3};
    for (JobId j = 1; j <= 6; ++j) allow(inst, j, machine_of[j - 1], 1, 1);
    CHECK(count_variables(inst) == 9 + 4 + 1);
  }
  SUBCASE("bounded by M J^2, equal under full eligibility") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const ProblemInstance inst = helpers::small_random(seed, 3 + static_cast<int>(seed % 5), 1 + static_cast<int>(seed % 3), 0.5);
      const std::int64_t J = inst.n_jobs, M = inst.n_machines;
      std::int64_t want = 0;
      for (int k : slot_counts(inst)) want += static_cast<std::int64_t>(k) * k;
      CHECK(count_variables(inst) == want);
      CHECK(count_variables(inst) <= M * J * J);
      CHECK(count_variables(full(static_cast<int>(J), static_cast<int>(M), seed)) == M * J * J);
      std::int64_t eligible_pairs = 0;
      for (int k : slot_counts(inst)) eligible_pairs += k;
      CHECK(count_variables(inst, SlotRule::full) == J * eligible_pairs);
    }
  }
}

TEST_CASE("variable index is a bijection onto eligible triples") {
  const ProblemInstance inst = helpers::small_random(4, 5, 3, 0.6);
  const BqpModel bqp = build_bqp(inst);
  const VarIndex& idx = bqp.vars();
  std::set<std::tuple<int, int, int>> seen;
  for (int i = 0; i < idx.size(); ++i) {
    const BqpVar& v = idx[i];
    CHECK(inst.is_eligible(v.job, v.machine));
    CHECK(v.slot >= 1);
    CHECK(v.slot <= idx.slots(v.machine));
    CHECK(idx.index(v.machine, v.slot, v.job) == i);
    CHECK(i >= idx.slot_begin(v.machine, v.slot));
    CHECK(i < idx.slot_end(v.machine, v.slot));
    seen.insert({v.machine, v.slot, v.job});
  }
  CHECK(static_cast<int>(seen.size()) == idx.size());
  for (JobId j = 1; j <= inst.n_jobs; ++j)
    for (MachineId m = 1; m <= inst.n_machines; ++m)
      if (!inst.is_eligible(j, m)) CHECK(idx.index(m, 1, j) == -1);
}

TEST_CASE("derived penalty weights") {
  SUBCASE("worked example") {
    ProblemInstance inst = ProblemInstance::with_shape(3, 1);
    allow(inst, 1, 1, 4, 10);
    allow(inst, 2, 1, 2, 3);
    allow(inst, 3, 1, 1, 7);
    helpers::set_setup(inst, 1, 2, 5);
    helpers::set_setup(inst, 3, 1, 2);
    const PenaltyWeights w = derive_penalties(inst);
    CHECK(w.lambda3 == 6);
    CHECK(w.lambda1 == 97);
    CHECK(w.lambda2 == 97);
  }
  SUBCASE("all zero data") {
    ProblemInstance inst = ProblemInstance::with_shape(2, 1);
    allow(inst, 1, 1, 0, 0);
    allow(inst, 2, 1, 0, 0);
    const PenaltyWeights w = derive_penalties(inst);
    CHECK(w.lambda1 == 1);
    CHECK(w.lambda2 == 1);
    CHECK(w.lambda3 == 1);
  }
  SUBCASE("doubling setups doubles lambda3 - 1") {
    ProblemInstance inst = helpers::small_random(6, 4, 2, 1.0);
    const std::int64_t before = derive_penalties(inst).lambda3 - 1;
    for (auto& row : inst.setup)
      for (auto& s : row) s *= 2;
    CHECK(derive_penalties(inst).lambda3 - 1 == 2 * before);
  }
  SUBCASE("weights scale the bounds") {
    ProblemInstance inst = helpers::small_random(6, 4, 2, 1.0);
    inst.weights = {3, 2, 5};
    std::int64_t s_max = 0, p_max = 0, c_max = 0;
    for (JobId i = 1; i <= 4; ++i) {
      for (JobId j = 1; j <= 4; ++j) s_max = std::max(s_max, oracle::setup_of(inst, i, j));
      for (MachineId m : inst.eligible_machines(i)) {
        p_max = std::max(p_max, inst.p(i, m));
        c_max = std::max(c_max, inst.v(i, m));
      }
    }
    const PenaltyWeights w = derive_penalties(inst);
    CHECK(w.lambda3 == 3 * s_max + 1);
    CHECK(w.lambda1 == std::max({3 * s_max, 2 * 2 * 4 * p_max * p_max, 5 * c_max}) + 1);
  }
  SUBCASE("overflow is reported") {
    ProblemInstance inst = ProblemInstance::with_shape(2, 1);
    allow(inst, 1, 1, std::int64_t{1} << 40, 0);
    allow(inst, 2, 1, 1, 0);
    CHECK_THROWS_AS(derive_penalties(inst), Error);
  }
}

TEST_CASE("QUBO energy of simple bitstrings") {
  const ProblemInstance inst = helpers::small_random(2, 3, 2, 1.0);
  const BqpModel bqp = build_bqp(inst);
  const PenaltyWeights lam = derive_penalties(inst);
  const QuboModel q = build_qubo(bqp, lam);
  Bits zero(q.n_vars, 0);
  CHECK(q.offset == lam.lambda1 * 3);
  CHECK(qubo_energy(q, zero) == q.offset);
  for (int i = 0; i < q.n_vars; ++i) {
    Bits one = zero;
    one[i] = 1;
    CHECK(qubo_energy(q, one) == q.offset + q.linear[i]);
    CHECK(q.coefficient(i, i) == q.linear[i]);
  }
  CHECK_THROWS_AS(qubo_energy(q, Bits(q.n_vars + 1, 0)), Error);
}

TEST_CASE("quadratic part is strictly upper triangular and merged") {
  const ProblemInstance inst = helpers::small_random(9, 4, 2, 0.8);
  const QuboModel q = build_qubo(build_bqp(inst), derive_penalties(inst));
  for (int i = 0; i < q.n_vars; ++i) {
    std::set<std::uint32_t> cols;
    for (std::int64_t k = q.row_start[i]; k < q.row_start[i + 1]; ++k) {
      CHECK(q.cols[k] > static_cast<std::uint32_t>(i));
      CHECK(cols.insert(q.cols[k]).second);
      CHECK(q.coeffs[k] != 0);
      CHECK(q.coefficient(i, static_cast<int>(q.cols[k])) == q.coeffs[k]);
      CHECK(q.coefficient(static_cast<int>(q.cols[k]), i) == q.coeffs[k]);
    }
  }
}

TEST_CASE("energy equals the unexpanded penalty formula on random bitstrings") {
  ProblemInstance inst = ProblemInstance::with_shape(3, 2);
  Rng rng = make_rng(77);
  for (JobId j = 1; j <= 3; ++j)
    for (MachineId m = 1; m <= 2; ++m) allow(inst, j, m, uniform_int(rng, 1, 9), uniform_int(rng, 0, 9));
  for (JobId i = 1; i <= 3; ++i)
    for (JobId j = 1; j <= 3; ++j)
      if (i != j) helpers::set_setup(inst, i, j, uniform_int(rng, 0, 7));
  inst.weights = {2, 1, 3};
  const BqpModel bqp = build_bqp(inst);
  const PenaltyWeights lam = derive_penalties(inst);
  const QuboModel q = build_qubo(bqp, lam);
  const std::vector<int> slots = slot_counts(inst);
  for (int trial = 0; trial < 2000; ++trial) {
    Bits bits(q.n_vars);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1);
    const std::int64_t want = oracle::unexpanded_energy(inst, bqp.vars().vars(), slots, lam, bits);
    CHECK(qubo_energy(q, bits) == want);
    const PenaltyTerms pt = bqp.penalties(bits);
    CHECK(bqp.objective(bits) + lam.lambda1 * pt.once + lam.lambda2 * pt.slot + lam.lambda3 * pt.ordering == want);
    CHECK(bqp.feasible(bits) == oracle::encodes_schedule(inst, bqp.vars().vars(), slots, bits));
  }
}

TEST_CASE("exhaustive equivalence on tiny models") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    ProblemInstance inst = helpers::small_random(seed + 100, 3, 2, 0.6);
    if (count_variables(inst) > 14) continue;
    const BqpModel bqp = build_bqp(inst);
    const PenaltyWeights lam = derive_penalties(inst);
    const QuboModel q = build_qubo(bqp, lam);
    const std::vector<int> slots = slot_counts(inst);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    bool best_feasible = false;
    oracle::for_each_bitstring(q.n_vars, [&](const std::vector<std::uint8_t>& bits) {
      const std::int64_t e = qubo_energy(q, bits);
      REQUIRE(e == oracle::unexpanded_energy(inst, bqp.vars().vars(), slots, lam, bits));
      const bool feas = oracle::encodes_schedule(inst, bqp.vars().vars(), slots, bits);
      if (feas) {
        const DecodeResult d = decode_bitstring(bqp, bits, false);
        REQUIRE(d.feasible);
        REQUIRE(e == oracle::combined(inst, d.schedule));
      }
      if (e < best) {
        best = e;
        best_feasible = feas;
      }
    });
    CHECK(best_feasible);
    CHECK(best == oracle::optimum(inst));
  }
}

TEST_CASE("one job on one machine") {
  ProblemInstance inst = ProblemInstance::with_shape(1, 1);
  allow(inst, 1, 1, 3, 4);
  const PenaltyWeights lam = derive_penalties(inst);
  const QuboModel q = build_qubo(build_bqp(inst), lam);
  REQUIRE(q.n_vars == 1);
  CHECK(qubo_energy(q, Bits{0}) == lam.lambda1);
  CHECK(qubo_energy(q, Bits{1}) == 9 - 4);
  CHECK(qubo_energy(q, Bits{1}) < qubo_energy(q, Bits{0}));
}

TEST_CASE("zero setups add no setup couplings") {
  ProblemInstance inst = helpers::small_random(12, 3, 1, 1.0);
  for (auto& row : inst.setup) std::fill(row.begin(), row.end(), 0);
  const BqpModel bqp = build_bqp(inst);
  const PenaltyWeights lam = derive_penalties(inst);
  const QuboModel q = build_qubo(bqp, lam);
  const VarIndex& idx = bqp.vars();
  // Adjacent-slot, different-job pairs carry only balance and ordering terms.
  for (int a = 0; a < q.n_vars; ++a)
    for (int b = 0; b < q.n_vars; ++b) {
      const BqpVar& x = idx[a];
      const BqpVar& y = idx[b];
      if (y.slot != x.slot + 1 || x.job == y.job) continue;
      const std::int64_t balance = 2 * inst.p(x.job, 1) * inst.p(y.job, 1);
      CHECK(q.coefficient(a, b) == balance - lam.lambda3);
    }
}

TEST_CASE("encode and decode") {
  const ProblemInstance inst = helpers::two_job_example();
  const BqpModel bqp = build_bqp(inst);
  const VarIndex& idx = bqp.vars();

  SUBCASE("machine 1 = [2, 1]") {
    const Bits bits = encode_schedule(bqp, Schedule{{{2, 1}}});
    for (int i = 0; i < idx.size(); ++i) {
      const bool lit = (idx[i].slot == 1 && idx[i].job == 2) || (idx[i].slot == 2 && idx[i].job == 1);
      CHECK(bits[i] == (lit ? 1 : 0));
    }
    const DecodeResult d = decode_bitstring(bqp, bits, false);
    CHECK(d.feasible);
    CHECK(d.schedule == Schedule{{{2, 1}}});
  }
  SUBCASE("empty machine has no lit bits") {
    ProblemInstance two = ProblemInstance::with_shape(2, 2);
    for (JobId j = 1; j <= 2; ++j)
      for (MachineId m = 1; m <= 2; ++m) allow(two, j, m, 1, 1);
    const BqpModel b2 = build_bqp(two);
    const Bits bits = encode_schedule(b2, Schedule{{{1, 2}, {}}});
    for (int i = b2.vars().machine_begin(2); i < b2.vars().machine_end(2); ++i) CHECK(bits[i] == 0);
  }
  SUBCASE("job lit twice is infeasible without repair") {
    Bits bits = encode_schedule(bqp, Schedule{{{1, 2}}});
    bits[idx.index(1, 2, 1)] = 1;  // job 1 also in slot 2
    CHECK_FALSE(decode_bitstring(bqp, bits, false).feasible);
    const DecodeResult r = decode_bitstring(bqp, bits, true);
    CHECK(r.feasible);
    CHECK(validate_schedule(inst, r.schedule).empty());
  }
  SUBCASE("all-zero bits are repaired into a feasible schedule") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const ProblemInstance r = helpers::small_random(seed, 6, 3, 0.5);
      const BqpModel b = build_bqp(r);
      const DecodeResult d = decode_bitstring(b, Bits(b.n_vars(), 0), true);
      CHECK(d.feasible);
      CHECK(validate_schedule(r, d.schedule).empty());
    }
  }
  SUBCASE("random bits are always repaired") {
    const ProblemInstance r = helpers::small_random(31, 7, 3, 0.6);
    const BqpModel b = build_bqp(r);
    Rng rng = make_rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      Bits bits(b.n_vars());
      for (auto& x : bits) x = static_cast<std::uint8_t>(uniform_real(rng) < 0.2);
      const DecodeResult d = decode_bitstring(b, bits, true);
      CHECK(d.feasible);
      CHECK(validate_schedule(r, d.schedule).empty());
    }
  }
  SUBCASE("gaps are compacted in order") {
    ProblemInstance three = ProblemInstance::with_shape(3, 1);
    for (JobId j = 1; j <= 3; ++j) allow(three, j, 1, 1, 1);
    const BqpModel b = build_bqp(three);
    Bits bits(b.n_vars(), 0);
    bits[b.vars().index(1, 1, 3)] = 1;
    bits[b.vars().index(1, 3, 1)] = 1;
    CHECK_FALSE(decode_bitstring(b, bits, false).feasible);
    const DecodeResult d = decode_bitstring(b, bits, true);
    CHECK(d.feasible);
    REQUIRE(d.schedule.on(1).size() == 3);
    const auto& seq = d.schedule.on(1);
    CHECK(std::find(seq.begin(), seq.end(), 3) < std::find(seq.begin(), seq.end(), 1));
  }
  SUBCASE("length mismatch") { CHECK_THROWS_AS(decode_bitstring(bqp, Bits(3, 0), true), Error); }
  SUBCASE("infeasible schedules are rejected") {
    ProblemInstance tight = ProblemInstance::with_shape(2, 2);
    allow(tight, 1, 1, 1, 1);
    allow(tight, 1, 2, 1, 1);
    allow(tight, 2, 1, 1, 1);
    CHECK_THROWS_AS(encode_schedule(build_bqp(tight), Schedule{{{}, {1, 2}}}), ScheduleError);
  }
}

TEST_CASE("encode/decode round trip and energy on random schedules") {
  const ProblemInstance inst = helpers::small_random(21, 7, 3, 0.6);
  const BqpModel bqp = build_bqp(inst);
  const QuboModel q = build_qubo(bqp, derive_penalties(inst));
  Rng rng = make_rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const Schedule s = random_schedule(inst, rng);
    const Bits bits = encode_schedule(bqp, s);
    CHECK(std::count(bits.begin(), bits.end(), 1) == inst.n_jobs);
    const DecodeResult d = decode_bitstring(bqp, bits, false);
    CHECK(d.feasible);
    CHECK(d.schedule == s);
    CHECK(qubo_energy(q, bits) == oracle::combined(inst, s));
  }
}

TEST_CASE("full slot rule") {
  const ProblemInstance inst = helpers::small_random(3, 4, 2, 0.6);
  const BqpModel bqp = build_bqp(inst, SlotRule::full);
  for (MachineId m = 1; m <= 2; ++m) CHECK(bqp.vars().slots(m) == 4);
  const QuboModel q = build_qubo(bqp, derive_penalties(inst));
  Rng rng = make_rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Schedule s = random_schedule(inst, rng);
    CHECK(qubo_energy(q, encode_schedule(bqp, s)) == oracle::combined(inst, s));
  }
}

TEST_CASE("QUBO text export") {
  const ProblemInstance inst = helpers::two_job_example();
  const QuboModel q = build_qubo(build_bqp(inst), derive_penalties(inst));
  const std::string text = export_qubo_text(q);
  std::istringstream in(text);
  std::string hash;
  int n = 0;
  std::int64_t offset = 0;
  in >> hash >> n >> offset;
  CHECK(hash == "#");
  CHECK(n == q.n_vars);
  CHECK(offset == q.offset);
  // Rebuild the energy function from the file and compare.
  std::vector<std::tuple<int, int, std::int64_t>> terms;
  for (int i, j; in >> i >> j;) {
    std::int64_t c = 0;
    in >> c;
    CHECK(i <= j);
    CHECK(c != 0);
    terms.emplace_back(i, j, c);
  }
  oracle::for_each_bitstring(q.n_vars, [&](const std::vector<std::uint8_t>& bits) {
    std::int64_t e = offset;
    for (const auto& [i, j, c] : terms)
      if (bits[i] && bits[j]) e += c;
    CHECK(e == qubo_energy(q, bits));
  });
  const auto path = std::filesystem::temp_directory_path() / "schedbal_test.qubo";
  write_qubo_file(q, path.string());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == text);
  std::filesystem::remove(path);
}
