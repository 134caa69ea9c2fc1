#include <doctest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "oracles.hpp"
#include "schedbal/decompose.hpp"
#include "schedbal/solvers.hpp"

using namespace schedbal;
using helpers::allow;

namespace {

// Graph with explicit weights, bypassing the instance.
MachineGraph graph_of(int n, const std::vector<std::tuple<int, int, std::int64_t>>& edges) {
  MachineGraph g;
  for (int k = 1; k <= n; ++k) g.nodes.push_back(k);
  g.weight.assign(n, std::vector<std::int64_t>(n, 0));
  for (const auto& [a, b, w] : edges) {
    g.weight[a - 1][b - 1] = w;
    g.weight[b - 1][a - 1] = w;
  }
  return g;
}

std::int64_t crossing(const MachineGraph& g, const Partition& p) {
  std::int64_t c = 0;
  for (MachineId a : p.side_a)
    for (MachineId b : p.side_b) c += g.w(a, b);
  return c;
}

bool swap_stable(const MachineGraph& g, const Partition& p) {
  for (std::size_t i = 0; i < p.side_a.size(); ++i)
    for (std::size_t k = 0; k < p.side_b.size(); ++k) {
      Partition q = p;
      std::swap(q.side_a[i], q.side_b[k]);
      if (crossing(g, q) < p.cut_weight) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("machine graph weights count shared jobs") {
  SUBCASE("three jobs on both of two machines") {
    ProblemInstance inst = ProblemInstance::with_shape(3, 2);
    for (JobId j = 1; j <= 3; ++j)
      for (MachineId m = 1; m <= 2; ++m) allow(inst, j, m, 1, 1);
    const MachineGraph g = build_machine_graph(inst);
    CHECK(g.w(1, 2) == 3);
    CHECK(g.w(2, 1) == 3);
    CHECK(g.w(1, 1) == 0);
  }
  SUBCASE("disjoint eligibility") {
    ProblemInstance inst = ProblemInstance::with_shape(3, 3);
    for (JobId j = 1; j <= 3; ++j) allow(inst, j, j, 1, 1);
    const MachineGraph g = build_machine_graph(inst);
    for (MachineId a = 1; a <= 3; ++a)
      for (MachineId b = 1; b <= 3; ++b) CHECK(g.w(a, b) == 0);
  }
  SUBCASE("chain") {
    ProblemInstance inst = ProblemInstance::with_shape(2, 3);
    allow(inst, 1, 1, 1, 1);
    allow(inst, 1, 2, 1, 1);
    allow(inst, 2, 2, 1, 1);
    allow(inst, 2, 3, 1, 1);
    const MachineGraph g = build_machine_graph(inst);
    CHECK(g.w(1, 2) == 1);
    CHECK(g.w(2, 3) == 1);
    CHECK(g.w(1, 3) == 0);
  }
  SUBCASE("matches the oracle on random instances") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const ProblemInstance inst = helpers::small_random(seed, 12, 6, 0.4);
      const MachineGraph g = build_machine_graph(inst);
      for (MachineId a = 1; a <= 6; ++a)
        for (MachineId b = 1; b <= 6; ++b)
          CHECK(g.w(a, b) == (a == b ? 0 : oracle::shared_jobs(inst, a, b)));
    }
  }
}

TEST_CASE("Kernighan-Lin bisection") {
  SUBCASE("two heavy pairs with a light bridge") {
    const MachineGraph g = graph_of(4, {{1, 2, 10}, {3, 4, 10}, {1, 3, 1}});
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const Partition p = kernighan_lin_bisect(g, seed);
      CHECK(p.cut_weight == 1);
      std::set<MachineId> a(p.side_a.begin(), p.side_a.end());
      CHECK((a == std::set<MachineId>{1, 2} || a == std::set<MachineId>{3, 4}));
    }
  }
  SUBCASE("two nodes") {
    const MachineGraph g = graph_of(2, {{1, 2, 7}});
    const Partition p = kernighan_lin_bisect(g, 0);
    CHECK(p.side_a.size() == 1);
    CHECK(p.side_b.size() == 1);
    CHECK(p.cut_weight == 7);
  }
  SUBCASE("fewer than two nodes") {
    CHECK_THROWS_AS(kernighan_lin_bisect(graph_of(1, {}), 0), Error);
    CHECK_THROWS_AS(kernighan_lin_bisect(graph_of(0, {}), 0), Error);
  }
  SUBCASE("disconnected components are separated") {
    const MachineGraph g = graph_of(6, {{1, 2, 4}, {2, 3, 4}, {1, 3, 4}, {4, 5, 4}, {5, 6, 4}, {4, 6, 4}});
    CHECK(kernighan_lin_bisect(g, 3).cut_weight == 0);
  }
  SUBCASE("balanced, consistent, swap-stable and deterministic") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const ProblemInstance inst = helpers::small_random(seed, 14, 2 + static_cast<int>(seed % 7), 0.35);
      const MachineGraph g = build_machine_graph(inst);
      const Partition p = kernighan_lin_bisect(g, seed);
      const int n = inst.n_machines;
      CHECK(static_cast<int>(p.side_a.size() + p.side_b.size()) == n);
      CHECK(std::abs(static_cast<int>(p.side_a.size()) - static_cast<int>(p.side_b.size())) <= 1);
      std::set<MachineId> all(p.side_a.begin(), p.side_a.end());
      all.insert(p.side_b.begin(), p.side_b.end());
      CHECK(static_cast<int>(all.size()) == n);
      CHECK(p.cut_weight == crossing(g, p));
      CHECK(p.cut_weight == cut_weight(g, p.side_a));
      CHECK(swap_stable(g, p));
      const auto cuts = oracle::all_balanced_cuts(inst);
      CHECK(p.cut_weight >= *std::min_element(cuts.begin(), cuts.end()));
      CHECK(p.cut_weight <= *std::max_element(cuts.begin(), cuts.end()));
      const Partition again = kernighan_lin_bisect(g, seed);
      CHECK(again.side_a == p.side_a);
      CHECK(again.side_b == p.side_b);
    }
  }
}

TEST_CASE("split_instance") {
  ProblemInstance inst = ProblemInstance::with_shape(3, 4);
  // job 1: best value on machine 3 (side B); job 2: tie between 1 and 4; job 3 only on 2.
  allow(inst, 1, 1, 2, 5);
  allow(inst, 1, 3, 3, 9);
  allow(inst, 2, 1, 4, 6);
  allow(inst, 2, 4, 5, 6);
  allow(inst, 3, 2, 6, 1);
  helpers::set_setup(inst, 2, 3, 8);
  helpers::set_setup(inst, 3, 2, 1);
  inst.weights = {2, 3, 4};
  const Partition part{{1, 2}, {3, 4}, 0};
  const auto [a, b] = split_instance(inst, part);

  CHECK(a.machine_ids == std::vector<MachineId>{1, 2});
  CHECK(b.machine_ids == std::vector<MachineId>{3, 4});
  CHECK(a.job_ids == std::vector<JobId>{2, 3});
  CHECK(b.job_ids == std::vector<JobId>{1});
  CHECK(a.instance.weights == inst.weights);
  // job 2 lands on the side of machine 1 (lowest id among the tie); only machine 1 remains.
  CHECK(a.instance.eligible_machines(1) == std::vector<MachineId>{1});
  CHECK(a.instance.p(1, 1) == 4);
  CHECK(a.instance.s(1, 2) == 8);
  CHECK(a.instance.s(2, 1) == 1);
  // job 1 keeps only machine 3, local id 1 on side B.
  CHECK(b.instance.eligible_machines(1) == std::vector<MachineId>{1});
  CHECK(b.instance.v(1, 1) == 9);
  CHECK(validate_instance(a.instance).empty());
  CHECK(validate_instance(b.instance).empty());

  SUBCASE("random instances: job sets partition and eligibility stays nonempty") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      const ProblemInstance r = helpers::small_random(seed, 10, 5, 0.5);
      const Partition p = kernighan_lin_bisect(build_machine_graph(r), seed);
      const auto [x, y] = split_instance(r, p);
      CHECK(x.job_ids.size() + y.job_ids.size() == 10);
      std::set<JobId> jobs(x.job_ids.begin(), x.job_ids.end());
      jobs.insert(y.job_ids.begin(), y.job_ids.end());
      CHECK(jobs.size() == 10);
      for (const auto* sp : {&x, &y})
        for (std::size_t k = 0; k < sp->job_ids.size(); ++k) {
          const JobId root = sp->job_ids[k];
          CHECK_FALSE(sp->instance.eligible_machines(static_cast<JobId>(k) + 1).empty());
          // the kept side holds the job's best-value machine
          MachineId best = 0;
          for (MachineId m : r.eligible_machines(root))
            if (best == 0 || r.v(root, m) > r.v(root, best)) best = m;
          CHECK(std::find(sp->machine_ids.begin(), sp->machine_ids.end(), best) != sp->machine_ids.end());
        }
    }
  }
}

TEST_CASE("recursive_decompose") {
  SUBCASE("small enough returns the instance") {
    const ProblemInstance inst = helpers::small_random(1, 5, 6, 0.5);
    const auto leaves = recursive_decompose(inst, {count_variables(inst), 0});
    REQUIRE(leaves.size() == 1);
    CHECK(leaves[0].instance == inst);
  }
  SUBCASE("three machines are never split") {
    const ProblemInstance inst = helpers::small_random(2, 30, 3, 1.0);
    CHECK(recursive_decompose(inst, {1, 0}).size() == 1);
  }
  SUBCASE("eight machines with a budget of one") {
    const ProblemInstance inst = helpers::small_random(3, 24, 8, 0.5);
    const auto leaves = recursive_decompose(inst, {1, 5});
    std::set<MachineId> machines;
    std::size_t jobs = 0;
    for (const auto& leaf : leaves) {
      CHECK(leaf.instance.n_machines < 4);
      for (MachineId m : leaf.machine_ids) CHECK(machines.insert(m).second);
      jobs += leaf.job_ids.size();
    }
    CHECK(jobs == 24);
  }
  SUBCASE("leaves respect the stop rule and are deterministic") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const ProblemInstance inst = helpers::small_random(seed, 40, 10, 0.3);
      const auto leaves = recursive_decompose(inst, {150, seed});
      for (const auto& leaf : leaves)
        CHECK((count_variables(leaf.instance) <= 150 || leaf.instance.n_machines < 4));
      const auto again = recursive_decompose(inst, {150, seed});
      REQUIRE(again.size() == leaves.size());
      for (std::size_t k = 0; k < leaves.size(); ++k) {
        CHECK(again[k].machine_ids == leaves[k].machine_ids);
        CHECK(again[k].job_ids == leaves[k].job_ids);
      }
    }
  }
}

TEST_CASE("merge_solutions") {
  const ProblemInstance inst = helpers::small_random(7, 6, 4, 0.6);
  const Partition part = kernighan_lin_bisect(build_machine_graph(inst), 0);
  const auto [a, b] = split_instance(inst, part);
  const auto solve = [](const SubProblem& sp) {
    return sp.instance.n_jobs == 0 ? Schedule::empty(sp.instance.n_machines) : brute_force(sp.instance).schedule;
  };
  const Schedule merged = merge_solutions(inst, {{a, solve(a)}, {b, solve(b)}});
  CHECK(validate_schedule(inst, merged).empty());
  CHECK(oracle::combined(inst, merged) >= oracle::optimum(inst));

  SUBCASE("single part is the identity") {
    const Schedule s = brute_force(inst).schedule;
    CHECK(merge_solutions(inst, {{whole_problem(inst), s}}) == s);
  }
  SUBCASE("overlapping machines") { CHECK_THROWS_AS(merge_solutions(inst, {{a, solve(a)}, {a, solve(a)}}), Error); }
  SUBCASE("missing jobs") {
    if (!a.job_ids.empty()) CHECK_THROWS_AS(merge_solutions(inst, {{a, solve(a)}}), Error);
  }
}

TEST_CASE("merged leaves are always feasible") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const ProblemInstance inst = helpers::small_random(seed, 18, 8, 0.3);
    const auto leaves = recursive_decompose(inst, {20, seed});
    std::vector<std::pair<SubProblem, Schedule>> parts;
    for (const auto& leaf : leaves) {
      // trivial feasible leaf schedule: every job on its first eligible machine
      Schedule s = Schedule::empty(leaf.instance.n_machines);
      for (JobId j = 1; j <= leaf.instance.n_jobs; ++j) s.on(leaf.instance.eligible_machines(j).front()).push_back(j);
      parts.emplace_back(leaf, s);
    }
    CHECK(validate_schedule(inst, merge_solutions(inst, parts)).empty());
  }
}
