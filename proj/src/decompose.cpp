#include "schedbal/decompose.hpp"

#include <algorithm>
#include <numeric>

#include "schedbal/bqp_qubo.hpp"
#include "schedbal/random.hpp"

namespace schedbal {

int MachineGraph::position(MachineId m) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), m);
  if (it == nodes.end() || *it != m) throw Error("machine " + std::to_string(m) + " is not a graph node");
  return static_cast<int>(it - nodes.begin());
}

std::int64_t MachineGraph::w(MachineId a, MachineId b) const { return weight[position(a)][position(b)]; }

MachineGraph build_machine_graph(const ProblemInstance& inst) {
  MachineGraph g;
  g.nodes.resize(inst.n_machines);
  std::iota(g.nodes.begin(), g.nodes.end(), 1);
  g.weight.assign(inst.n_machines, std::vector<std::int64_t>(inst.n_machines, 0));
  for (JobId j = 1; j <= inst.n_jobs; ++j) {
    const auto& e = inst.eligible_machines(j);
    for (std::size_t x = 0; x < e.size(); ++x)
      for (std::size_t y = x + 1; y < e.size(); ++y) {
        ++g.weight[e[x] - 1][e[y] - 1];
        ++g.weight[e[y] - 1][e[x] - 1];
      }
  }
  return g;
}

std::int64_t cut_weight(const MachineGraph& g, const std::vector<MachineId>& side_a) {
  std::vector<bool> in_a(g.size(), false);
  for (MachineId m : side_a) in_a[g.position(m)] = true;
  std::int64_t cut = 0;
  for (int x = 0; x < g.size(); ++x)
    for (int y = x + 1; y < g.size(); ++y)
      if (in_a[x] != in_a[y]) cut += g.weight[x][y];
  return cut;
}

Partition kernighan_lin_bisect(const MachineGraph& g, std::uint64_t seed) {
  const int n = g.size();
  if (n < 2) throw Error("Kernighan-Lin bisection needs at least two nodes");
  const auto& w = g.weight;

  // in_b[k]: node at position k is on side B
  std::vector<char> in_b(n);
  for (int k = 0; k < n; ++k) in_b[k] = static_cast<char>(k % 2);
  {
    Rng rng = make_rng(seed, 0x4b4c);
    std::vector<int> a, b;
    for (int k = 0; k < n; ++k) (in_b[k] ? b : a).push_back(k);
    for (int r = 0; r < n; ++r) {
      const auto x = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(a.size()) - 1));
      const auto y = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(b.size()) - 1));
      std::swap(a[x], b[y]);
    }
    for (int k : a) in_b[k] = 0;
    for (int k : b) in_b[k] = 1;
  }

  std::vector<std::int64_t> d(n);
  std::vector<char> locked(n);
  std::vector<std::pair<int, int>> swaps;
  std::vector<std::int64_t> gains;
  for (;;) {
    for (int x = 0; x < n; ++x) {
      d[x] = 0;
      for (int y = 0; y < n; ++y)
        if (y != x) d[x] += in_b[x] != in_b[y] ? w[x][y] : -w[x][y];
    }
    std::fill(locked.begin(), locked.end(), 0);
    swaps.clear();
    gains.clear();
    std::vector<char> side = in_b;
    const int steps = n / 2;
    for (int step = 0; step < steps; ++step) {
      int best_a = -1, best_b = -1;
      std::int64_t best_gain = 0;
      for (int a = 0; a < n; ++a) {
        if (locked[a] || side[a]) continue;
        for (int b = 0; b < n; ++b) {
          if (locked[b] || !side[b]) continue;
          const std::int64_t gain = d[a] + d[b] - 2 * w[a][b];
          if (best_a < 0 || gain > best_gain) {
            best_a = a;
            best_b = b;
            best_gain = gain;
          }
        }
      }
      if (best_a < 0) break;
      locked[best_a] = locked[best_b] = 1;
      swaps.emplace_back(best_a, best_b);
      gains.push_back(best_gain);
      // Tentatively move a to B and b to A for the remaining unlocked nodes.
      for (int x = 0; x < n; ++x) {
        if (locked[x]) continue;
        if (!side[x])
          d[x] += 2 * w[x][best_a] - 2 * w[x][best_b];
        else
          d[x] += 2 * w[x][best_b] - 2 * w[x][best_a];
      }
    }
    std::int64_t prefix = 0, best_prefix = 0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < gains.size(); ++k) {
      prefix += gains[k];
      if (prefix > best_prefix) {
        best_prefix = prefix;
        best_k = k + 1;
      }
    }
    if (best_k == 0) break;
    for (std::size_t k = 0; k < best_k; ++k) {
      in_b[swaps[k].first] = 1;
      in_b[swaps[k].second] = 0;
    }
  }

  Partition part;
  for (int k = 0; k < n; ++k) (in_b[k] ? part.side_b : part.side_a).push_back(g.nodes[k]);
  part.cut_weight = cut_weight(g, part.side_a);
  return part;
}

SubProblem whole_problem(const ProblemInstance& inst) {
  SubProblem sp{inst, {}, {}};
  sp.machine_ids.resize(inst.n_machines);
  sp.job_ids.resize(inst.n_jobs);
  std::iota(sp.machine_ids.begin(), sp.machine_ids.end(), 1);
  std::iota(sp.job_ids.begin(), sp.job_ids.end(), 1);
  return sp;
}

namespace {

SubProblem restrict_to(const SubProblem& parent, const std::vector<MachineId>& machines,
                       const std::vector<JobId>& jobs) {
  const ProblemInstance& src = parent.instance;
  std::vector<int> new_machine(src.n_machines + 1, 0);
  for (std::size_t k = 0; k < machines.size(); ++k) new_machine[machines[k]] = static_cast<int>(k) + 1;

  SubProblem sp;
  sp.instance = ProblemInstance::with_shape(static_cast<int>(jobs.size()), static_cast<int>(machines.size()));
  sp.instance.weights = src.weights;
  for (MachineId m : machines) sp.machine_ids.push_back(parent.machine_ids[m - 1]);
  for (std::size_t a = 0; a < jobs.size(); ++a) {
    const JobId j = jobs[a];
    sp.job_ids.push_back(parent.job_ids[j - 1]);
    for (MachineId m : src.eligible_machines(j)) {
      const int nm = new_machine[m];
      if (nm == 0) continue;
      sp.instance.eligible[a].push_back(nm);
      sp.instance.processing[a][nm - 1] = src.p(j, m);
      sp.instance.value[a][nm - 1] = src.v(j, m);
    }
    for (std::size_t b = 0; b < jobs.size(); ++b)
      if (a != b) sp.instance.setup[a][b] = src.s(j, jobs[b]);
  }
  return sp;
}

}  // namespace

std::pair<SubProblem, SubProblem> split_instance(const SubProblem& parent, const Partition& part) {
  const ProblemInstance& inst = parent.instance;
  std::vector<char> on_a(inst.n_machines + 1, 0), on_b(inst.n_machines + 1, 0);
  for (MachineId m : part.side_a) on_a.at(m) = 1;
  for (MachineId m : part.side_b) on_b.at(m) = 1;
  for (MachineId m = 1; m <= inst.n_machines; ++m)
    if (on_a[m] == on_b[m]) throw Error("partition does not split the machines into two disjoint covering sides");

  std::vector<JobId> jobs_a, jobs_b;
  for (JobId j = 1; j <= inst.n_jobs; ++j) {
    MachineId best = 0;
    for (MachineId m : inst.eligible_machines(j))
      if (best == 0 || inst.v(j, m) > inst.v(j, best)) best = m;
    (on_a[best] ? jobs_a : jobs_b).push_back(j);
  }
  std::vector<MachineId> side_a = part.side_a, side_b = part.side_b;
  std::sort(side_a.begin(), side_a.end());
  std::sort(side_b.begin(), side_b.end());
  return {restrict_to(parent, side_a, jobs_a), restrict_to(parent, side_b, jobs_b)};
}

std::pair<SubProblem, SubProblem> split_instance(const ProblemInstance& inst, const Partition& part) {
  return split_instance(whole_problem(inst), part);
}

namespace {

void decompose_into(const SubProblem& sp, const DecomposeOptions& options, std::uint64_t seed,
                    std::vector<SubProblem>& leaves) {
  if (sp.instance.n_jobs == 0) return;
  if (sp.instance.n_machines < 4 || count_variables(sp.instance) <= options.max_vars) {
    leaves.push_back(sp);
    return;
  }
  const Partition part = kernighan_lin_bisect(build_machine_graph(sp.instance), seed);
  auto [a, b] = split_instance(sp, part);
  decompose_into(a, options, splitmix64(seed ^ 0xa), leaves);
  decompose_into(b, options, splitmix64(seed ^ 0xb), leaves);
}

}  // namespace

std::vector<SubProblem> recursive_decompose(const ProblemInstance& inst, const DecomposeOptions& options) {
  if (options.max_vars < 1) throw Error("max_vars must be at least 1");
  std::vector<SubProblem> leaves;
  decompose_into(whole_problem(inst), options, options.seed, leaves);
  return leaves;
}

Schedule merge_solutions(const ProblemInstance& root, const std::vector<std::pair<SubProblem, Schedule>>& parts) {
  Schedule merged = Schedule::empty(root.n_machines);
  std::vector<bool> machine_used(root.n_machines + 1, false);
  std::vector<int> job_count(root.n_jobs + 1, 0);
  for (const auto& [sp, sched] : parts) {
    if (sched.sequences.size() != static_cast<std::size_t>(sp.instance.n_machines))
      throw Error("part schedule does not match its sub-instance");
    for (MachineId m = 1; m <= sp.instance.n_machines; ++m) {
      const MachineId rm = sp.machine_ids[m - 1];
      if (machine_used[rm]) throw Error("machine " + std::to_string(rm) + " appears in more than one part");
      machine_used[rm] = true;
      for (JobId j : sched.on(m)) {
        if (j < 1 || j > sp.instance.n_jobs) throw Error("part schedule references an unknown job");
        const JobId rj = sp.job_ids[j - 1];
        ++job_count[rj];
        merged.on(rm).push_back(rj);
      }
    }
  }
  for (JobId j = 1; j <= root.n_jobs; ++j) {
    if (job_count[j] == 0) throw Error("job " + std::to_string(j) + " is missing from the merged parts");
    if (job_count[j] > 1) throw Error("job " + std::to_string(j) + " appears in more than one part");
  }
  return merged;
}

}  // namespace schedbal
