#include "schedbal/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "schedbal/mip_model.hpp"

namespace schedbal {

using json = nlohmann::ordered_json;

double deviation_pct(double candidate, double reference) {
  if (reference == 0.0) throw Error("deviation_pct: zero reference");
  return 100.0 * (candidate - reference) / std::fabs(reference);
}

std::optional<double> time_to_target(std::span<const std::pair<double, double>> trace, double target) {
  for (std::size_t k = 1; k < trace.size(); ++k) {
    if (trace[k].first < trace[k - 1].first) throw Error("time_to_target: trace time decreases");
    if (trace[k].second > trace[k - 1].second) throw Error("time_to_target: trace energy increases");
  }
  for (const auto& [t, e] : trace)
    if (e <= target) return t;
  return std::nullopt;
}

namespace {

SolverKind parse_kind(const std::string& s) {
  if (s == "brute") return SolverKind::brute;
  if (s == "sa") return SolverKind::sa;
  if (s == "hybrid") return SolverKind::hybrid;
  throw Error("unknown solver '" + s + "' (expected brute, sa or hybrid)");
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<SolverSpec> parse_solver_specs(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("solver spec: ") + e.what());
  }
  if (!doc.is_array()) throw Error("solver spec: expected a JSON array");
  std::vector<SolverSpec> out;
  for (std::size_t k = 0; k < doc.size(); ++k) {
    const auto& o = doc[k];
    const std::string where = "solver spec [" + std::to_string(k) + "]";
    try {
      if (!o.is_object()) throw Error("expected an object");
      SolverSpec s;
      s.kind = parse_kind(o.at("solver").get<std::string>());
      s.label = o.value("label", o.at("solver").get<std::string>());
      if (o.contains("sweeps")) s.config.sweeps = o["sweeps"].get<std::int64_t>();
      if (o.contains("restarts")) s.config.restarts = o["restarts"].get<int>();
      if (o.contains("t_initial")) s.config.t_initial = o["t_initial"].get<double>();
      if (o.contains("t_final")) s.config.t_final = o["t_final"].get<double>();
      if (o.contains("time_budget")) s.config.time_budget = o["time_budget"].get<double>();
      if (o.contains("max_vars")) s.max_vars = o["max_vars"].get<std::int64_t>();
      if (o.contains("moves")) {
        const auto m = o["moves"].get<std::string>();
        if (m == "bitflip") s.config.moves = MoveSet::bitflip;
        else if (m == "bitflip+slotswap") s.config.moves = MoveSet::bitflip_slotswap;
        else throw Error("unknown moves '" + m + "'");
      }
      s.config.validate();
      if (s.max_vars < 1) throw Error("max_vars must be positive");
      out.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw Error(where + ": " + e.what());
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
  }
  return out;
}

SolveResult run_solver(const ProblemInstance& inst, const SolverSpec& spec, std::uint64_t seed) {
  SolverConfig cfg = spec.config;
  cfg.seed = seed;
  switch (spec.kind) {
    case SolverKind::brute: return brute_force(inst);
    case SolverKind::sa: return anneal_solve(inst, cfg);
    case SolverKind::hybrid: return hybrid_solve(inst, cfg, spec.max_vars);
  }
  throw Error("unreachable solver kind");
}

BenchReport run_benchmark(const std::vector<NamedInstance>& instances, const std::vector<SolverSpec>& solvers,
                          const std::vector<std::uint64_t>& seeds, const BenchOptions& options) {
  for (const auto& ni : instances)
    if (auto v = validate_instance(ni.instance); !v.empty())
      throw InstanceError(ni.id, v.front().to_string());

  const std::size_t n_tasks = instances.size() * solvers.size() * seeds.size();
  std::vector<std::optional<BenchRecord>> slots(n_tasks);
  std::vector<std::optional<BenchFailure>> fails(n_tasks);
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;

  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < n_tasks;) {
      const std::size_t seed_k = t % seeds.size();
      const std::size_t solver_k = (t / seeds.size()) % solvers.size();
      const std::size_t inst_k = t / (seeds.size() * solvers.size());
      const auto& ni = instances[inst_k];
      const auto& spec = solvers[solver_k];
      const std::uint64_t seed = seeds[seed_k];
      try {
        SolveResult r = run_solver(ni.instance, spec, seed);
        BenchRecord rec;
        rec.instance = ni.id;
        rec.n_jobs = ni.instance.n_jobs;
        rec.n_machines = ni.instance.n_machines;
        rec.n_vars_bqp = count_variables(ni.instance);
        rec.n_vars_mip = count_mip_variables(ni.instance);
        rec.solver = spec.label;
        rec.seed = seed;
        if (spec.kind != SolverKind::brute) rec.budget_s = spec.config.time_budget;
        rec.objective = r.breakdown.combined;
        rec.feasible = r.feasible;
        const double shift = options.include_build ? r.build_seconds : 0.0;
        if (options.deterministic_clock) {
          rec.wall_s = 0.0;
          for (const auto& tp : r.best_energy_trace)
            rec.trace.emplace_back(static_cast<double>(tp.work), static_cast<double>(tp.energy));
        } else {
          rec.wall_s = r.wall_time + shift;
          for (const auto& tp : r.best_energy_trace)
            rec.trace.emplace_back(tp.seconds + shift, static_cast<double>(tp.energy));
        }
        slots[t] = std::move(rec);
      } catch (const std::exception& e) {
        fails[t] = BenchFailure{ni.id, spec.label, seed, e.what()};
        std::lock_guard lock(log_mu);
        std::cerr << "run failed: " << ni.id << " / " << spec.label << " / seed " << seed << ": " << e.what() << "\n";
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(options.jobs, static_cast<int>(std::max<std::size_t>(n_tasks, 1))));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  BenchReport report;
  report.deterministic_clock = options.deterministic_clock;
  for (std::size_t t = 0; t < n_tasks; ++t) {
    if (slots[t]) report.records.push_back(std::move(*slots[t]));
    if (fails[t]) report.failures.push_back(std::move(*fails[t]));
  }
  return report;
}

std::string records_to_csv(const BenchReport& report) {
  std::ostringstream os;
  os << "instance,jobs,machines,vars_bqp,vars_mip,solver,seed,budget_s,objective,wall_s,feasible\n";
  for (const auto& r : report.records) {
    os << csv_field(r.instance) << ',' << r.n_jobs << ',' << r.n_machines << ',' << r.n_vars_bqp << ','
       << r.n_vars_mip << ',' << csv_field(r.solver) << ',' << r.seed << ','
       << (r.budget_s ? fmt_double(*r.budget_s) : std::string()) << ',' << r.objective << ','
       << fmt_double(r.wall_s) << ',' << (r.feasible ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string summary_to_json(const BenchReport& report) {
  json doc;
  doc["clock"] = report.deterministic_clock ? "work" : "seconds";
  json insts = json::array();
  std::vector<std::string> order;
  for (const auto& r : report.records)
    if (std::find(order.begin(), order.end(), r.instance) == order.end()) order.push_back(r.instance);

  for (const auto& id : order) {
    std::vector<const BenchRecord*> recs;
    for (const auto& r : report.records)
      if (r.instance == id) recs.push_back(&r);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const auto* r : recs)
      if (r->feasible) best = std::min(best, r->objective);
    const bool have_best = best != std::numeric_limits<std::int64_t>::max();

    json ij;
    ij["instance"] = id;
    ij["best_known"] = have_best ? json(best) : json(nullptr);
    json runs = json::array();
    for (const auto* r : recs) {
      json rj;
      rj["solver"] = r->solver;
      rj["seed"] = r->seed;
      rj["objective"] = r->objective;
      rj["feasible"] = r->feasible;
      rj["deviation_pct"] = (have_best && best != 0 && r->feasible)
                                ? json(deviation_pct(static_cast<double>(r->objective), static_cast<double>(best)))
                                : json(nullptr);
      runs.push_back(rj);
    }
    ij["runs"] = runs;

    // Time for each run to reach every other solver's final objective
    // (same seed where available).
    json ttt = json::array();
    for (const auto* a : recs)
      for (const auto* b : recs) {
        if (a->solver == b->solver || a->seed != b->seed || !b->feasible) continue;
        json tj;
        tj["solver"] = a->solver;
        tj["seed"] = a->seed;
        tj["target_solver"] = b->solver;
        tj["target"] = b->objective;
        const auto t = time_to_target(a->trace, static_cast<double>(b->objective));
        tj["time"] = t ? json(*t) : json(nullptr);
        ttt.push_back(tj);
      }
    ij["time_to_target"] = ttt;
    insts.push_back(ij);
  }
  doc["instances"] = insts;
  json fails = json::array();
  for (const auto& f : report.failures)
    fails.push_back({{"instance", f.instance}, {"solver", f.solver}, {"seed", f.seed}, {"error", f.message}});
  doc["failures"] = fails;
  return doc.dump(2) + "\n";
}

}  // namespace schedbal
