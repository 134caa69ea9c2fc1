// schedbal command-line front end.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "schedbal/bench.hpp"
#include "schedbal/bqp_qubo.hpp"
#include "schedbal/decompose.hpp"
#include "schedbal/instance.hpp"
#include "schedbal/mip_model.hpp"
#include "schedbal/schedule.hpp"
#include "schedbal/solvers.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace schedbal;

namespace {

constexpr int kOk = 0;
constexpr int kInvalidInput = 1;
constexpr int kRunFailed = 2;

// Failure of a solver run (as opposed to bad input).
struct RunFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed: " + path);
}

json breakdown_json(const ObjectiveBreakdown& b) {
  return {{"setup_total", b.setup_total},
          {"balance_sum_sq", b.balance_sum_sq},
          {"value_total", b.value_total},
          {"combined", b.combined}};
}

json trace_json(const std::vector<TracePoint>& trace) {
  json arr = json::array();
  for (const auto& tp : trace) arr.push_back({{"seconds", tp.seconds}, {"work", tp.work}, {"energy", tp.energy}});
  return arr;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw Error("bad seed '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

struct GenArgs {
  int jobs = 10, machines = 3;
  double density = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  const ProblemInstance inst = generate_instance(a.jobs, a.machines, a.density, a.seed);
  if (a.out.empty()) std::cout << serialize_instance(inst);
  else save_instance_file(inst, a.out);
  return kOk;
}

struct EvalArgs {
  std::string instance, schedule, gantt, gantt_json;
};

int cmd_eval(const EvalArgs& a) {
  const ProblemInstance inst = load_instance_file(a.instance);
  const Schedule sched = parse_schedule(read_file(a.schedule), inst.n_machines);
  if (auto v = validate_schedule(inst, sched); !v.empty()) {
    for (const auto& x : v) std::cerr << "infeasible: " << x.to_string() << "\n";
    return kInvalidInput;
  }
  const ObjectiveBreakdown b = evaluate(inst, sched);
  std::cout << breakdown_json(b).dump(2) << "\n";
  if (!a.gantt.empty() || !a.gantt_json.empty()) {
    const GanttTimeline g = to_gantt(inst, sched);
    if (!a.gantt.empty()) write_file(a.gantt, gantt_to_svg(g));
    if (!a.gantt_json.empty()) write_file(a.gantt_json, gantt_to_json(g));
  }
  return kOk;
}

int cmd_export_lp(const std::string& instance, const std::string& out) {
  write_file(out, export_lp(build_mip(load_instance_file(instance))));
  return kOk;
}

int cmd_export_qubo(const std::string& instance, const std::string& out, bool full_slots) {
  const ProblemInstance inst = load_instance_file(instance);
  const BqpModel bqp = build_bqp(inst, full_slots ? SlotRule::full : SlotRule::truncated);
  write_qubo_file(build_qubo(bqp, derive_penalties(inst)), out);
  return kOk;
}

int cmd_decompose(const std::string& instance, std::int64_t max_vars, std::uint64_t seed, const std::string& out_dir) {
  const ProblemInstance inst = load_instance_file(instance);
  const auto leaves = recursive_decompose(inst, {max_vars, seed});
  fs::create_directories(out_dir);
  json manifest;
  manifest["source"] = fs::path(instance).filename().string();
  manifest["max_vars"] = max_vars;
  manifest["seed"] = seed;
  json arr = json::array();
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const std::string name = "leaf_" + std::to_string(k);
    save_instance_file(leaves[k].instance, (fs::path(out_dir) / (name + ".json")).string());
    arr.push_back({{"id", name},
                   {"file", name + ".json"},
                   {"n_vars", count_variables(leaves[k].instance)},
                   {"machine_ids", leaves[k].machine_ids},
                   {"job_ids", leaves[k].job_ids}});
  }
  manifest["leaves"] = arr;
  write_file((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  std::cout << leaves.size() << " leaves written to " << out_dir << "\n";
  return kOk;
}

struct SolveArgs {
  std::string instance, solver = "hybrid", out;
  std::uint64_t seed = 0;
  std::optional<double> time_budget;
  std::int64_t max_vars = 10000;
  std::int64_t sweeps = SolverConfig{}.sweeps;
  int restarts = SolverConfig{}.restarts;
  bool slot_swap = false;
};

int cmd_solve(const SolveArgs& a) {
  const ProblemInstance inst = load_instance_file(a.instance);
  SolverSpec spec;
  spec.kind = a.solver == "brute" ? SolverKind::brute : a.solver == "sa" ? SolverKind::sa : SolverKind::hybrid;
  spec.label = a.solver;
  spec.config.time_budget = a.time_budget;
  spec.config.sweeps = a.sweeps;
  spec.config.restarts = a.restarts;
  if (a.slot_swap) spec.config.moves = MoveSet::bitflip_slotswap;
  spec.config.validate();
  spec.max_vars = a.max_vars;

  SolveResult r;
  try {
    r = run_solver(inst, spec, a.seed);
  } catch (const std::exception& e) {
    throw RunFailure(e.what());
  }
  json doc;
  doc["solver"] = r.solver_name;
  doc["seed"] = a.seed;
  doc["feasible"] = r.feasible;
  doc["breakdown"] = breakdown_json(r.breakdown);
  doc["wall_time"] = r.wall_time;
  doc["build_seconds"] = r.build_seconds;
  doc["best_energy_trace"] = trace_json(r.best_energy_trace);
  doc["schedule"] = json::parse(serialize_schedule(r.schedule));
  const std::string text = doc.dump(2) + "\n";
  if (a.out.empty()) std::cout << text;
  else write_file(a.out, text);
  std::cerr << r.solver_name << ": combined " << r.breakdown.combined << " in " << r.wall_time << " s\n";
  return kOk;
}

struct BenchArgs {
  std::string instances, solvers, seeds = "0", out, summary;
  int jobs = 1;
  bool include_build = false;
  bool deterministic = false;
};

int cmd_bench(const BenchArgs& a) {
  std::vector<fs::path> files;
  if (!fs::is_directory(a.instances)) throw Error("not a directory: " + a.instances);
  for (const auto& e : fs::directory_iterator(a.instances))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::vector<NamedInstance> insts;
  for (const auto& f : files) insts.push_back({f.stem().string(), load_instance_file(f.string())});
  const auto specs = parse_solver_specs(read_file(a.solvers));
  const auto seeds = parse_seeds(a.seeds);
  if (seeds.empty()) throw Error("no seeds given");

  BenchOptions opt;
  opt.jobs = std::max(1, a.jobs);
  opt.include_build = a.include_build;
  opt.deterministic_clock = a.deterministic;
  const BenchReport report = run_benchmark(insts, specs, seeds, opt);

  const std::string csv = records_to_csv(report);
  if (a.out.empty()) std::cout << csv;
  else write_file(a.out, csv);
  if (!a.summary.empty()) write_file(a.summary, summary_to_json(report));
  std::cerr << report.records.size() << " runs, " << report.failures.size() << " failed\n";
  return report.failures.empty() ? kOk : kRunFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Production assignment and scheduling toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a random instance");
  g->add_option("--jobs", gen.jobs, "Number of jobs")->check(CLI::PositiveNumber);
  g->add_option("--machines", gen.machines, "Number of machines")->check(CLI::PositiveNumber);
  g->add_option("--density", gen.density, "Eligibility density in (0,1]");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--out", gen.out, "Output file (stdout if omitted)");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Evaluate a schedule");
  e->add_option("--instance", ev.instance)->required();
  e->add_option("--schedule", ev.schedule)->required();
  e->add_option("--gantt", ev.gantt, "Write the timeline as SVG");
  e->add_option("--gantt-json", ev.gantt_json, "Write the timeline as JSON");

  std::string lp_inst, lp_out;
  auto* lp = app.add_subcommand("export-lp", "Export the MIP model in LP format");
  lp->add_option("--instance", lp_inst)->required();
  lp->add_option("--out", lp_out)->required();

  std::string q_inst, q_out;
  bool full_slots = false;
  auto* q = app.add_subcommand("export-qubo", "Export the QUBO");
  q->add_option("--instance", q_inst)->required();
  q->add_option("--out", q_out)->required();
  q->add_flag("--full-slots", full_slots, "One slot per job on every machine");

  std::string d_inst, d_dir;
  std::int64_t d_max = 10000;
  std::uint64_t d_seed = 0;
  auto* d = app.add_subcommand("decompose", "Split an instance into sub-problems");
  d->add_option("--instance", d_inst)->required();
  d->add_option("--max-vars", d_max)->check(CLI::PositiveNumber);
  d->add_option("--seed", d_seed);
  d->add_option("--out-dir", d_dir)->required();

  SolveArgs sv;
  double budget = -1.0;
  auto* s = app.add_subcommand("solve", "Solve an instance");
  s->add_option("--instance", sv.instance)->required();
  s->add_option("--solver", sv.solver)->check(CLI::IsMember({"brute", "sa", "hybrid"}));
  s->add_option("--seed", sv.seed);
  auto* budget_opt = s->add_option("--time-budget", budget, "Soft deadline in seconds")->check(CLI::NonNegativeNumber);
  s->add_option("--max-vars", sv.max_vars)->check(CLI::PositiveNumber);
  s->add_option("--sweeps", sv.sweeps)->check(CLI::PositiveNumber);
  s->add_option("--restarts", sv.restarts)->check(CLI::PositiveNumber);
  s->add_flag("--slot-swap", sv.slot_swap, "Add slot-swap compound moves");
  s->add_option("--out", sv.out, "Result file (stdout if omitted)");

  BenchArgs bn;
  auto* b = app.add_subcommand("bench", "Run a benchmark");
  b->add_option("--instances", bn.instances, "Directory of instance .json files")->required();
  b->add_option("--solvers", bn.solvers, "Solver spec JSON file")->required();
  b->add_option("--seeds", bn.seeds, "Comma-separated seeds");
  b->add_option("--out", bn.out, "CSV output (stdout if omitted)");
  b->add_option("--summary", bn.summary, "Summary JSON output");
  b->add_option("--jobs", bn.jobs, "Parallel runs")->check(CLI::PositiveNumber);
  b->add_flag("--include-build", bn.include_build, "Count model building in wall time");
  b->add_flag("--deterministic-timing", bn.deterministic,
              "Report work units instead of seconds so output is reproducible");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kOk : kInvalidInput;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*e) return cmd_eval(ev);
    if (*lp) return cmd_export_lp(lp_inst, lp_out);
    if (*q) return cmd_export_qubo(q_inst, q_out, full_slots);
    if (*d) return cmd_decompose(d_inst, d_max, d_seed, d_dir);
    if (*s) {
      if (*budget_opt) sv.time_budget = budget;
      return cmd_solve(sv);
    }
    if (*b) return cmd_bench(bn);
  } catch (const RunFailure& err) {
    std::cerr << "run failed: " << err.what() << "\n";
    return kRunFailed;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kInvalidInput;
  }
  return kOk;
}
