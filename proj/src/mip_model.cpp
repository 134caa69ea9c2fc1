#include "schedbal/mip_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace schedbal {

std::optional<int> MipModel::find(std::string_view name) const {
  auto it = index.find(name);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

int MipModel::count(VarKind kind) const {
  return static_cast<int>(std::count_if(variables.begin(), variables.end(),
                                        [kind](const Variable& v) { return v.kind == kind; }));
}

namespace {

std::string x_name(MachineId m, JobId i, JobId j) {
  return "x_" + std::to_string(m) + "_" + std::to_string(i) + "_" + std::to_string(j);
}
std::string u_name(MachineId m, JobId j) { return "u_" + std::to_string(m) + "_" + std::to_string(j); }
std::string t_name(MachineId m) { return "t_" + std::to_string(m); }

class MipBuilder {
 public:
  explicit MipBuilder(MipModel& model) : model_(model) {}

  int add(std::string name, MipModel::VarKind kind) {
    const int id = static_cast<int>(model_.variables.size());
    model_.index.emplace(name, id);
    model_.variables.push_back({std::move(name), kind});
    return id;
  }
  int var(const std::string& name) const { return model_.index.at(name); }

 private:
  MipModel& model_;
};

bool machine_independent_processing(const ProblemInstance& inst) {
  for (JobId j = 1; j <= inst.n_jobs; ++j) {
    const auto& e = inst.eligible_machines(j);
    for (MachineId m : e)
      if (inst.p(j, m) != inst.p(j, e.front())) return false;
  }
  return true;
}

}  // namespace

std::int64_t count_mip_variables(const ProblemInstance& inst) {
  std::int64_t n = inst.n_machines;  // t_m
  for (MachineId m = 1; m <= inst.n_machines; ++m) {
    const std::int64_t k = static_cast<std::int64_t>(inst.jobs_on(m).size());
    n += k * (k + 1) + k;  // arcs over {0} + eligible jobs, u_m_j
  }
  return n;
}

MipModel build_mip(const ProblemInstance& inst, const MipOptions& options) {
  using Kind = MipModel::VarKind;
  using Sense = MipModel::Sense;
  MipModel model;
  model.n_machines = inst.n_machines;
  MipBuilder b(model);

  std::int64_t default_big_m = 0;
  for (JobId j = 1; j <= inst.n_jobs; ++j) {
    std::int64_t best = 0;
    for (MachineId m : inst.eligible_machines(j)) best = std::max(best, inst.p(j, m));
    default_big_m += best;
  }
  model.big_m = options.big_m.value_or(default_big_m);

  // nodes[m-1] = dummy 0 followed by jobs eligible on m
  std::vector<std::vector<JobId>> nodes(inst.n_machines);
  for (MachineId m = 1; m <= inst.n_machines; ++m) {
    nodes[m - 1].push_back(0);
    for (JobId j : inst.jobs_on(m)) nodes[m - 1].push_back(j);
  }

  for (MachineId m = 1; m <= inst.n_machines; ++m)
    for (JobId i : nodes[m - 1])
      for (JobId j : nodes[m - 1])
        if (i != j) b.add(x_name(m, i, j), Kind::binary);
  for (MachineId m = 1; m <= inst.n_machines; ++m)
    for (JobId j : nodes[m - 1])
      if (j != 0) b.add(u_name(m, j), Kind::continuous);
  for (MachineId m = 1; m <= inst.n_machines; ++m) b.add(t_name(m), Kind::continuous);

  // exactly one predecessor / successor per job
  for (JobId j = 1; j <= inst.n_jobs; ++j) {
    MipModel::Row pred{"pred_" + std::to_string(j), {}, Sense::eq, 1};
    MipModel::Row succ{"succ_" + std::to_string(j), {}, Sense::eq, 1};
    for (MachineId m : inst.eligible_machines(j))
      for (JobId i : nodes[m - 1]) {
        if (i == j) continue;
        pred.terms.push_back({b.var(x_name(m, i, j)), 1});
        succ.terms.push_back({b.var(x_name(m, j, i)), 1});
      }
    model.rows.push_back(std::move(pred));
    model.rows.push_back(std::move(succ));
  }

  for (MachineId m = 1; m <= inst.n_machines; ++m) {
    const auto& nm = nodes[m - 1];
    // flow conservation, dummy included
    for (JobId j : nm) {
      MipModel::Row flow{"flow_" + std::to_string(m) + "_" + std::to_string(j), {}, Sense::eq, 0};
      for (JobId i : nm)
        if (i != j) flow.terms.push_back({b.var(x_name(m, i, j)), 1});
      for (JobId k : nm)
        if (k != j) flow.terms.push_back({b.var(x_name(m, j, k)), -1});
      model.rows.push_back(std::move(flow));
    }
    MipModel::Row dummy{"dummy_" + std::to_string(m), {}, Sense::le, 1};
    for (JobId j : nm)
      if (j != 0) dummy.terms.push_back({b.var(x_name(m, 0, j)), 1});
    model.rows.push_back(std::move(dummy));

    // sub-tour elimination: u_i - u_j + M x_ij <= M - p_j  (u_0 = 0)
    for (JobId j : nm) {
      if (j == 0) continue;
      for (JobId i : nm) {
        if (i == j) continue;
        MipModel::Row mtz{"mtz_" + std::to_string(m) + "_" + std::to_string(i) + "_" + std::to_string(j),
                          {},
                          Sense::le,
                          model.big_m - inst.p(j, m)};
        if (i != 0) mtz.terms.push_back({b.var(u_name(m, i)), 1});
        mtz.terms.push_back({b.var(u_name(m, j)), -1});
        mtz.terms.push_back({b.var(x_name(m, i, j)), model.big_m});
        model.rows.push_back(std::move(mtz));
      }
    }
    for (JobId j : nm) {
      if (j == 0) continue;
      model.rows.push_back({"load_" + std::to_string(m) + "_" + std::to_string(j),
                            {{b.var(t_name(m)), 1}, {b.var(u_name(m, j)), -1}},
                            Sense::ge,
                            0});
    }
  }

  // Cutting plane on the total load. With machine-dependent processing the
  // equality is not well defined; the minimum eligible p gives a valid bound.
  {
    const bool exact = machine_independent_processing(inst);
    std::int64_t rhs = 0;
    for (JobId j = 1; j <= inst.n_jobs; ++j) {
      std::int64_t lo = INT64_MAX;
      for (MachineId m : inst.eligible_machines(j)) lo = std::min(lo, inst.p(j, m));
      rhs += lo;
    }
    MipModel::Row cut{"total_load", {}, exact ? Sense::eq : Sense::ge, rhs};
    for (MachineId m = 1; m <= inst.n_machines; ++m) cut.terms.push_back({b.var(t_name(m)), 1});
    model.rows.push_back(std::move(cut));
  }

  const auto& w = inst.weights;
  for (MachineId m = 1; m <= inst.n_machines; ++m)
    for (JobId i : nodes[m - 1])
      for (JobId j : nodes[m - 1]) {
        if (i == j || j == 0) continue;
        const std::int64_t c = w.setup * inst.s(i, j) - w.value * inst.v(j, m);
        if (c != 0) model.linear_objective.push_back({b.var(x_name(m, i, j)), c});
      }
  if (w.balance != 0)
    for (MachineId m = 1; m <= inst.n_machines; ++m)
      model.quadratic_objective.push_back({b.var(t_name(m)), w.balance});
  return model;
}

namespace {

// Writes "a x + b y - c z" with line wrapping; returns whether anything was written.
bool write_terms(std::ostream& out, const MipModel& model, const std::vector<MipModel::Term>& terms) {
  bool first = true;
  int on_line = 0;
  for (const auto& t : terms) {
    if (t.coeff == 0) continue;
    if (on_line == 8) {
      out << "\n   ";
      on_line = 0;
    }
    const std::int64_t mag = t.coeff < 0 ? -t.coeff : t.coeff;
    if (first)
      out << (t.coeff < 0 ? "- " : "");
    else
      out << (t.coeff < 0 ? " - " : " + ");
    if (mag != 1) out << mag << ' ';
    out << model.variables[t.var].name;
    first = false;
    ++on_line;
  }
  return !first;
}

}  // namespace

std::string export_lp(const MipModel& model) {
  std::ostringstream out;
  out << "\\ Production assignment and scheduling, mixed-integer convex model\n";
  out << "Minimize\n obj: ";
  const bool has_linear = write_terms(out, model, model.linear_objective);
  if (!model.quadratic_objective.empty()) {
    out << (has_linear ? " + " : "") << "[ ";
    for (std::size_t k = 0; k < model.quadratic_objective.size(); ++k) {
      const auto& q = model.quadratic_objective[k];
      out << (k ? " + " : "") << 2 * q.coeff << ' ' << model.variables[q.var].name << " ^ 2";
    }
    out << " ] / 2";
  } else if (!has_linear) {
    out << "0";
  }
  out << "\nSubject To\n";
  for (const auto& row : model.rows) {
    out << ' ' << row.name << ": ";
    if (!write_terms(out, model, row.terms)) out << "0 " << model.variables.front().name;
    switch (row.sense) {
      case MipModel::Sense::le: out << " <= "; break;
      case MipModel::Sense::ge: out << " >= "; break;
      case MipModel::Sense::eq: out << " = "; break;
    }
    out << row.rhs << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : model.variables)
    if (v.kind == MipModel::VarKind::continuous) out << ' ' << v.name << " >= 0\n";
  out << "Binary\n";
  for (const auto& v : model.variables)
    if (v.kind == MipModel::VarKind::binary) out << ' ' << v.name << '\n';
  out << "End\n";
  return out.str();
}

Assignment encode_schedule_to_assignment(const ProblemInstance& inst, const Schedule& sched) {
  if (auto v = validate_schedule(inst, sched); !v.empty())
    throw ScheduleError("infeasible schedule: " + v.front().to_string());
  Assignment a;
  for (MachineId m = 1; m <= inst.n_machines; ++m) {
    const auto& seq = sched.on(m);
    std::int64_t cumulative = 0;
    JobId prev = 0;
    for (JobId j : seq) {
      a[x_name(m, prev, j)] = 1;
      cumulative += inst.p(j, m);
      a[u_name(m, j)] = static_cast<double>(cumulative);
      prev = j;
    }
    if (!seq.empty()) a[x_name(m, prev, 0)] = 1;
    a[t_name(m)] = static_cast<double>(cumulative);
  }
  return a;
}

AssignmentCheck check_assignment(const MipModel& model, const Assignment& assignment) {
  constexpr double tol = 1e-9;
  std::vector<double> values(model.variables.size(), 0.0);
  for (const auto& [name, val] : assignment) {
    auto id = model.find(name);
    if (!id) throw Error("unknown variable " + name);
    values[*id] = val;
  }

  AssignmentCheck result;
  for (std::size_t k = 0; k < model.variables.size(); ++k) {
    const double x = values[k];
    if (model.variables[k].kind == MipModel::VarKind::binary) {
      if (std::abs(x) > tol && std::abs(x - 1.0) > tol)
        result.violations.push_back(model.variables[k].name + ": not binary");
    } else if (x < -tol) {
      result.violations.push_back(model.variables[k].name + ": negative");
    }
  }
  for (const auto& row : model.rows) {
    double lhs = 0.0;
    for (const auto& t : row.terms) lhs += static_cast<double>(t.coeff) * values[t.var];
    const double rhs = static_cast<double>(row.rhs);
    bool ok = true;
    switch (row.sense) {
      case MipModel::Sense::le: ok = lhs <= rhs + tol; break;
      case MipModel::Sense::ge: ok = lhs >= rhs - tol; break;
      case MipModel::Sense::eq: ok = std::abs(lhs - rhs) <= tol; break;
    }
    if (!ok) result.violations.push_back(row.name);
  }
  for (const auto& t : model.linear_objective) result.objective += static_cast<double>(t.coeff) * values[t.var];
  for (const auto& q : model.quadratic_objective)
    result.objective += static_cast<double>(q.coeff) * values[q.var] * values[q.var];
  return result;
}

Assignment parse_assignment(std::string_view text) {
  Assignment a;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string name;
    double value = 0.0;
    if (!(fields >> name >> value)) throw Error("assignment line " + std::to_string(lineno) + ": expected 'name value'");
    a[name] = value;
  }
  return a;
}

std::string serialize_assignment(const Assignment& a) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& [name, value] : a) out << name << ' ' << value << '\n';
  return out.str();
}

}  // namespace schedbal
