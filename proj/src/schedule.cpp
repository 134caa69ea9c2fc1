#include "schedbal/schedule.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace schedbal {

std::vector<Violation> validate_schedule(const ProblemInstance& inst, const Schedule& sched) {
  std::vector<Violation> out;
  if (sched.sequences.size() != static_cast<std::size_t>(inst.n_machines)) {
    out.push_back({"sequences", "machine count does not match instance"});
    return out;
  }
  std::vector<int> seen(inst.n_jobs + 1, 0);
  for (MachineId m = 1; m <= inst.n_machines; ++m) {
    for (JobId j : sched.on(m)) {
      const std::string path = "machine " + std::to_string(m) + ", job " + std::to_string(j);
      if (j < 1 || j > inst.n_jobs) {
        out.push_back({path, "job id out of range"});
        continue;
      }
      if (++seen[j] == 2) out.push_back({path, "duplicate job"});
      if (!inst.is_eligible(j, m)) out.push_back({path, "ineligible machine"});
    }
  }
  for (JobId j = 1; j <= inst.n_jobs; ++j)
    if (seen[j] == 0) out.push_back({"job " + std::to_string(j), "missing job"});
  return out;
}

MachineCost machine_cost(const ProblemInstance& inst, MachineId m, const std::vector<JobId>& seq) {
  MachineCost c;
  JobId prev = 0;
  for (JobId j : seq) {
    c.setup += inst.s(prev, j);
    c.load += inst.p(j, m);
    c.value += inst.v(j, m);
    prev = j;
  }
  return c;
}

std::int64_t combined_of(const ObjectiveWeights& w, const MachineCost& c) {
  return w.setup * c.setup + w.balance * c.load * c.load - w.value * c.value;
}

ObjectiveBreakdown evaluate(const ProblemInstance& inst, const Schedule& sched) {
  if (auto v = validate_schedule(inst, sched); !v.empty())
    throw ScheduleError("infeasible schedule: " + v.front().to_string());
  ObjectiveBreakdown b;
  for (MachineId m = 1; m <= inst.n_machines; ++m) {
    const MachineCost c = machine_cost(inst, m, sched.on(m));
    b.setup_total += c.setup;
    b.balance_sum_sq += c.load * c.load;
    b.value_total += c.value;
  }
  const auto& w = inst.weights;
  b.combined = w.setup * b.setup_total + w.balance * b.balance_sum_sq - w.value * b.value_total;
  return b;
}

std::int64_t relocation_balance_delta(const ProblemInstance& inst, JobId job, MachineId from,
                                      std::int64_t from_load, MachineId to, std::int64_t to_load) {
  if (from == to) return 0;
  const std::int64_t pf = inst.p(job, from);
  const std::int64_t pt = inst.p(job, to);
  // (L-p)^2 - L^2 = p^2 - 2Lp ; (L+p)^2 - L^2 = p^2 + 2Lp
  return (pf * pf - 2 * from_load * pf) + (pt * pt + 2 * to_load * pt);
}

GanttTimeline to_gantt(const ProblemInstance& inst, const Schedule& sched) {
  if (auto v = validate_schedule(inst, sched); !v.empty())
    throw ScheduleError("infeasible schedule: " + v.front().to_string());
  GanttTimeline g;
  g.machines.resize(inst.n_machines);
  for (MachineId m = 1; m <= inst.n_machines; ++m) {
    auto& blocks = g.machines[m - 1];
    std::int64_t clock = 0;
    JobId prev = 0;
    for (JobId j : sched.on(m)) {
      if (const std::int64_t s = inst.s(prev, j); s > 0) {
        blocks.push_back({GanttBlock::Kind::setup, j, clock, clock + s});
        clock += s;
      }
      blocks.push_back({GanttBlock::Kind::processing, j, clock, clock + inst.p(j, m)});
      clock += inst.p(j, m);
      prev = j;
    }
  }
  return g;
}

std::string gantt_to_json(const GanttTimeline& g) {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  doc["machines"] = ojson::array();
  for (std::size_t m = 0; m < g.machines.size(); ++m) {
    ojson row;
    row["machine"] = m + 1;
    row["blocks"] = ojson::array();
    for (const auto& b : g.machines[m]) {
      ojson blk;
      blk["kind"] = b.kind == GanttBlock::Kind::setup ? "setup" : "processing";
      blk["job"] = b.job;
      blk["start"] = b.start;
      blk["end"] = b.end;
      row["blocks"].push_back(std::move(blk));
    }
    doc["machines"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

std::string gantt_to_svg(const GanttTimeline& g) {
  constexpr int px_per_unit = 4;
  constexpr int row_height = 30;
  constexpr int bar_height = 22;
  constexpr int label_width = 60;
  std::int64_t horizon = 0;
  for (const auto& row : g.machines)
    if (!row.empty()) horizon = std::max(horizon, row.back().end);
  const std::int64_t width = label_width + horizon * px_per_unit + 10;
  const std::int64_t height = static_cast<std::int64_t>(g.machines.size()) * row_height + 10;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t m = 0; m < g.machines.size(); ++m) {
    const std::int64_t y = static_cast<std::int64_t>(m) * row_height + 5;
    out << "  <text x=\"4\" y=\"" << y + bar_height - 7 << "\">M" << m + 1 << "</text>\n";
    for (const auto& b : g.machines[m]) {
      const std::int64_t x = label_width + b.start * px_per_unit;
      const std::int64_t w = (b.end - b.start) * px_per_unit;
      const bool setup = b.kind == GanttBlock::Kind::setup;
      out << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << bar_height
          << "\" fill=\"" << (setup ? "#d9d9d9" : "#4e79a7") << "\" stroke=\"#333\"/>\n";
      if (!setup)
        out << "  <text x=\"" << x + 3 << "\" y=\"" << y + bar_height - 7 << "\" fill=\"#fff\">J" << b.job
            << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string serialize_schedule(const Schedule& sched) {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  doc["machines"] = ojson::array();
  for (std::size_t m = 0; m < sched.sequences.size(); ++m) {
    ojson row;
    row["machine"] = m + 1;
    row["jobs"] = sched.sequences[m];
    doc["machines"].push_back(std::move(row));
  }
  return doc.dump() + "\n";
}

Schedule parse_schedule(std::string_view text, int n_machines) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScheduleError(std::string("malformed schedule document: ") + e.what());
  }
  const nlohmann::json* rows = &doc;
  if (doc.is_object()) {
    auto it = doc.find("machines");
    if (it == doc.end()) throw ScheduleError("schedule document: missing field machines");
    rows = &*it;
  }
  if (!rows->is_array()) throw ScheduleError("schedule document: machines must be an array");
  Schedule sched = Schedule::empty(n_machines);
  for (const auto& row : *rows) {
    if (!row.is_object() || !row.contains("machine") || !row.contains("jobs"))
      throw ScheduleError("schedule document: each entry needs machine and jobs");
    if (!row["machine"].is_number_integer()) throw ScheduleError("schedule document: machine must be an integer");
    const int m = row["machine"].get<int>();
    if (m < 1 || m > n_machines) throw ScheduleError("schedule document: machine id out of range");
    for (const auto& j : row["jobs"]) {
      if (!j.is_number_integer()) throw ScheduleError("schedule document: job ids must be integers");
      sched.on(m).push_back(j.get<JobId>());
    }
  }
  return sched;
}

}  // namespace schedbal
