#include "schedbal/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "schedbal/random.hpp"

namespace schedbal {

using nlohmann::json;

bool ProblemInstance::is_eligible(JobId j, MachineId m) const {
  const auto& e = eligible[j - 1];
  return std::binary_search(e.begin(), e.end(), m);
}

std::vector<JobId> ProblemInstance::jobs_on(MachineId m) const {
  std::vector<JobId> out;
  for (JobId j = 1; j <= n_jobs; ++j)
    if (is_eligible(j, m)) out.push_back(j);
  return out;
}

ProblemInstance ProblemInstance::with_shape(int n_jobs, int n_machines) {
  ProblemInstance inst;
  inst.n_jobs = n_jobs;
  inst.n_machines = n_machines;
  inst.eligible.assign(n_jobs, {});
  inst.processing.assign(n_jobs, std::vector<std::int64_t>(n_machines, 0));
  inst.value.assign(n_jobs, std::vector<std::int64_t>(n_machines, 0));
  inst.setup.assign(n_jobs, std::vector<std::int64_t>(n_jobs, 0));
  return inst;
}

namespace {

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InstanceError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

std::int64_t as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw InstanceError(path, "expected integer");
  return v.get<std::int64_t>();
}

std::int64_t as_nonneg(const json& v, const std::string& path, const char* what) {
  const std::int64_t x = as_int(v, path);
  if (x < 0) throw InstanceError(path, std::string("negative ") + what);
  return x;
}

int parse_machine_key(const std::string& key, int n_machines, const std::string& path) {
  std::size_t used = 0;
  int m = 0;
  try {
    m = std::stoi(key, &used);
  } catch (const std::exception&) {
    throw InstanceError(path, "machine key is not an integer");
  }
  if (used != key.size()) throw InstanceError(path, "machine key is not an integer");
  if (m < 1 || m > n_machines) throw InstanceError(path, "machine id out of range");
  return m;
}

// Reads a {machine id: int} table and checks its keys are exactly `eligible`.
void read_machine_table(const json& table, const std::vector<MachineId>& eligible, int n_machines,
                        const std::string& path, const char* what, std::vector<std::int64_t>& row) {
  if (!table.is_object()) throw InstanceError(path, "expected object keyed by machine id");
  std::set<int> seen;
  for (const auto& [key, val] : table.items()) {
    const std::string kpath = path + "." + key;
    const int m = parse_machine_key(key, n_machines, kpath);
    if (!std::binary_search(eligible.begin(), eligible.end(), m))
      throw InstanceError(kpath, std::string(what) + " given for ineligible machine");
    row[m - 1] = as_nonneg(val, kpath, what);
    seen.insert(m);
  }
  for (MachineId m : eligible)
    if (!seen.count(m))
      throw InstanceError(path + "." + std::to_string(m), std::string("missing ") + what);
}

}  // namespace

ProblemInstance parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InstanceError("", std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw InstanceError("", "malformed document: expected object");

  const std::int64_t n_machines = as_int(require(doc, "n_machines", ""), "n_machines");
  const std::int64_t n_jobs = as_int(require(doc, "n_jobs", ""), "n_jobs");
  if (n_machines < 1) throw InstanceError("n_machines", "must be positive");
  if (n_jobs < 1) throw InstanceError("n_jobs", "must be positive");

  ProblemInstance inst = ProblemInstance::with_shape(static_cast<int>(n_jobs), static_cast<int>(n_machines));

  if (auto it = doc.find("weights"); it != doc.end()) {
    if (!it->is_object()) throw InstanceError("weights", "expected object");
    inst.weights.setup = as_nonneg(require(*it, "w_setup", "weights"), "weights.w_setup", "weight");
    inst.weights.balance = as_nonneg(require(*it, "w_balance", "weights"), "weights.w_balance", "weight");
    inst.weights.value = as_nonneg(require(*it, "w_value", "weights"), "weights.w_value", "weight");
    if (inst.weights == ObjectiveWeights{0, 0, 0}) throw InstanceError("weights", "all weights are zero");
  }

  const json& jobs = require(doc, "jobs", "");
  if (!jobs.is_array()) throw InstanceError("jobs", "expected array");
  if (jobs.size() != static_cast<std::size_t>(n_jobs))
    throw InstanceError("jobs", "expected " + std::to_string(n_jobs) + " entries");

  std::vector<bool> seen_job(n_jobs + 1, false);
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const std::string path = "jobs[" + std::to_string(k) + "]";
    const json& job = jobs[k];
    if (!job.is_object()) throw InstanceError(path, "expected object");
    const std::int64_t id = as_int(require(job, "id", path), path + ".id");
    if (id < 1 || id > n_jobs) throw InstanceError(path + ".id", "job id out of range");
    if (seen_job[id]) throw InstanceError(path + ".id", "duplicate job id");
    seen_job[id] = true;

    const json& elig = require(job, "eligible", path);
    if (!elig.is_array()) throw InstanceError(path + ".eligible", "expected array");
    if (elig.empty()) throw InstanceError(path + ".eligible", "empty eligibility");
    auto& e = inst.eligible[id - 1];
    for (std::size_t q = 0; q < elig.size(); ++q) {
      const std::string epath = path + ".eligible[" + std::to_string(q) + "]";
      const std::int64_t m = as_int(elig[q], epath);
      if (m < 1 || m > n_machines) throw InstanceError(epath, "eligibility out of range");
      e.push_back(static_cast<MachineId>(m));
    }
    std::sort(e.begin(), e.end());
    if (std::adjacent_find(e.begin(), e.end()) != e.end())
      throw InstanceError(path + ".eligible", "duplicate machine id");

    read_machine_table(require(job, "processing", path), e, inst.n_machines, path + ".processing",
                       "processing time", inst.processing[id - 1]);
    read_machine_table(require(job, "value", path), e, inst.n_machines, path + ".value", "value",
                       inst.value[id - 1]);
  }

  // A single-job instance has no setups to state.
  if (auto it = doc.find("setup"); it != doc.end()) {
    if (!it->is_array() || it->size() != static_cast<std::size_t>(n_jobs))
      throw InstanceError("setup", "expected " + std::to_string(n_jobs) + "x" + std::to_string(n_jobs) + " matrix");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& row = (*it)[i];
      const std::string rpath = "setup[" + std::to_string(i) + "]";
      if (!row.is_array() || row.size() != static_cast<std::size_t>(n_jobs))
        throw InstanceError(rpath, "expected " + std::to_string(n_jobs) + " entries");
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (i == j) continue;  // self-setup is never used
        inst.setup[i][j] = as_nonneg(row[j], rpath + "[" + std::to_string(j) + "]", "setup time");
      }
    }
  } else if (n_jobs > 1) {
    throw InstanceError("setup", "missing field");
  }
  return inst;
}

std::string serialize_instance(const ProblemInstance& inst) {
  using ojson = nlohmann::ordered_json;
  std::ostringstream out;
  out << "{\n";
  out << "  \"n_machines\": " << inst.n_machines << ",\n";
  out << "  \"n_jobs\": " << inst.n_jobs << ",\n";
  out << "  \"weights\": {\"w_setup\": " << inst.weights.setup << ", \"w_balance\": " << inst.weights.balance
      << ", \"w_value\": " << inst.weights.value << "},\n";
  out << "  \"jobs\": [\n";
  for (JobId j = 1; j <= inst.n_jobs; ++j) {
    ojson job;
    job["id"] = j;
    job["eligible"] = inst.eligible_machines(j);
    ojson proc = ojson::object(), val = ojson::object();
    for (MachineId m : inst.eligible_machines(j)) {
      proc[std::to_string(m)] = inst.p(j, m);
      val[std::to_string(m)] = inst.v(j, m);
    }
    job["processing"] = std::move(proc);
    job["value"] = std::move(val);
    out << "    " << job.dump() << (j < inst.n_jobs ? ",\n" : "\n");
  }
  out << "  ],\n";
  out << "  \"setup\": [\n";
  for (int i = 0; i < inst.n_jobs; ++i) {
    out << "    [";
    for (int j = 0; j < inst.n_jobs; ++j) out << (j ? ", " : "") << (i == j ? 0 : inst.setup[i][j]);
    out << (i + 1 < inst.n_jobs ? "],\n" : "]\n");
  }
  out << "  ]\n}\n";
  return out.str();
}

std::vector<Violation> validate_instance(const ProblemInstance& inst) {
  std::vector<Violation> out;
  if (inst.n_machines < 1) out.push_back({"n_machines", "must be positive"});
  if (inst.n_jobs < 1) out.push_back({"n_jobs", "must be positive"});
  const auto& w = inst.weights;
  if (w.setup < 0 || w.balance < 0 || w.value < 0) out.push_back({"weights", "negative weight"});
  if (w == ObjectiveWeights{0, 0, 0}) out.push_back({"weights", "all weights are zero"});

  const auto J = static_cast<std::size_t>(std::max(inst.n_jobs, 0));
  const auto M = static_cast<std::size_t>(std::max(inst.n_machines, 0));
  if (inst.eligible.size() != J || inst.processing.size() != J || inst.value.size() != J) {
    out.push_back({"jobs", "table size does not match n_jobs"});
    return out;
  }
  for (std::size_t j = 0; j < J; ++j) {
    const std::string path = "jobs[" + std::to_string(j) + "]";
    const auto& e = inst.eligible[j];
    if (e.empty()) out.push_back({path + ".eligible", "empty eligibility"});
    if (!std::is_sorted(e.begin(), e.end()) || std::adjacent_find(e.begin(), e.end()) != e.end())
      out.push_back({path + ".eligible", "eligibility not sorted and unique"});
    for (MachineId m : e)
      if (m < 1 || static_cast<std::size_t>(m) > M) out.push_back({path + ".eligible", "eligibility out of range"});
    if (inst.processing[j].size() != M || inst.value[j].size() != M) {
      out.push_back({path, "table size does not match n_machines"});
      continue;
    }
    for (std::size_t m = 0; m < M; ++m) {
      const std::string mpath = "." + std::to_string(m + 1);
      if (inst.processing[j][m] < 0) out.push_back({path + ".processing" + mpath, "negative processing time"});
      if (inst.value[j][m] < 0) out.push_back({path + ".value" + mpath, "negative value"});
    }
  }
  if (inst.setup.size() != J) {
    out.push_back({"setup", "matrix size does not match n_jobs"});
    return out;
  }
  for (std::size_t i = 0; i < J; ++i) {
    if (inst.setup[i].size() != J) {
      out.push_back({"setup[" + std::to_string(i) + "]", "row size does not match n_jobs"});
      continue;
    }
    for (std::size_t j = 0; j < J; ++j)
      if (i != j && inst.setup[i][j] < 0)
        out.push_back({"setup[" + std::to_string(i) + "][" + std::to_string(j) + "]", "negative setup time"});
  }
  return out;
}

ProblemInstance generate_instance(int n_jobs, int n_machines, double eligibility_density, std::uint64_t seed,
                                  const GeneratorRanges& ranges) {
  if (n_jobs < 1) throw Error("generate_instance: n_jobs must be at least 1");
  if (n_machines < 1) throw Error("generate_instance: n_machines must be at least 1");
  if (!(eligibility_density > 0.0) || eligibility_density > 1.0)
    throw Error("generate_instance: eligibility density must be in (0, 1]");

  Rng rng = make_rng(seed);
  ProblemInstance inst = ProblemInstance::with_shape(n_jobs, n_machines);
  for (int j = 0; j < n_jobs; ++j) {
    auto& e = inst.eligible[j];
    for (MachineId m = 1; m <= n_machines; ++m)
      if (uniform_real(rng) < eligibility_density) e.push_back(m);
    if (e.empty()) e.push_back(static_cast<MachineId>(uniform_int(rng, 1, n_machines)));
    for (MachineId m : e) {
      inst.processing[j][m - 1] = uniform_int(rng, ranges.processing_min, ranges.processing_max);
      inst.value[j][m - 1] = uniform_int(rng, ranges.value_min, ranges.value_max);
    }
  }
  for (int i = 0; i < n_jobs; ++i)
    for (int j = 0; j < n_jobs; ++j)
      if (i != j) inst.setup[i][j] = uniform_int(rng, ranges.setup_min, ranges.setup_max);
  return inst;
}

ProblemInstance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError("", "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

void save_instance_file(const ProblemInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << serialize_instance(inst);
}

}  // namespace schedbal
