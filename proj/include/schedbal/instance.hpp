#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace schedbal {

// Job and machine ids are 1-based throughout the public API.
using JobId = int;
using MachineId = int;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the instance parser; `path` names the offending field, e.g.
// "jobs[2].eligible[0]".
class InstanceError : public Error {
 public:
  InstanceError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// A rule broken by an instance or schedule. Violations are data, not errors.
struct Violation {
  std::string field;
  std::string rule;

  std::string to_string() const { return field + ": " + rule; }
  friend bool operator==(const Violation&, const Violation&) = default;
};

// Integer weights of the three objectives. The combined objective is
// setup * setup_total + balance * sum_m t_m^2 - value * value_total.
struct ObjectiveWeights {
  std::int64_t setup = 1;
  std::int64_t balance = 1;
  std::int64_t value = 1;

  friend bool operator==(const ObjectiveWeights&, const ObjectiveWeights&) = default;
};

// Problem data in dense storage. processing/value rows are indexed by
// machine-1 and hold 0 where the job is not eligible; setup is J x J with
// row = predecessor, column = successor. The diagonal of setup is never read
// and is kept at 0.
//
// The struct is a plain aggregate so that invalid data can be represented
// and reported by validate_instance; treat it as immutable once built.
struct ProblemInstance {
  int n_machines = 0;
  int n_jobs = 0;
  ObjectiveWeights weights;
  std::vector<std::vector<MachineId>> eligible;  // per job, sorted ascending
  std::vector<std::vector<std::int64_t>> processing;
  std::vector<std::vector<std::int64_t>> value;
  std::vector<std::vector<std::int64_t>> setup;

  bool is_eligible(JobId j, MachineId m) const;
  const std::vector<MachineId>& eligible_machines(JobId j) const { return eligible[j - 1]; }
  std::int64_t p(JobId j, MachineId m) const { return processing[j - 1][m - 1]; }
  std::int64_t v(JobId j, MachineId m) const { return value[j - 1][m - 1]; }
  // Setup paid when `succ` directly follows `pred`; 0 if either is the dummy job 0.
  std::int64_t s(JobId pred, JobId succ) const {
    return (pred == 0 || succ == 0 || pred == succ) ? 0 : setup[pred - 1][succ - 1];
  }

  // Jobs eligible on machine m, ascending.
  std::vector<JobId> jobs_on(MachineId m) const;

  // Empty instance of the given shape: no eligibility, zero data.
  static ProblemInstance with_shape(int n_jobs, int n_machines);

  friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;
};

// Throws InstanceError with a field path on any malformed or invalid input.
ProblemInstance parse_instance(std::string_view text);

// Canonical JSON document: fixed field order, jobs sorted by id, machine keys
// ascending. Structurally equal instances serialize to identical bytes.
std::string serialize_instance(const ProblemInstance& inst);

std::vector<Violation> validate_instance(const ProblemInstance& inst);

struct GeneratorRanges {
  std::int64_t processing_min = 1, processing_max = 100;
  std::int64_t setup_min = 0, setup_max = 50;
  std::int64_t value_min = 1, value_max = 100;
};

// Deterministic per seed. Each (job, machine) pair is eligible with
// probability `eligibility_density`; a job left without machines gets one
// drawn uniformly.
ProblemInstance generate_instance(int n_jobs, int n_machines, double eligibility_density,
                                  std::uint64_t seed, const GeneratorRanges& ranges = {});

ProblemInstance load_instance_file(const std::string& path);
void save_instance_file(const ProblemInstance& inst, const std::string& path);

}  // namespace schedbal
