#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "schedbal/instance.hpp"
#include "schedbal/schedule.hpp"

namespace schedbal {

// Mixed-integer convex program over arc variables x_m_i_j (job j directly
// after job i on machine m, job 0 = dummy), cumulative processing u_m_j and
// machine loads t_m. Arc variables exist only between jobs eligible on m.
struct MipModel {
  enum class VarKind { binary, continuous };
  enum class Sense { le, ge, eq };

  struct Variable {
    std::string name;
    VarKind kind;
  };
  struct Term {
    int var;
    std::int64_t coeff;
  };
  struct Row {
    std::string name;
    std::vector<Term> terms;
    Sense sense;
    std::int64_t rhs;
  };

  std::vector<Variable> variables;
  std::map<std::string, int, std::less<>> index;  // name -> variable
  std::vector<Row> rows;
  std::vector<Term> linear_objective;
  std::vector<Term> quadratic_objective;  // coeff * var^2, one per machine
  std::int64_t big_m = 0;
  int n_machines = 0;

  std::optional<int> find(std::string_view name) const;
  int count(VarKind kind) const;
};

struct MipOptions {
  std::optional<std::int64_t> big_m;  // default: sum over jobs of the largest eligible p
};

MipModel build_mip(const ProblemInstance& inst, const MipOptions& options = {});

// Number of MIP variables build_mip would create, without building rows.
std::int64_t count_mip_variables(const ProblemInstance& inst);

// CPLEX LP dialect with the quadratic objective bracket.
std::string export_lp(const MipModel& model);

using Assignment = std::map<std::string, double, std::less<>>;

Assignment encode_schedule_to_assignment(const ProblemInstance& inst, const Schedule& sched);

struct AssignmentCheck {
  std::vector<std::string> violations;
  double objective = 0.0;
};

// Variables missing from the assignment are 0. Throws Error on a name the
// model does not define.
AssignmentCheck check_assignment(const MipModel& model, const Assignment& assignment);

// Assignment files: one "name value" pair per line; blank lines and lines
// starting with '#' are skipped.
Assignment parse_assignment(std::string_view text);
std::string serialize_assignment(const Assignment& a);

}  // namespace schedbal
