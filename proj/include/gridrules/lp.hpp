#pragma once

#include <Eigen/Dense>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace gridrules {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LpVariable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  double cost = 0.0;
};

enum class Relation { LessEq, Equal, GreaterEq };

struct LpConstraint {
  std::string name;
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
  Relation rel = Relation::LessEq;
  double rhs = 0.0;
};

/// Minimization LP. Bounds live on the variables; rows are sparse.
struct LinearProgram {
  std::string name = "lp";
  std::vector<LpVariable> vars;
  std::vector<LpConstraint> cons;

  int add_variable(std::string vname, double lower, double upper, double cost);
  void add_constraint(std::string cname, std::vector<std::pair<int, double>> terms, Relation rel, double rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd x;
  int iterations = 0;
};

/// Dense two-phase primal simplex. Dantzig pricing with a switch to Bland's
/// rule after 1000 iterations; feasibility and optimality tolerances 1e-9.
/// Throws Error(Numeric) if the iteration cap is hit.
LpSolution solve_lp(const LinearProgram& lp);

/// Write the program in CPLEX LP text format. Variables listed in
/// `binary_vars` are emitted under a Binary section. Output is byte-stable
/// for identical inputs.
void write_lp_file(const LinearProgram& lp, const std::vector<int>& binary_vars, std::ostream& os);

}  // namespace gridrules
