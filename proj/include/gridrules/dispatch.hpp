#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "gridrules/grid.hpp"
#include "gridrules/rules.hpp"
#include "gridrules/sampling.hpp"
#include "json.hpp"

namespace gridrules {

/// Affine map p = a x + b from ED decision variables x = (g, curtailment)
/// to the training feature vector (g, r, l, d, 1).
struct FeatureMap {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;

  Eigen::VectorXd features(const Eigen::VectorXd& x) const { return a * x + b; }
};

FeatureMap build_feature_map(const GridSpec& spec, const DcNetwork& net, const EdProblem& ed,
                             const Scenario& scenario);

/// Physical per-feature bounds for Big-M sizing: unit limits for g, [0,
/// capacity] for r, base ratings for l, the scenario value for d, [1,1] for
/// the offset.
void feature_box(const GridSpec& spec, const Scenario& scenario, Eigen::VectorXd& lo, Eigen::VectorXd& hi);

enum class DispatchStatus { Optimal, AllRulesInfeasible, BaseInfeasible };

const char* to_string(DispatchStatus s);

struct DispatchResult {
  DispatchStatus status = DispatchStatus::AllRulesInfeasible;
  double cost = 0.0;
  Eigen::VectorXd x;         // (g, curtailment)
  Eigen::VectorXd features;  // p at the solution
  int active_leaf = -1;      // leaf_id of the satisfied rule
  double solve_seconds = 0.0;
};

/// Security-constrained ED by per-leaf decomposition: one LP per secure leaf
/// (base ED plus R_i p >= 0), keeping the cheapest feasible one. Equivalent
/// to the Big-M MILP with one-hot indicators.
DispatchResult secure_dispatch(const GridSpec& spec, const DcNetwork& net, const RuleSet& rules,
                               const Scenario& scenario);

/// Unconstrained ED for the same scenario, with features assembled.
DispatchResult base_dispatch(const GridSpec& spec, const DcNetwork& net, const Scenario& scenario);

/// The full Big-M MILP of the rule-constrained ED, with indicator variables
/// to be declared binary. Used for LP-file export and for the enumeration
/// cross-check (pin each indicator to 1 in turn).
struct BigMMilp {
  LinearProgram lp;
  std::vector<int> indicator_vars;  // LP variable indices of I_1..I_G
  int n_ed_vars = 0;
};

BigMMilp build_big_m_milp(const GridSpec& spec, const DcNetwork& net, const RuleSet& rules, const Scenario& scenario,
                          double margin = 1.0);

struct SecurityReport {
  int n_scenarios = 0;
  int base_feasible = 0;
  int base_secure = 0;
  int constrained_feasible = 0;
  int constrained_secure = 0;
  int all_rules_infeasible = 0;
  double avg_base_seconds = 0.0;
  double avg_constrained_seconds = 0.0;
  double avg_base_cost = 0.0;
  double avg_constrained_cost = 0.0;
  std::map<int, int> leaf_activations;

  double base_secure_pct() const { return base_feasible ? 100.0 * base_secure / base_feasible : 0.0; }
  double constrained_secure_pct() const {
    return constrained_feasible ? 100.0 * constrained_secure / constrained_feasible : 0.0;
  }
  nlohmann::json to_json() const;
};

/// Fresh scenarios -> unconstrained ED vs rule-constrained ED, both labeled
/// by the N-1 check. Deterministic in scenario order regardless of workers.
SecurityReport evaluate_security_rate(const GridSpec& spec, const DcNetwork& net, const RuleSet& rules,
                                      const SamplerConfig& sampler, int n_scenarios, std::uint64_t seed, int workers);

}  // namespace gridrules
