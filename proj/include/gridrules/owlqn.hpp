#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace gridrules {

/// Smooth part of the objective: returns f(theta) and fills grad.
using SmoothFn = std::function<double(const Eigen::VectorXd& theta, Eigen::VectorXd& grad)>;

struct OwlqnConfig {
  int max_iters = 200;
  int memory = 10;                    // L-BFGS history length
  double curvature_eps = 1e-10;       // pairs with s'y below this are discarded
  double backtrack_ratio = 0.5;       // beta
  double sufficient_decrease = 1e-4;  // gamma
  double tol_grad = 1e-6;             // stop on inf-norm of the pseudo-gradient
  double tol_obj = 1e-9;              // stop on relative objective change
  int max_backtracks = 50;

  static OwlqnConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

enum class OwlqnStatus { ConvergedGrad, ConvergedObj, MaxIters, LineSearchFailed };

const char* to_string(OwlqnStatus s);

struct OwlqnTraceRow {
  double objective = 0.0;
  double pseudo_grad_norm = 0.0;
  double step = 0.0;
  bool quasi_newton = false;
};

struct OwlqnResult {
  Eigen::VectorXd theta;
  double objective = 0.0;
  OwlqnStatus status = OwlqnStatus::MaxIters;
  int iterations = 0;
  std::vector<OwlqnTraceRow> trace;
};

/// Per accepted step, for invariant checks and diagnostics.
struct OwlqnIterRecord {
  int iter = 0;
  double e_prev = 0.0, e_next = 0.0;
  double step = 0.0;
  Eigen::VectorXd theta_prev, theta_next;
  Eigen::VectorXd v;   // negative pseudo-gradient at theta_prev
  Eigen::VectorXd xi;  // orthant signs used for the projection
};
using OwlqnObserver = std::function<void(const OwlqnIterRecord&)>;

/// Componentwise pseudo-derivative of f + sum_i l1_i |theta_i| (five-case rule).
Eigen::VectorXd pseudo_gradient(const Eigen::VectorXd& grad, const Eigen::VectorXd& theta, const Eigen::VectorXd& l1);

/// Orthant signs: sign of theta where nonzero, otherwise the descent sign.
Eigen::VectorXd select_orthant(const Eigen::VectorXd& theta, const Eigen::VectorXd& pseudo_grad);

/// Zero every component whose sign disagrees with the orthant.
Eigen::VectorXd project_orthant(const Eigen::VectorXd& point, const Eigen::VectorXd& orthant);

/// Minimize f(theta) + sum_i l1_i |theta_i| by orthant-wise L-BFGS:
/// pseudo-gradient directions, sign-aligned two-loop steps, and a projected
/// backtracking line search confined to the orthant chosen at each step.
OwlqnResult minimize(const SmoothFn& f, const Eigen::VectorXd& l1, const Eigen::VectorXd& theta0,
                     const OwlqnConfig& cfg, const OwlqnObserver& observer = nullptr);

/// Trace as CSV (iter, objective, pseudo_grad_norm, step, quasi_newton).
std::string trace_csv(const OwlqnResult& result);

}  // namespace gridrules
