#pragma once

#include <Eigen/Dense>
#include <utility>

#include "gridrules/owlqn.hpp"

namespace gridrules {

/// Overflow-safe logistic sigmoid.
double sigmoid(double z);

/// Soft-split weights of a sample: (left, right) = (sigma(-theta'p), sigma(theta'p)).
std::pair<double, double> soft_weights(const Eigen::VectorXd& theta, const Eigen::VectorXd& p);

/// Soft-split node objective: per-sample weighted information entropy
/// (normalized by the sample count) plus elastic-net regularization. The
/// offset coordinate (the constant-1 feature) is exempt from both penalties.
struct NodeObjective {
  Eigen::MatrixXd x;       // [N x dim], includes the constant-1 column
  Eigen::VectorXi y;       // labels in {0, 1}
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  int offset_index = -1;   // -1: no exempt coordinate
  int n_classes = 2;

  void validate() const;

  /// Smooth part f (entropy term + ridge) for the optimizer.
  SmoothFn smooth_fn() const;
  /// Per-coordinate Lasso weights: lambda1 everywhere except the offset.
  Eigen::VectorXd l1_weights() const;
};

struct ObjectiveEval {
  double value = 0.0;         // E = f + Lasso part
  double smooth_value = 0.0;  // f
  Eigen::VectorXd grad_smooth;
  Eigen::VectorXd pseudo_grad;
  double w_left = 0.0, w_right = 0.0;              // W_L, W_R (sum to N)
  Eigen::VectorXd w_left_class, w_right_class;      // per-class weight sums
};

ObjectiveEval eval_objective(const NodeObjective& obj, const Eigen::VectorXd& theta);

}  // namespace gridrules
