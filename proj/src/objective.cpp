#include "gridrules/objective.hpp"

#include <cmath>

#include "gridrules/common.hpp"

namespace gridrules {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

std::pair<double, double> soft_weights(const Eigen::VectorXd& theta, const Eigen::VectorXd& p) {
  if (theta.size() != p.size()) fail(ErrorCode::InvalidArgument, "soft_weights: dimension mismatch");
  double wr = sigmoid(theta.dot(p));
  return {1.0 - wr, wr};
}

void NodeObjective::validate() const {
  if (x.rows() < 1) fail(ErrorCode::InvalidArgument, "node objective: no samples");
  if (y.size() != x.rows()) fail(ErrorCode::InvalidArgument, "node objective: label count mismatch");
  if (lambda1 < 0.0 || lambda2 < 0.0) fail(ErrorCode::InvalidArgument, "node objective: negative regularization");
  if (n_classes != 2) fail(ErrorCode::InvalidArgument, "node objective: only binary labels supported");
  for (int i = 0; i < y.size(); ++i)
    if (y(i) < 0 || y(i) >= n_classes) fail(ErrorCode::InvalidArgument, "node objective: label out of range");
  if (offset_index >= static_cast<int>(x.cols()))
    fail(ErrorCode::InvalidArgument, "node objective: offset index out of range");
}

namespace {

constexpr double kWeightFloor = 1e-12;

inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// Entropy of the class-weight split {wk} of total w, in bits.
double entropy(const Eigen::VectorXd& wk, double w) {
  if (w <= kWeightFloor) return 0.0;
  double h = 0.0;
  for (int k = 0; k < wk.size(); ++k) h -= xlog2x(wk(k) / w);
  return h;
}

struct Weights {
  double wl = 0.0, wr = 0.0;
  Eigen::VectorXd wl_k, wr_k;
  Eigen::VectorXd sig;  // per-sample sigma(theta'p)
};

Weights class_weights(const NodeObjective& obj, const Eigen::VectorXd& theta) {
  Weights w;
  const int n = static_cast<int>(obj.x.rows());
  w.sig = (obj.x * theta).unaryExpr([](double z) { return sigmoid(z); });
  w.wl_k = Eigen::VectorXd::Zero(obj.n_classes);
  w.wr_k = Eigen::VectorXd::Zero(obj.n_classes);
  for (int i = 0; i < n; ++i) {
    w.wr_k(obj.y(i)) += w.sig(i);
    w.wl_k(obj.y(i)) += 1.0 - w.sig(i);
  }
  w.wr = w.wr_k.sum();
  w.wl = static_cast<double>(n) - w.wr;
  return w;
}

}  // namespace

SmoothFn NodeObjective::smooth_fn() const {
  validate();
  // Capture by value: the optimizer may outlive the caller's frame.
  NodeObjective obj = *this;
  return [obj](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) -> double {
    const int n = static_cast<int>(obj.x.rows());
    const double inv_n = 1.0 / static_cast<double>(n);
    Weights w = class_weights(obj, theta);

    double etilde = w.wl * entropy(w.wl_k, w.wl) + w.wr * entropy(w.wr_k, w.wr);

    // log2 ratio per class, with clamped weights (the log is unbounded as a
    // class weight approaches zero).
    auto cl = [](double v) { return std::max(v, kWeightFloor); };
    Eigen::VectorXd class_coef(obj.n_classes);
    for (int k = 0; k < obj.n_classes; ++k)
      class_coef(k) =
          std::log2(cl(w.wr)) + std::log2(cl(w.wl_k(k))) - std::log2(cl(w.wl)) - std::log2(cl(w.wr_k(k)));

    Eigen::VectorXd coef(n);
    for (int i = 0; i < n; ++i) coef(i) = w.sig(i) * (1.0 - w.sig(i)) * class_coef(obj.y(i));
    grad = inv_n * (obj.x.transpose() * coef);

    double ridge = 0.0;
    for (int j = 0; j < theta.size(); ++j) {
      if (j == obj.offset_index) continue;
      ridge += theta(j) * theta(j);
      grad(j) += 2.0 * obj.lambda2 * theta(j);
    }
    return inv_n * etilde + obj.lambda2 * ridge;
  };
}

Eigen::VectorXd NodeObjective::l1_weights() const {
  Eigen::VectorXd l1 = Eigen::VectorXd::Constant(x.cols(), lambda1);
  if (offset_index >= 0) l1(offset_index) = 0.0;
  return l1;
}

ObjectiveEval eval_objective(const NodeObjective& obj, const Eigen::VectorXd& theta) {
  obj.validate();
  if (theta.size() != obj.x.cols()) fail(ErrorCode::InvalidArgument, "eval_objective: theta dimension mismatch");

  ObjectiveEval ev;
  Weights w = class_weights(obj, theta);
  ev.w_left = w.wl;
  ev.w_right = w.wr;
  ev.w_left_class = w.wl_k;
  ev.w_right_class = w.wr_k;

  SmoothFn f = obj.smooth_fn();
  ev.grad_smooth.resize(theta.size());
  ev.smooth_value = f(theta, ev.grad_smooth);

  Eigen::VectorXd l1 = obj.l1_weights();
  ev.value = ev.smooth_value + (l1.array() * theta.array().abs()).sum();
  ev.pseudo_grad = pseudo_gradient(ev.grad_smooth, theta, l1);
  return ev;
}

}  // namespace gridrules
