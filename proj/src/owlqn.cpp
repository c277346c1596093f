#include "gridrules/owlqn.hpp"

#include <cmath>
#include <deque>
#include <sstream>

#include "gridrules/common.hpp"

namespace gridrules {

OwlqnConfig OwlqnConfig::from_json(const nlohmann::json& j) {
  OwlqnConfig c;
  c.max_iters = j.value("max_iters", c.max_iters);
  c.memory = j.value("memory", c.memory);
  c.curvature_eps = j.value("curvature_eps", c.curvature_eps);
  c.backtrack_ratio = j.value("backtrack_ratio", c.backtrack_ratio);
  c.sufficient_decrease = j.value("sufficient_decrease", c.sufficient_decrease);
  c.tol_grad = j.value("tol_grad", c.tol_grad);
  c.tol_obj = j.value("tol_obj", c.tol_obj);
  c.max_backtracks = j.value("max_backtracks", c.max_backtracks);
  c.validate();
  return c;
}

nlohmann::json OwlqnConfig::to_json() const {
  return nlohmann::json{{"max_iters", max_iters},
                        {"memory", memory},
                        {"curvature_eps", curvature_eps},
                        {"backtrack_ratio", backtrack_ratio},
                        {"sufficient_decrease", sufficient_decrease},
                        {"tol_grad", tol_grad},
                        {"tol_obj", tol_obj},
                        {"max_backtracks", max_backtracks}};
}

void OwlqnConfig::validate() const {
  if (max_iters < 1 || memory < 1 || max_backtracks < 1)
    fail(ErrorCode::InvalidArgument, "owlqn: counts must be positive");
  if (!(curvature_eps > 0.0) || !(tol_grad > 0.0) || !(tol_obj > 0.0))
    fail(ErrorCode::InvalidArgument, "owlqn: tolerances must be positive");
  if (!(backtrack_ratio > 0.0 && backtrack_ratio < 1.0))
    fail(ErrorCode::InvalidArgument, "owlqn: backtrack ratio must be in (0,1)");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0))
    fail(ErrorCode::InvalidArgument, "owlqn: sufficient-decrease constant must be in (0,1)");
}

const char* to_string(OwlqnStatus s) {
  switch (s) {
    case OwlqnStatus::ConvergedGrad: return "converged_grad";
    case OwlqnStatus::ConvergedObj: return "converged_obj";
    case OwlqnStatus::MaxIters: return "max_iters";
    case OwlqnStatus::LineSearchFailed: return "line_search_failure";
  }
  return "?";
}

namespace {

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

Eigen::VectorXd pseudo_gradient(const Eigen::VectorXd& grad, const Eigen::VectorXd& theta,
                                const Eigen::VectorXd& l1) {
  Eigen::VectorXd pg(grad.size());
  for (int i = 0; i < grad.size(); ++i) {
    double g = grad(i), lam = l1(i);
    if (theta(i) > 0.0)
      pg(i) = g + lam;
    else if (theta(i) < 0.0)
      pg(i) = g - lam;
    else if (g + lam < 0.0)
      pg(i) = g + lam;
    else if (g - lam > 0.0)
      pg(i) = g - lam;
    else
      pg(i) = 0.0;
  }
  return pg;
}

Eigen::VectorXd select_orthant(const Eigen::VectorXd& theta, const Eigen::VectorXd& pseudo_grad) {
  Eigen::VectorXd xi(theta.size());
  for (int i = 0; i < theta.size(); ++i) xi(i) = theta(i) != 0.0 ? sgn(theta(i)) : sgn(-pseudo_grad(i));
  return xi;
}

Eigen::VectorXd project_orthant(const Eigen::VectorXd& point, const Eigen::VectorXd& orthant) {
  Eigen::VectorXd out(point.size());
  for (int i = 0; i < point.size(); ++i) out(i) = sgn(point(i)) == orthant(i) ? point(i) : 0.0;
  return out;
}

namespace {

struct History {
  std::deque<Eigen::VectorXd> s, y;
  std::deque<double> rho;

  void push(const Eigen::VectorXd& sk, const Eigen::VectorXd& yk, double sy, int memory) {
    s.push_back(sk);
    y.push_back(yk);
    rho.push_back(1.0 / sy);
    while (static_cast<int>(s.size()) > memory) {
      s.pop_front();
      y.pop_front();
      rho.pop_front();
    }
  }

  // Two-loop recursion, H0 = (s'y / y'y) I from the newest pair.
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    Eigen::VectorXd d = v;
    const int h = static_cast<int>(s.size());
    std::vector<double> a(h);
    for (int i = h - 1; i >= 0; --i) {
      a[i] = rho[i] * s[i].dot(d);
      d -= a[i] * y[i];
    }
    d *= s.back().dot(y.back()) / y.back().squaredNorm();
    for (int i = 0; i < h; ++i) {
      double b = rho[i] * y[i].dot(d);
      d += (a[i] - b) * s[i];
    }
    return d;
  }
};

}  // namespace

OwlqnResult minimize(const SmoothFn& f, const Eigen::VectorXd& l1, const Eigen::VectorXd& theta0,
                     const OwlqnConfig& cfg, const OwlqnObserver& observer) {
  cfg.validate();
  if (l1.size() != theta0.size()) fail(ErrorCode::InvalidArgument, "owlqn: l1 weight dimension mismatch");
  if (!theta0.allFinite()) fail(ErrorCode::InvalidArgument, "owlqn: theta0 must be finite");
  if ((l1.array() < 0.0).any()) fail(ErrorCode::InvalidArgument, "owlqn: l1 weights must be >= 0");

  auto total = [&](double smooth, const Eigen::VectorXd& theta) {
    return smooth + (l1.array() * theta.array().abs()).sum();
  };

  OwlqnResult res;
  Eigen::VectorXd theta = theta0;
  Eigen::VectorXd grad(theta.size()), grad_next(theta.size());
  double fval = f(theta, grad);
  if (!std::isfinite(fval) || !grad.allFinite()) fail(ErrorCode::Numeric, "owlqn: objective is not finite at theta0");
  double e = total(fval, theta);

  // With no L1 term anywhere the problem is smooth and the solver is plain
  // L-BFGS: no sign-aligned direction clipping, no orthant projection.
  const bool smooth_only = l1.isZero(0.0);

  History hist;
  res.status = OwlqnStatus::MaxIters;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    Eigen::VectorXd pg = pseudo_gradient(grad, theta, l1);
    double pg_norm = pg.lpNorm<Eigen::Infinity>();
    if (iter == 0) res.trace.push_back(OwlqnTraceRow{e, pg_norm, 0.0, false});
    if (pg_norm <= cfg.tol_grad) {
      res.status = OwlqnStatus::ConvergedGrad;
      break;
    }

    Eigen::VectorXd v = -pg;
    bool quasi_newton = !hist.s.empty();
    Eigen::VectorXd q;
    if (quasi_newton) {
      Eigen::VectorXd d = hist.apply(v);
      if (smooth_only) {
        q = d;
      } else {
        // Constrain the quasi-Newton direction to the descent signs.
        Eigen::VectorXd vsigns = v.unaryExpr([](double x) { return sgn(x); });
        q = project_orthant(d, vsigns);
      }
      if (q.isZero(0.0)) {
        q = v;
        quasi_newton = false;
      }
    } else {
      q = v;
    }

    // No orthant applies in the smooth case; record all-zero signs.
    Eigen::VectorXd xi = smooth_only ? Eigen::VectorXd::Zero(theta.size()) : select_orthant(theta, pg);

    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd cand;
    double f_cand = 0.0, e_cand = 0.0;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
      cand = smooth_only ? Eigen::VectorXd(theta + alpha * q) : project_orthant(theta + alpha * q, xi);
      Eigen::VectorXd delta = cand - theta;
      if (!delta.isZero(0.0)) {
        f_cand = f(cand, grad_next);
        if (!std::isfinite(f_cand) || !grad_next.allFinite())
          fail(ErrorCode::Numeric, "owlqn: objective became non-finite during line search");
        e_cand = total(f_cand, cand);
        if (e_cand <= e - cfg.sufficient_decrease * v.dot(delta)) {
          accepted = true;
          break;
        }
      }
      alpha *= cfg.backtrack_ratio;
    }
    if (!accepted) {
      res.status = OwlqnStatus::LineSearchFailed;
      break;
    }

    Eigen::VectorXd sk = cand - theta;
    Eigen::VectorXd yk = grad_next - grad;
    double e_prev = e;

    if (observer) {
      OwlqnIterRecord rec;
      rec.iter = iter;
      rec.e_prev = e_prev;
      rec.e_next = e_cand;
      rec.step = alpha;
      rec.theta_prev = theta;
      rec.theta_next = cand;
      rec.v = v;
      rec.xi = xi;
      observer(rec);
    }

    theta = cand;
    grad.swap(grad_next);
    e = e_cand;
    res.trace.push_back(OwlqnTraceRow{e, pseudo_gradient(grad, theta, l1).lpNorm<Eigen::Infinity>(), alpha,
                                      quasi_newton});
    res.iterations = iter + 1;

    if (e_prev - e <= cfg.tol_obj * std::max(1.0, std::fabs(e_prev))) {
      res.status = OwlqnStatus::ConvergedObj;
      break;
    }

    double sy = sk.dot(yk);
    if (sy > cfg.curvature_eps) hist.push(sk, yk, sy, cfg.memory);
  }

  res.theta = theta;
  res.objective = e;
  return res;
}

std::string trace_csv(const OwlqnResult& result) {
  std::ostringstream os;
  os << "iter,objective,pseudo_grad_norm,step,quasi_newton\n";
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const OwlqnTraceRow& r = result.trace[i];
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%d\n", i, r.objective, r.pseudo_grad_norm, r.step,
                  r.quasi_newton ? 1 : 0);
    os << buf;
  }
  return os.str();
}

}  // namespace gridrules
