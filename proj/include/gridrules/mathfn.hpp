#pragma once

// Scalar distribution functions used by the scenario sampler. All of them are
// deterministic closed-form or iterative evaluations; no <random> distribution
// objects, whose output is implementation-defined.

namespace gridrules {

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF. u must lie in (0, 1).
double normal_ppf(double u);

/// Regularized incomplete beta function I_x(a, b), a, b > 0, x in [0, 1].
double reg_inc_beta(double a, double b, double x);

/// Inverse of the Beta(a, b) CDF. u in [0, 1] maps to [0, 1].
double beta_ppf(double u, double a, double b);

/// Inverse CDF of a normal(mean, sd) truncated to [lo, hi]. u in (0, 1).
double trunc_normal_ppf(double u, double mean, double sd, double lo, double hi);

}  // namespace gridrules
