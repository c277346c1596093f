#include <cmath>

#include "doctest.h"
#include "gridrules/common.hpp"
#include "gridrules/mathfn.hpp"

using namespace gridrules;

TEST_CASE("normal cdf/ppf known values and round trip") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(normal_ppf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_ppf(0.5) == doctest::Approx(0.0));
  for (double u : {1e-10, 1e-4, 0.12, 0.5, 0.77, 0.9999, 1.0 - 1e-10})
    CHECK(normal_cdf(normal_ppf(u)) == doctest::Approx(u).epsilon(1e-9));
  CHECK_THROWS_AS(normal_ppf(0.0), Error);
  CHECK_THROWS_AS(normal_ppf(1.5), Error);
}

TEST_CASE("regularized incomplete beta against closed forms") {
  // Beta(2,2) has CDF 3x^2 - 2x^3.
  for (double x : {0.1, 0.25, 0.5, 0.9})
    CHECK(reg_inc_beta(2.0, 2.0, x) == doctest::Approx(3 * x * x - 2 * x * x * x).epsilon(1e-12));
  // Beta(1,1) is uniform; Beta(a,1) has CDF x^a.
  CHECK(reg_inc_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(reg_inc_beta(3.0, 1.0, 0.7) == doctest::Approx(0.343).epsilon(1e-12));
  CHECK(reg_inc_beta(2.0, 5.0, 0.0) == 0.0);
  CHECK(reg_inc_beta(2.0, 5.0, 1.0) == 1.0);
  CHECK_THROWS_AS(reg_inc_beta(-1.0, 2.0, 0.5), Error);
}

TEST_CASE("beta ppf inverts the cdf") {
  for (double a : {0.8, 2.0, 5.0})
    for (double b : {1.0, 2.5})
      for (double u : {0.01, 0.3, 0.5, 0.95}) {
        double x = beta_ppf(u, a, b);
        CHECK(reg_inc_beta(a, b, x) == doctest::Approx(u).epsilon(1e-9));
      }
  CHECK(beta_ppf(0.0, 2.0, 2.0) == 0.0);
  CHECK(beta_ppf(1.0, 2.0, 2.0) == 1.0);
}

TEST_CASE("truncated normal ppf") {
  // Wide interval: matches the plain normal quantile.
  CHECK(trunc_normal_ppf(0.975, 0.0, 1.0, -100, 100) == doctest::Approx(1.959963984540054).epsilon(1e-9));
  // Zero sd collapses to the clamped mean.
  CHECK(trunc_normal_ppf(0.3, 5.0, 0.0, 0.0, 10.0) == 5.0);
  CHECK(trunc_normal_ppf(0.3, -3.0, 0.0, 0.0, 10.0) == 0.0);
  // Results stay inside the interval.
  for (double u : {0.001, 0.5, 0.999}) {
    double x = trunc_normal_ppf(u, 1.0, 2.0, 0.0, 1.5);
    CHECK(x >= 0.0);
    CHECK(x <= 1.5);
  }
  // Median of a symmetric truncation is the mean.
  CHECK(trunc_normal_ppf(0.5, 2.0, 1.0, 1.0, 3.0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(trunc_normal_ppf(0.5, 0.0, -1.0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(trunc_normal_ppf(0.5, 0.0, 1.0, 2.0, 1.0), Error);
}
