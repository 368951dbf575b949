#include "doctest.h"

#include <cmath>
#include <numbers>

#include "onebit/errors.hpp"
#include "onebit/gaussian.hpp"

using namespace onebit;

TEST_CASE("Q-function and its logarithm") {
  struct Row {
    double x, q, log_q;
  };
  // 30-digit mpmath values (tests/oracles/gen_oracles.py).
  const Row rows[] = {
      {0.0, 0.5, -0.69314718055994531},
      {1.0, 0.15865525393145705, -1.8410216450092635},
      {2.5, 0.0062096653257761352, -5.0816482772786905},
      {-1.3, 0.90319951541438967, -0.10181180266765503},
      {8.0, 6.2209605742717841e-16, -35.013437159914550},
      {30.0, 4.9067139271481871e-198, -454.32124395634320},
  };
  for (const Row& r : rows) {
    CAPTURE(r.x);
    CHECK(q_function(r.x) == doctest::Approx(r.q).epsilon(1e-13));
    CHECK(log_q_function(r.x) == doctest::Approx(r.log_q).epsilon(1e-13));
  }
  CHECK(std::isfinite(log_q_function(60.0)));
  CHECK(normal_cdf(1.0) == doctest::Approx(1.0 - 0.15865525393145705).epsilon(1e-14));
}

TEST_CASE("orthant probability at zero mean") {
  OrthantQuery q;
  q.cov = {1.0, 0.0, 1.0};
  CHECK(orthant_probability(q) == doctest::Approx(0.25).epsilon(1e-15));
  q.cov = {1.0, 0.5, 1.0};
  CHECK(std::abs(orthant_probability(q) - 1.0 / 3.0) <= 1e-12);
  for (double rho : {-0.99, -0.9, -0.5, 0.2, 0.7, 0.93, 0.99}) {
    q.cov = {1.0, rho, 1.0};
    CAPTURE(rho);
    CHECK(std::abs(orthant_probability(q) - (0.25 + std::asin(rho) / (2.0 * std::numbers::pi))) <= 1e-10);
  }
}

TEST_CASE("orthant reflection identity") {
  for (double rho : {0.05, 0.3, 0.6, 0.9, 0.95, 0.999}) {
    OrthantQuery pos, neg;
    pos.cov = {1.0, rho, 1.0};
    neg.cov = {1.0, -rho, 1.0};
    CAPTURE(rho);
    CHECK(std::abs(orthant_probability(pos) + orthant_probability(neg) - 0.5) <= 1e-9);
  }
}

TEST_CASE("bivariate upper tail with nonzero limits") {
  struct Row {
    double h, k, rho, p;
  };
  // Direct quadrature of phi(x) Q((k - rho x)/sqrt(1 - rho^2)) in mpmath.
  const Row rows[] = {
      {0.3, -0.4, 0.5, 0.32054516390893748},  {-1.2, 0.7, -0.8, 0.14657056580706268},
      {1.5, 1.0, 0.95, 0.065411428617430168}, {-0.5, -0.5, -0.97, 0.38292540880010902},
      {0.2, 2.1, 0.1, 0.0092628199125065165}, {2.0, -1.0, 0.6, 0.022715160968004842},
  };
  for (const Row& r : rows) {
    CAPTURE(r.rho);
    CHECK(std::abs(bivariate_upper(r.h, r.k, r.rho) - r.p) <= 1e-12);
  }
}

TEST_CASE("orthant probability with mean and scale") {
  // P(z1 > 0, z2 > 0) for z ~ N(m, diag(s) R diag(s)) equals the standardized upper tail.
  OrthantQuery q;
  q.mean = {-0.6, 0.2};
  q.cov = {4.0, 0.5 * 2.0 * 0.5, 0.25};
  CHECK(std::abs(orthant_probability(q) - 0.32054516390893748) <= 1e-12);

  q.mean = {10.0, 10.0};
  for (double rho : {-0.9, 0.0, 0.9}) {
    q.cov = {1.0, rho, 1.0};
    CHECK(orthant_probability(q) >= 1.0 - 1e-6);
  }
}

TEST_CASE("orthant probability rejects degenerate input") {
  OrthantQuery q;
  q.cov = {0.0, 0.0, 1.0};
  CHECK_THROWS_AS(orthant_probability(q), InvalidArgument);
  q.cov = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(orthant_probability(q), InvalidArgument);
}
