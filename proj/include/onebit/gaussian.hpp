// SPDX-License-Identifier: Apache-2.0

#ifndef ONEBIT_GAUSSIAN_HPP
#define ONEBIT_GAUSSIAN_HPP

#include <array>

namespace onebit {

/// Gaussian tail probability Q(x) = P(X > x), X ~ N(0, 1).
double q_function(double x);

/// log Q(x), accurate far into the tail where Q(x) underflows.
double log_q_function(double x);

/// Standard normal CDF.
double normal_cdf(double x);

/// P(X > h, Y > k) for a standard bivariate normal with correlation rho.
///
/// Genz's BVND algorithm: Gauss-Legendre quadrature (6, 12 or 20 nodes by |rho|)
/// over the arcsine representation, with an asymptotic expansion for |rho| >= 0.925.
double bivariate_upper(double h, double k, double rho);

/// A bivariate Gaussian (z1, z2) ~ N(mean, cov).
struct OrthantQuery {
  std::array<double, 2> mean{0.0, 0.0};
  std::array<double, 3> cov{1.0, 0.0, 1.0};  ///< {var1, cov12, var2}

  double correlation() const;
};

/// P(z1 > 0, z2 > 0). Throws InvalidArgument for non-positive variances or |rho| >= 1 - 1e-12.
double orthant_probability(const OrthantQuery& q);

}  // namespace onebit

#endif
