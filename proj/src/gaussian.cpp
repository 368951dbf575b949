// SPDX-License-Identifier: Apache-2.0

#include "onebit/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "onebit/errors.hpp"

namespace onebit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Gauss-Legendre half-rules (negative abscissae) for 6, 12 and 20 nodes.
constexpr double kGlX[3][10] = {
    {-0.9324695142031522, -0.6612093864662647, -0.2386191860831970},
    {-0.9815606342467191, -0.9041172563704750, -0.7699026741943050, -0.5873179542866171,
     -0.3678314989981802, -0.1252334085114692},
    {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259, -0.8391169718222188,
     -0.7463319064601508, -0.6360536807265150, -0.5108670019508271, -0.3737060887154196,
     -0.2277858511416451, -0.7652652113349733e-01}};
constexpr double kGlW[3][10] = {
    {0.1713244923791705, 0.3607615730481384, 0.4679139345726904},
    {0.4717533638651177e-01, 0.1069393259953183, 0.1600783285433464, 0.2031674267230659,
     0.2334925365383547, 0.2491470458134029},
    {0.1761400713915212e-01, 0.4060142980038694e-01, 0.6267204833410906e-01, 0.8327674157670475e-01,
     0.1019301198172404, 0.1181945319615184, 0.1316886384491766, 0.1420961093183821,
     0.1491729864726037, 0.1527533871307259}};
constexpr int kGlHalf[3] = {3, 6, 10};

}  // namespace

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_q_function(double x) {
  if (x < 6.0) return std::log(q_function(x));
  // Q(x) = phi(x) / (x + 1/(x + 2/(x + 3/(x + ...)))), evaluated bottom-up.
  double frac = x;
  for (int n = 60; n >= 1; --n) frac = x + n / frac;
  return -0.5 * x * x - 0.5 * std::log(kTwoPi) - std::log(frac);
}

double bivariate_upper(double h, double k, double rho) {
  const int rule = std::abs(rho) < 0.3 ? 0 : (std::abs(rho) < 0.75 ? 1 : 2);
  const int nodes = kGlHalf[rule];
  const double* x = kGlX[rule];
  const double* w = kGlW[rule];

  double hk = h * k;
  double bvn = 0.0;
  if (std::abs(rho) < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = std::asin(rho);
    for (int i = 0; i < nodes; ++i) {
      double sn = std::sin(asr * (x[i] + 1.0) / 2.0);
      bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      sn = std::sin(asr * (-x[i] + 1.0) / 2.0);
      bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    return bvn * asr / (2.0 * kTwoPi) + normal_cdf(-h) * normal_cdf(-k);
  }

  if (rho < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::abs(rho) < 1.0) {
    const double as = (1.0 - rho) * (1.0 + rho);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-(bs / as + hk) / 2.0) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * normal_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (int i = 0; i < nodes; ++i) {
      double xs = (a * (x[i] + 1.0)) * (a * (x[i] + 1.0));
      double rs = std::sqrt(1.0 - xs);
      bvn += a * w[i] *
             (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
              std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
      xs = as * (-x[i] + 1.0) * (-x[i] + 1.0) / 4.0;
      rs = std::sqrt(1.0 - xs);
      bvn += a * w[i] * std::exp(-(bs / xs + hk) / 2.0) *
             (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs - (1.0 + c * xs * (1.0 + d * xs)));
    }
    bvn = -bvn / kTwoPi;
  }
  if (rho > 0.0) bvn += normal_cdf(-std::max(h, k));
  if (rho < 0.0) bvn = -bvn + std::max(0.0, normal_cdf(-h) - normal_cdf(-k));
  return bvn;
}

double OrthantQuery::correlation() const { return cov[1] / std::sqrt(cov[0] * cov[2]); }

double orthant_probability(const OrthantQuery& q) {
  if (!(q.cov[0] > 0.0) || !(q.cov[2] > 0.0)) {
    throw InvalidArgument("orthant_probability: variances must be positive");
  }
  const double rho = q.correlation();
  if (!(std::abs(rho) < 1.0 - 1e-12)) {
    throw InvalidArgument("orthant_probability: |correlation| must be below 1 - 1e-12");
  }
  // P(z1 > 0, z2 > 0) = P(X > -m1/s1, Y > -m2/s2) for standardized X, Y.
  const double h = -q.mean[0] / std::sqrt(q.cov[0]);
  const double k = -q.mean[1] / std::sqrt(q.cov[2]);
  return std::clamp(bivariate_upper(h, k, rho), 0.0, 1.0);
}

}  // namespace onebit
