// SPDX-License-Identifier: Apache-2.0

#ifndef ONEBIT_FISHER_HPP
#define ONEBIT_FISHER_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>

#include "onebit/channel_sim.hpp"
#include "onebit/config.hpp"
#include "onebit/gaussian.hpp"

namespace onebit {

/// Fisher information over the stacked real parameter [Re h'; Im h'].
struct FisherResult {
  enum class Kind { exact_white, lower_bound_colored };

  RealMatrix fi_matrix;
  RealVector crb_diag;  ///< diag(F^-1); empty until crb() has been applied
  Kind kind = Kind::exact_white;
};

/// Exact FI of the 1-bit observations for symbol-rate sampling (white noise).
///
/// `noise_std` is the standard deviation of the complex noise samples. Throws
/// InvalidArgument unless cfg.oversampling == 1.
FisherResult fisher_white(const ComplexMatrix& phi, const ComplexVector& h, double noise_std, const SystemConfig& cfg);

/// Noiseless real and imaginary outputs [a^R; a^I] = stack_real(Phi) [Re h; Im h].
RealVector noiseless_outputs(const ComplexMatrix& phi, const ComplexVector& h);

/// Means of the quantized outputs, [mu^R; mu^I], for a real symmetric noise
/// covariance C_n (complex samples, each real part has variance C_kk / 2).
RealVector quantized_mean(const ComplexMatrix& phi, const ComplexVector& h, const RealMatrix& c_n);

/// d[mu^R; mu^I] / d[Re h; Im h], a 2K x 2P matrix.
RealMatrix quantized_mean_grad(const ComplexMatrix& phi, const ComplexVector& h, const RealMatrix& c_n);

/// Covariances of the quantized real parts and imaginary parts (they are uncorrelated).
struct QuantizedCov {
  RealMatrix real_part;
  RealMatrix imag_part;
};

/// OpenMP kernel: upper triangle only, pairs with [C_n]_kn == 0 are exactly zero.
QuantizedCov quantized_cov(const ComplexMatrix& phi, const ComplexVector& h, const RealMatrix& c_n);

/// Serial reference: every (k, n) pair through the orthant kernel.
QuantizedCov quantized_cov_reference(const ComplexMatrix& phi, const ComplexVector& h, const RealMatrix& c_n);

/// Moment-based lower bound J^T C^-1 J summed over real and imaginary parts.
///
/// Independent groups of samples (connected components of the nonzero pattern of
/// C_n) are solved separately. A group whose covariance has condition number above
/// 1e12 gets 1e-10 added to its diagonal; SingularError if it is still not positive definite.
FisherResult fisher_lower_bound(const ComplexMatrix& phi, const ComplexVector& h, const RealMatrix& c_n);

/// diag(F^-1). Throws SingularError (carrying the condition number) when F is not
/// positive definite to working precision.
RealVector crb(const FisherResult& fi);

/// Eigenvalue condition number of a symmetric matrix (inf when the minimum eigenvalue is <= 0).
double condition_number(const RealMatrix& symmetric);

/// Estimator under study: stacked real estimate for a stacked real true parameter,
/// drawing all randomness from `rng`.
using StackedEstimator = std::function<RealVector(const RealVector& h_stacked, Rng& rng)>;

struct BiasedBound {
  RealMatrix jacobian;  ///< d E{estimate} / d h, by central differences
  RealVector bound;     ///< diag(J F^-1 J^T)
};

/// Central-difference Jacobian of the estimator mean with common random numbers
/// (draw m uses substream (seed, m) at both +step and -step). Requires n_mc >= 1000.
RealMatrix estimator_mean_jacobian(const StackedEstimator& estimator, const RealVector& h_stacked, int n_mc,
                                   double fd_step, std::uint64_t seed);

/// diag(J F^-1 J^T).
RealVector sandwich_diagonal(const RealMatrix& jacobian, const FisherResult& fi);

BiasedBound biased_bound(const StackedEstimator& estimator, const RealVector& h_stacked, const FisherResult& fi,
                         int n_mc, double fd_step, std::uint64_t seed);

struct FisherSummary {
  double trace = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double mean_crb = 0.0;  ///< NaN when the CRB is unavailable
};

FisherSummary summarize(const FisherResult& fi);
void write_summary(std::ostream& os, const FisherSummary& s);

}  // namespace onebit

#endif
