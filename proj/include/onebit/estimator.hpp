// SPDX-License-Identifier: Apache-2.0

#ifndef ONEBIT_ESTIMATOR_HPP
#define ONEBIT_ESTIMATOR_HPP

#include <optional>

#include "onebit/channel_sim.hpp"
#include "onebit/config.hpp"
#include "onebit/model.hpp"

namespace onebit {

/// Linearized quantizer y_Qp = A_p Phi_p h' + (A_p n_p + n_q).
struct BussgangOperator {
  RealVector a_p;         ///< diagonal of A_p, strictly positive
  ComplexMatrix phi_eff;  ///< A_p Phi_p
};

/// Recursive estimate of R_h' = E{h' h'^H}.
struct EstimatorState {
  ComplexMatrix r_hat;
  double forgetting = 0.91;
  int step = 1;

  /// R_hat[1] = 0.
  static EstimatorState initial(Index channel_len, double forgetting);
};

/// C_yp = Phi_p R_h Phi_p^H + C_n.
ComplexMatrix cov_yp(const ComplexMatrix& phi_p, const ComplexMatrix& r_h, const NoiseCovariance& noise);

/// diag(C_yp) without forming the full matrix.
RealVector cov_yp_diagonal(const ComplexMatrix& phi_p, const ComplexMatrix& r_h, const NoiseCovariance& noise);

/// sqrt(2/pi) diag(C)^(-1/2). Throws InvalidArgument on a non-positive diagonal entry.
RealVector bussgang_gain(const ComplexMatrix& c_yp);
RealVector bussgang_gain(const RealVector& c_yp_diagonal);

/// sqrt(2/pi) diag(C)^(-1/2) C, which is E{y_Q y^H}; E{y y_Q^H} is its adjoint.
ComplexMatrix bussgang_cross_cov(const ComplexMatrix& c_yp);

BussgangOperator make_bussgang_operator(const ComplexMatrix& phi_p, const RealVector& a_p);

/// Least squares on the linearized model: argmin ||y_Qp - A_p Phi_p h||^2.
///
/// Solved with column-pivoted Householder QR; pivots below 1e-10 of the largest
/// count as zero and a rank-deficient A_p Phi_p raises SingularError.
ComplexVector lra_ls_estimate(const ComplexVector& y_quantized, const BussgangOperator& op);

/// Z'u: the last column of the leading M x M block of Z, i.e. the M pulse samples
/// [z((M-1)T/M), ..., z(T/M), z(0)] seen within one symbol.
RealVector intra_symbol_pulse(const EquivalentModel& model);

/// The M N_r samples of symbol n, ordered antenna-major (index r*M + m).
ComplexVector symbol_samples(const ComplexVector& y, Index n, const EquivalentModel& model);

/// (x^T (x) I_{N_r} (x) Z'u)^+ y, evaluated through the Kronecker factorization
/// of the pseudo-inverse. Throws InvalidArgument for an all-zero x.
ComplexVector instantaneous_estimate(const ComplexVector& y_q_n, const ComplexVector& x_n,
                                     const EquivalentModel& model);

/// The single-symbol matrix x^T (x) I_{N_r} (x) Z'u itself.
ComplexMatrix single_symbol_matrix(const ComplexVector& x_n, const EquivalentModel& model);

/// R[n+1] = lambda R[n] + h h^H, re-symmetrized.
EstimatorState update_rhat(const EstimatorState& state, const ComplexVector& h_inst);

struct PipelineResult {
  ComplexVector h_hat;
  EstimatorState state;
  BussgangOperator op;
};

/// Instantaneous estimates and the R_hat recursion over every pilot symbol, then A_p
/// from the final R_hat divided by sum_k lambda^k, and the LRA-LS solve. `state`
/// keeps the raw recursion. `genie_cov` replaces R_hat when given.
PipelineResult estimate_channel_pipeline(const QuantizedBatch& batch, const ComplexMatrix& pilots,
                                         const EquivalentModel& model, double forgetting,
                                         const std::optional<ComplexMatrix>& genie_cov = std::nullopt);

/// Bussgang LMMSE comparison estimator, R Phi~^H C_yQ^-1 y_Q with the arcsine law
/// for C_yQ. Uses a dense C_yp, so only for small dimensions.
ComplexVector blmmse_estimate(const QuantizedBatch& batch, const ComplexMatrix& r_h);

}  // namespace onebit

#endif
