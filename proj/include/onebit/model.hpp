// SPDX-License-Identifier: Apache-2.0

#ifndef ONEBIT_MODEL_HPP
#define ONEBIT_MODEL_HPP

#include <iosfwd>
#include <string>

#include "onebit/config.hpp"

namespace onebit {

/// Matched-filter (or pulse-shaping) taps sampled every T/M on [-NT, NT].
struct FilterTaps {
  enum class Normalization { unit_energy };

  RealVector taps;  ///< length 2MN+1, taps[k] is the response at t = (k - MN) T/M
  Normalization normalization = Normalization::unit_energy;
};

/// Closed-form root-raised-cosine impulse response with unit symbol period,
/// before any normalization. Removable singularities use their analytic limits.
double rrc_value(double t, double rolloff);

/// 2MN+1 RRC samples on the T/M grid, scaled to unit energy.
FilterTaps rrc_taps(const SystemConfig& cfg);

/// Noise-shaping matrix: MN x 3MN, row r holds the taps starting at column r.
RealMatrix build_g(const FilterTaps& taps, const SystemConfig& cfg);

/// Discrete convolution of two tap vectors, indexed by lag in [-(L-1), L-1]
/// where L = taps length. Scaled so that the lag-0 value equals 1.
RealVector combined_pulse(const FilterTaps& p_taps, const FilterTaps& m_taps);

/// Toeplitz combined-pulse matrix, Z[i][j] = z((j - i) T/M), z(0) = 1.
RealMatrix build_z(const FilterTaps& p_taps, const FilterTaps& m_taps, const SystemConfig& cfg);

/// Deterministic matrices of the oversampled signal model for one block length.
struct EquivalentModel {
  RealMatrix g_mat;  ///< MN x 3MN
  RealMatrix z_mat;  ///< MN x MN
  RealVector u_vec;  ///< length M, [0 ... 0 1]
  SystemConfig dims;

  /// Builds G and Z from RRC taps (transmit and matched filters identical).
  static EquivalentModel build(const SystemConfig& cfg);

  /// G G^T, the per-antenna noise correlation in units of sigma_n^2.
  RealMatrix noise_shape() const { return g_mat * g_mat.transpose(); }
};

/// Equivalent transmit matrix Phi (MNN_r x N_rN_t) with y = Phi vec(H') + n.
///
/// `x_block` is vec(X) for the N x N_t symbol matrix X, i.e. the N symbols of
/// user 0 followed by those of user 1, matching the column order of H' (x) I_N.
/// vec(H') is column-major (antenna index fastest).
ComplexMatrix build_phi(const ComplexVector& x_block, const EquivalentModel& model);

/// Real-valued stacking [[Re, -Im], [Im, Re]] and [Re h; Im h].
struct RealSystem {
  RealMatrix matrix;
  RealVector params;
};

RealSystem stack_real(const ComplexMatrix& phi, const ComplexVector& h);
RealMatrix stack_real(const ComplexMatrix& phi);
RealVector stack_real(const ComplexVector& h);
ComplexVector unstack_real(const RealVector& stacked);

/// Row-major CSV dump with a `# rows,cols` header line.
void write_matrix_csv(std::ostream& os, const RealMatrix& m);

}  // namespace onebit

#endif
