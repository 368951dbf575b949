// SPDX-License-Identifier: Apache-2.0

#ifndef ONEBIT_CONFIG_HPP
#define ONEBIT_CONFIG_HPP

#include <cstdint>
#include <Eigen/Dense>

namespace onebit {

using Index = Eigen::Index;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Scalar parameters of the oversampled 1-bit uplink.
///
/// The symbol period is fixed to 1; only the ratio T/M enters the model.
struct SystemConfig {
  int n_users = 4;        ///< single-antenna terminals
  int n_rx = 16;          ///< base-station receive antennas
  int oversampling = 1;   ///< samples per symbol, 1 = symbol-rate sampling
  int block_len = 40;     ///< symbols per block
  int pilot_len = 40;     ///< pilot symbols per user
  double rolloff = 0.8;   ///< RRC roll-off
  double noise_std = 1.0; ///< standard deviation of the complex white noise before the matched filter
  double forgetting = 0.91;
  std::uint64_t seed = 1;

  /// Throws InvalidArgument naming the first violated constraint.
  void validate() const;

  /// Same configuration with the block length replaced, e.g. to model a pilot block.
  SystemConfig with_block_len(int n) const;

  Index samples_per_antenna() const { return Index{oversampling} * block_len; }
  Index observation_len() const { return samples_per_antenna() * n_rx; }
  Index channel_len() const { return Index{n_rx} * n_users; }
};

/// Noise standard deviation giving SNR = 10 log10(N_t / sigma^2).
double noise_std_from_snr_db(double snr_db, int n_users);
double snr_db_from_noise_std(double noise_std, int n_users);

}  // namespace onebit

#endif
