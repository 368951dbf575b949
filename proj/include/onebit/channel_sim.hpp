// SPDX-License-Identifier: Apache-2.0

#ifndef ONEBIT_CHANNEL_SIM_HPP
#define ONEBIT_CHANNEL_SIM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

#include "onebit/config.hpp"
#include "onebit/model.hpp"

namespace onebit {

/// Random stream for one Monte Carlo trial.
///
/// Streams are keyed by (seed, index...) through a SplitMix64 mix, so trial k of a
/// run sees the same numbers regardless of which thread executes it.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent substream for the given key path.
  static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  double normal() { return normal_(engine_); }
  /// Circular complex Gaussian with E|z|^2 = variance.
  Complex complex_normal(double variance = 1.0);
  std::uint64_t next_u64() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

/// True channel vec(H') and the prior assumed for it.
struct ChannelState {
  ComplexVector h_true;
  ComplexMatrix cov_assumed;
};

/// C_n = variance * (I_{N_r} (x) shape), kept factored.
struct NoiseCovariance {
  double variance = 1.0;
  RealMatrix shape;  ///< per-antenna G G^T
  Index n_rx = 1;

  Index size() const { return shape.rows() * n_rx; }
  RealMatrix dense() const;
  RealVector diagonal() const;
};

/// One quantized pilot observation.
struct QuantizedBatch {
  ComplexVector y_unquantized;
  ComplexVector y_quantized;
  ComplexMatrix phi_p;
  NoiseCovariance noise_cov;
};

/// i.i.d. CN(0, 1) channel entries with identity prior covariance.
ChannelState draw_channel(Rng& rng, const SystemConfig& cfg);

/// Deterministic tau x N_t matrix over {1, j, -1, -j} with orthogonal columns.
///
/// Uses repeated Sylvester-Hadamard columns when a power of two >= N_t divides tau,
/// otherwise a depth-first search over quaternary sequences (tau <= 24).
/// Throws InvalidArgument when no design is available.
ComplexMatrix orthogonal_pilot_pattern(int tau, int n_users);

/// QPSK pilots with X^H X = tau I: the orthogonal pattern times (1+j)/sqrt(2),
/// with every time instant rotated by a random quarter turn.
ComplexMatrix draw_pilots(Rng& rng, const SystemConfig& cfg);

/// Filtered noise (I_{N_r} (x) G) w with w ~ CN(0, sigma^2 I), length M N N_r
/// for the block length of `model`.
ComplexVector draw_noise(Rng& rng, const EquivalentModel& model, double noise_std);

/// Per-component 1-bit quantizer onto {(+-1 +- j)/sqrt(2)}; zero maps to +.
ComplexVector quantize(const ComplexVector& y);

/// vec(X) for a tau x N_t pilot matrix, the layout build_phi expects.
ComplexVector pilot_block(const ComplexMatrix& pilots);

/// y_p = Phi_p h' + n_p and its quantized version. `model` must describe a block of
/// pilots.rows() symbols.
QuantizedBatch simulate_pilot_batch(Rng& rng, const ChannelState& channel, const ComplexMatrix& pilots,
                                    const EquivalentModel& model, double noise_std);

}  // namespace onebit

#endif
