// SPDX-License-Identifier: Apache-2.0

#include "onebit/channel_sim.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <vector>

#include "onebit/errors.hpp"

namespace onebit {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t state = splitmix64(seed);
  for (std::uint64_t k : keys) state = splitmix64(state ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return Rng(state);
}

Complex Rng::complex_normal(double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

RealMatrix NoiseCovariance::dense() const {
  const Index n = shape.rows();
  RealMatrix out = RealMatrix::Zero(n * n_rx, n * n_rx);
  for (Index r = 0; r < n_rx; ++r) out.block(r * n, r * n, n, n) = variance * shape;
  return out;
}

RealVector NoiseCovariance::diagonal() const {
  return (variance * shape.diagonal()).replicate(n_rx, 1);
}

ChannelState draw_channel(Rng& rng, const SystemConfig& cfg) {
  const Index n = cfg.channel_len();
  ChannelState out;
  out.h_true.resize(n);
  for (Index i = 0; i < n; ++i) out.h_true[i] = rng.complex_normal();
  out.cov_assumed = ComplexMatrix::Identity(n, n);
  return out;
}

namespace {

// Gaussian-integer sum of j^(b - a) terms, tracked per earlier column.
struct Partial {
  int re = 0;
  int im = 0;
};

constexpr int kRootRe[4] = {1, 0, -1, 0};
constexpr int kRootIm[4] = {0, 1, 0, -1};

class QuaternarySearch {
public:
  QuaternarySearch(int tau, int n_cols) : tau_(tau), n_cols_(n_cols), cols_(n_cols, std::vector<int>(tau, 0)) {}

  bool run() {
    // Column 0 is all ones; every other column starts with 1 (a global phase is free).
    return fill(1, 0);
  }

  const std::vector<std::vector<int>>& columns() const { return cols_; }

private:
  bool fill(int col, int row) {
    if (col == n_cols_) return true;
    if (++visited_ > kBudget) return false;
    if (row == tau_) {
      for (int prev = 0; prev < col; ++prev) {
        const Partial p = inner(prev, col, tau_);
        if (p.re != 0 || p.im != 0) return false;
      }
      return fill(col + 1, 0);
    }
    const int last = row == 0 ? 0 : 3;
    for (int v = 0; v <= last; ++v) {
      cols_[col][row] = v;
      if (feasible(col, row + 1) && fill(col, row + 1)) return true;
    }
    return false;
  }

  Partial inner(int a, int b, int upto) const {
    Partial p;
    for (int n = 0; n < upto; ++n) {
      const int e = ((cols_[b][n] - cols_[a][n]) % 4 + 4) % 4;
      p.re += kRootRe[e];
      p.im += kRootIm[e];
    }
    return p;
  }

  // The remaining entries must be able to cancel every partial inner product.
  bool feasible(int col, int filled) const {
    const int remaining = tau_ - filled;
    for (int prev = 0; prev < col; ++prev) {
      const Partial p = inner(prev, col, filled);
      if (std::abs(p.re) + std::abs(p.im) > remaining) return false;
    }
    return true;
  }

  static constexpr long kBudget = 20'000'000;
  int tau_;
  int n_cols_;
  long visited_ = 0;
  std::vector<std::vector<int>> cols_;
};

}  // namespace

ComplexMatrix orthogonal_pilot_pattern(int tau, int n_users) {
  if (n_users < 1) throw InvalidArgument("pilot design: n_users must be >= 1");
  if (tau < n_users) {
    throw InvalidArgument("pilot design: pilot length " + std::to_string(tau) + " is shorter than n_users " +
                          std::to_string(n_users));
  }

  int order = 1;
  while (order < n_users) order *= 2;
  for (; order <= tau; order *= 2) {
    if (tau % order != 0) continue;
    // Sylvester-Hadamard entry (i, j) = (-1)^popcount(i & j), tiled down the rows.
    ComplexMatrix out(tau, n_users);
    for (int n = 0; n < tau; ++n) {
      for (int t = 0; t < n_users; ++t) {
        out(n, t) = std::popcount(unsigned(n % order) & unsigned(t)) % 2 ? -1.0 : 1.0;
      }
    }
    return out;
  }

  if (n_users > 1 && tau % 2 != 0) {
    throw InvalidArgument("pilot design: no orthogonal quaternary design exists for odd pilot length " +
                          std::to_string(tau) + " with more than one user");
  }
  if (tau > 24) {
    throw InvalidArgument("pilot design: pilot length " + std::to_string(tau) +
                          " admits no Hadamard tiling and is too long for the quaternary search");
  }
  QuaternarySearch search(tau, n_users);
  if (!search.run()) {
    throw InvalidArgument("pilot design: no orthogonal quaternary design found for tau=" + std::to_string(tau) +
                          ", n_users=" + std::to_string(n_users));
  }
  ComplexMatrix out(tau, n_users);
  for (int n = 0; n < tau; ++n) {
    for (int t = 0; t < n_users; ++t) {
      const int e = search.columns()[t][n];
      out(n, t) = Complex(kRootRe[e], kRootIm[e]);
    }
  }
  return out;
}

ComplexMatrix draw_pilots(Rng& rng, const SystemConfig& cfg) {
  ComplexMatrix x = orthogonal_pilot_pattern(cfg.pilot_len, cfg.n_users);
  const Complex qpsk(std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0);
  const Complex quarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (Index n = 0; n < x.rows(); ++n) x.row(n) *= qpsk * quarter[rng.next_u64() >> 62];
  return x;
}

ComplexVector draw_noise(Rng& rng, const EquivalentModel& model, double noise_std) {
  const RealMatrix& g = model.g_mat;
  const Index n_rx = model.dims.n_rx;
  const double variance = noise_std * noise_std;
  ComplexVector out(g.rows() * n_rx);
  ComplexVector w(g.cols());
  for (Index r = 0; r < n_rx; ++r) {
    for (Index i = 0; i < w.size(); ++i) w[i] = rng.complex_normal(variance);
    out.segment(r * g.rows(), g.rows()) = g.cast<Complex>() * w;
  }
  return out;
}

ComplexVector quantize(const ComplexVector& y) {
  const double level = std::numbers::sqrt2 / 2.0;
  ComplexVector out(y.size());
  for (Index i = 0; i < y.size(); ++i) {
    out[i] = {y[i].real() >= 0.0 ? level : -level, y[i].imag() >= 0.0 ? level : -level};
  }
  return out;
}

ComplexVector pilot_block(const ComplexMatrix& pilots) {
  return Eigen::Map<const ComplexVector>(pilots.data(), pilots.size());
}

QuantizedBatch simulate_pilot_batch(Rng& rng, const ChannelState& channel, const ComplexMatrix& pilots,
                                    const EquivalentModel& model, double noise_std) {
  if (pilots.rows() != model.dims.block_len || pilots.cols() != model.dims.n_users) {
    throw InvalidArgument("simulate_pilot_batch: pilot matrix is " + std::to_string(pilots.rows()) + "x" +
                          std::to_string(pilots.cols()) + ", model expects " +
                          std::to_string(model.dims.block_len) + "x" + std::to_string(model.dims.n_users));
  }
  if (channel.h_true.size() != model.dims.channel_len()) {
    throw InvalidArgument("simulate_pilot_batch: channel length does not match N_r*N_t");
  }
  QuantizedBatch out;
  out.phi_p = build_phi(pilot_block(pilots), model);
  out.y_unquantized = out.phi_p * channel.h_true + draw_noise(rng, model, noise_std);
  out.y_quantized = quantize(out.y_unquantized);
  out.noise_cov.variance = noise_std * noise_std;
  out.noise_cov.shape = model.noise_shape();
  out.noise_cov.n_rx = model.dims.n_rx;
  return out;
}

}  // namespace onebit
