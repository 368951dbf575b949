// SPDX-License-Identifier: Apache-2.0

#include "onebit/model.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "onebit/errors.hpp"

namespace onebit {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

}  // namespace

double rrc_value(double t, double rolloff) {
  using std::numbers::pi;
  const double b = rolloff;
  if (std::abs(t) < 1e-12) return 1.0 - b + 4.0 * b / pi;

  const double edge = 1.0 / (4.0 * b);
  if (std::abs(std::abs(t) - edge) < 1e-12) {
    return b / std::numbers::sqrt2 *
           ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * b)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * b)));
  }
  const double num = std::sin(pi * t * (1.0 - b)) + 4.0 * b * t * std::cos(pi * t * (1.0 + b));
  const double den = pi * t * (1.0 - (4.0 * b * t) * (4.0 * b * t));
  return num / den;
}

FilterTaps rrc_taps(const SystemConfig& cfg) {
  require(cfg.rolloff > 0.0 && cfg.rolloff <= 1.0, "rolloff must lie in (0, 1]");
  require(cfg.oversampling >= 1 && cfg.block_len >= 1, "oversampling and block_len must be >= 1");

  const Index half = Index{cfg.oversampling} * cfg.block_len;
  FilterTaps out;
  out.taps.resize(2 * half + 1);
  for (Index k = -half; k <= half; ++k) {
    out.taps[k + half] = rrc_value(double(k) / cfg.oversampling, cfg.rolloff);
  }
  // Evaluating both halves separately can leave last-bit asymmetry.
  for (Index k = 1; k <= half; ++k) {
    const double avg = 0.5 * (out.taps[half + k] + out.taps[half - k]);
    out.taps[half + k] = avg;
    out.taps[half - k] = avg;
  }
  out.taps /= out.taps.norm();
  return out;
}

RealMatrix build_g(const FilterTaps& taps, const SystemConfig& cfg) {
  const Index rows = cfg.samples_per_antenna();
  const Index len = taps.taps.size();
  if (len != 2 * rows + 1) {
    throw InvalidArgument("build_g: expected " + std::to_string(2 * rows + 1) + " taps, got " +
                          std::to_string(len));
  }
  RealMatrix g = RealMatrix::Zero(rows, 3 * rows);
  for (Index r = 0; r < rows; ++r) g.row(r).segment(r, len) = taps.taps.transpose();
  return g;
}

RealVector combined_pulse(const FilterTaps& p_taps, const FilterTaps& m_taps) {
  const Index len = p_taps.taps.size();
  if (m_taps.taps.size() != len) throw InvalidArgument("combined_pulse: tap grids differ in length");

  // z[lag + len - 1] = sum_k p[k] m[lag - k], both indexed from -(len-1)/2.
  RealVector z = RealVector::Zero(2 * len - 1);
  for (Index i = 0; i < len; ++i) {
    for (Index j = 0; j < len; ++j) z[i + j] += p_taps.taps[i] * m_taps.taps[j];
  }
  const double peak = z[len - 1];
  if (!(std::abs(peak) > 0.0)) throw InvalidArgument("combined_pulse: zero lag-0 value");
  return z / peak;
}

RealMatrix build_z(const FilterTaps& p_taps, const FilterTaps& m_taps, const SystemConfig& cfg) {
  const Index n = cfg.samples_per_antenna();
  if (p_taps.taps.size() != 2 * n + 1 || m_taps.taps.size() != 2 * n + 1) {
    throw InvalidArgument("build_z: taps are not sampled on the 2MN+1 grid of this configuration");
  }
  const RealVector z = combined_pulse(p_taps, m_taps);
  const Index center = (z.size() - 1) / 2;
  RealMatrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) out(i, j) = z[center + (j - i)];
  }
  return out;
}

EquivalentModel EquivalentModel::build(const SystemConfig& cfg) {
  cfg.validate();
  const FilterTaps taps = rrc_taps(cfg);
  EquivalentModel m;
  m.g_mat = build_g(taps, cfg);
  m.z_mat = build_z(taps, taps, cfg);
  m.u_vec = RealVector::Zero(cfg.oversampling);
  m.u_vec[cfg.oversampling - 1] = 1.0;
  m.dims = cfg;
  return m;
}

ComplexMatrix build_phi(const ComplexVector& x_block, const EquivalentModel& model) {
  const SystemConfig& d = model.dims;
  const Index n_sym = d.block_len;
  const Index os = d.oversampling;
  const Index n_rx = d.n_rx;
  const Index n_users = d.n_users;
  if (x_block.size() != n_sym * n_users) {
    throw InvalidArgument("build_phi: x_block has length " + std::to_string(x_block.size()) +
                          ", expected N*N_t = " + std::to_string(n_sym * n_users));
  }
  const Index per_ant = n_sym * os;
  if (model.z_mat.rows() != per_ant || model.z_mat.cols() != per_ant) {
    throw InvalidArgument("build_phi: Z does not match the model dimensions");
  }

  // Summing the selection identity vec(H' (x) I_N) = [I (x) sum_n e_n (x) I (x) e_n] vec(H')
  // against x^T (x) I (x) Z(I (x) u) collapses to Phi = [I_Nr (x) v_0, ..., I_Nr (x) v_{Nt-1}]
  // with v_t = Z (I_N (x) u) x_t.
  ComplexMatrix phi = ComplexMatrix::Zero(per_ant * n_rx, n_rx * n_users);
  for (Index t = 0; t < n_users; ++t) {
    ComplexVector upsampled = ComplexVector::Zero(per_ant);
    for (Index n = 0; n < n_sym; ++n) {
      upsampled.segment(n * os, os) = model.u_vec.cast<Complex>() * x_block[t * n_sym + n];
    }
    const ComplexVector v = model.z_mat.cast<Complex>() * upsampled;
    for (Index r = 0; r < n_rx; ++r) phi.block(r * per_ant, t * n_rx + r, per_ant, 1) = v;
  }
  return phi;
}

RealMatrix stack_real(const ComplexMatrix& phi) {
  const Index rows = phi.rows();
  const Index cols = phi.cols();
  RealMatrix out(2 * rows, 2 * cols);
  out.topLeftCorner(rows, cols) = phi.real();
  out.topRightCorner(rows, cols) = -phi.imag();
  out.bottomLeftCorner(rows, cols) = phi.imag();
  out.bottomRightCorner(rows, cols) = phi.real();
  return out;
}

RealVector stack_real(const ComplexVector& h) {
  RealVector out(2 * h.size());
  out << h.real(), h.imag();
  return out;
}

RealSystem stack_real(const ComplexMatrix& phi, const ComplexVector& h) {
  if (phi.cols() != h.size()) throw InvalidArgument("stack_real: Phi columns do not match h length");
  return {stack_real(phi), stack_real(h)};
}

ComplexVector unstack_real(const RealVector& stacked) {
  if (stacked.size() % 2 != 0) throw InvalidArgument("unstack_real: odd length");
  const Index n = stacked.size() / 2;
  ComplexVector out(n);
  for (Index i = 0; i < n; ++i) out[i] = {stacked[i], stacked[n + i]};
  return out;
}

void write_matrix_csv(std::ostream& os, const RealMatrix& m) {
  const auto old = os.precision(17);
  os << "# " << m.rows() << ',' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << m(i, j);
    }
    os << '\n';
  }
  os.precision(old);
}

}  // namespace onebit
