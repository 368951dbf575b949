// SPDX-License-Identifier: Apache-2.0

#include "onebit/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "onebit/errors.hpp"

namespace onebit {

namespace {

const double kBussgangScale = std::sqrt(2.0 / std::numbers::pi);
constexpr double kVarianceFloor = 1e-12;
constexpr double kRankThreshold = 1e-10;

void check_cov_dims(const ComplexMatrix& phi_p, const ComplexMatrix& r_h, const NoiseCovariance& noise) {
  if (r_h.rows() != phi_p.cols() || r_h.cols() != phi_p.cols()) {
    throw InvalidArgument("cov_yp: R_h is " + std::to_string(r_h.rows()) + "x" + std::to_string(r_h.cols()) +
                          ", expected " + std::to_string(phi_p.cols()) + " square");
  }
  if (noise.size() != phi_p.rows()) throw InvalidArgument("cov_yp: noise covariance does not match Phi_p rows");
}

}  // namespace

EstimatorState EstimatorState::initial(Index channel_len, double forgetting) {
  EstimatorState s;
  s.r_hat = ComplexMatrix::Zero(channel_len, channel_len);
  s.forgetting = forgetting;
  s.step = 1;
  return s;
}

ComplexMatrix cov_yp(const ComplexMatrix& phi_p, const ComplexMatrix& r_h, const NoiseCovariance& noise) {
  check_cov_dims(phi_p, r_h, noise);
  ComplexMatrix c = phi_p * r_h * phi_p.adjoint();
  c += noise.dense().cast<Complex>();
  return 0.5 * (c + c.adjoint());
}

RealVector cov_yp_diagonal(const ComplexMatrix& phi_p, const ComplexMatrix& r_h, const NoiseCovariance& noise) {
  check_cov_dims(phi_p, r_h, noise);
  const ComplexMatrix pr = phi_p * r_h;
  RealVector d = pr.cwiseProduct(phi_p.conjugate()).rowwise().sum().real();
  return d + noise.diagonal();
}

RealVector bussgang_gain(const RealVector& c_yp_diagonal) {
  for (Index i = 0; i < c_yp_diagonal.size(); ++i) {
    if (!(c_yp_diagonal[i] > 0.0)) {
      throw InvalidArgument("bussgang_gain: C_yp diagonal entry " + std::to_string(i) + " is not positive");
    }
  }
  return kBussgangScale * c_yp_diagonal.cwiseSqrt().cwiseInverse();
}

RealVector bussgang_gain(const ComplexMatrix& c_yp) { return bussgang_gain(RealVector(c_yp.diagonal().real())); }

ComplexMatrix bussgang_cross_cov(const ComplexMatrix& c_yp) {
  return bussgang_gain(c_yp).cast<Complex>().asDiagonal() * c_yp;
}

BussgangOperator make_bussgang_operator(const ComplexMatrix& phi_p, const RealVector& a_p) {
  if (a_p.size() != phi_p.rows()) throw InvalidArgument("make_bussgang_operator: A_p size does not match Phi_p");
  return {a_p, a_p.cast<Complex>().asDiagonal() * phi_p};
}

ComplexVector lra_ls_estimate(const ComplexVector& y_quantized, const BussgangOperator& op) {
  if (y_quantized.size() != op.phi_eff.rows()) {
    throw InvalidArgument("lra_ls_estimate: y_Qp has length " + std::to_string(y_quantized.size()) + ", expected " +
                          std::to_string(op.phi_eff.rows()));
  }
  Eigen::ColPivHouseholderQR<ComplexMatrix> qr(op.phi_eff);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < op.phi_eff.cols()) {
    const double cond = qr.maxPivot() / std::max(std::abs(qr.matrixR()(qr.rank(), qr.rank())), 1e-300);
    throw SingularError("lra_ls_estimate: A_p Phi_p has rank " + std::to_string(qr.rank()) + " < " +
                            std::to_string(op.phi_eff.cols()) + " (pilot design too short or degenerate)",
                        cond);
  }
  return qr.solve(y_quantized);
}

RealVector intra_symbol_pulse(const EquivalentModel& model) {
  const Index m = model.dims.oversampling;
  return model.z_mat.topLeftCorner(m, m) * model.u_vec;
}

ComplexVector symbol_samples(const ComplexVector& y, Index n, const EquivalentModel& model) {
  const Index m = model.dims.oversampling;
  const Index per_ant = model.dims.samples_per_antenna();
  const Index n_rx = model.dims.n_rx;
  if (y.size() != per_ant * n_rx) throw InvalidArgument("symbol_samples: observation length mismatch");
  if (n < 0 || n >= model.dims.block_len) throw InvalidArgument("symbol_samples: symbol index out of range");
  ComplexVector out(m * n_rx);
  for (Index r = 0; r < n_rx; ++r) out.segment(r * m, m) = y.segment(r * per_ant + n * m, m);
  return out;
}

ComplexMatrix single_symbol_matrix(const ComplexVector& x_n, const EquivalentModel& model) {
  const Index m = model.dims.oversampling;
  const Index n_rx = model.dims.n_rx;
  const Index n_users = model.dims.n_users;
  if (x_n.size() != n_users) throw InvalidArgument("single_symbol_matrix: x_n must have N_t entries");
  const ComplexVector pulse = intra_symbol_pulse(model).cast<Complex>();
  ComplexMatrix a = ComplexMatrix::Zero(m * n_rx, n_users * n_rx);
  for (Index t = 0; t < n_users; ++t) {
    for (Index r = 0; r < n_rx; ++r) a.block(r * m, t * n_rx + r, m, 1) = x_n[t] * pulse;
  }
  return a;
}

ComplexVector instantaneous_estimate(const ComplexVector& y_q_n, const ComplexVector& x_n,
                                     const EquivalentModel& model) {
  const Index m = model.dims.oversampling;
  const Index n_rx = model.dims.n_rx;
  const Index n_users = model.dims.n_users;
  if (x_n.size() != n_users) throw InvalidArgument("instantaneous_estimate: x_n must have N_t entries");
  if (y_q_n.size() != m * n_rx) throw InvalidArgument("instantaneous_estimate: y_Q[n] must have M*N_r entries");
  const double x_energy = x_n.squaredNorm();
  if (!(x_energy > 0.0)) throw InvalidArgument("instantaneous_estimate: all-zero symbol vector");

  // (x^T (x) I (x) v)^+ = conj(x)/||x||^2 (x) I (x) v^T/||v||^2.
  const RealVector pulse = intra_symbol_pulse(model);
  const double pulse_energy = pulse.squaredNorm();
  ComplexVector per_antenna(n_rx);
  for (Index r = 0; r < n_rx; ++r) {
    per_antenna[r] = pulse.cast<Complex>().dot(y_q_n.segment(r * m, m)) / pulse_energy;
  }
  ComplexVector h(n_users * n_rx);
  for (Index t = 0; t < n_users; ++t) {
    h.segment(t * n_rx, n_rx) = (std::conj(x_n[t]) / x_energy) * per_antenna;
  }
  return h;
}

EstimatorState update_rhat(const EstimatorState& state, const ComplexVector& h_inst) {
  if (h_inst.size() != state.r_hat.rows()) throw InvalidArgument("update_rhat: estimate length mismatch");
  EstimatorState next = state;
  next.r_hat = state.forgetting * state.r_hat;
  next.r_hat.noalias() += h_inst * h_inst.adjoint();
  next.r_hat = 0.5 * (next.r_hat + next.r_hat.adjoint()).eval();
  ++next.step;
  return next;
}

PipelineResult estimate_channel_pipeline(const QuantizedBatch& batch, const ComplexMatrix& pilots,
                                         const EquivalentModel& model, double forgetting,
                                         const std::optional<ComplexMatrix>& genie_cov) {
  const Index tau = pilots.rows();
  if (tau != model.dims.block_len) {
    throw InvalidArgument("estimate_channel_pipeline: model block length must equal the pilot length");
  }
  PipelineResult out;
  out.state = EstimatorState::initial(model.dims.channel_len(), forgetting);
  for (Index n = 0; n < tau; ++n) {
    const ComplexVector y_n = symbol_samples(batch.y_quantized, n, model);
    const ComplexVector h_n = instantaneous_estimate(y_n, pilots.row(n).transpose(), model);
    out.state = update_rhat(out.state, h_n);
  }

  // The recursion sums tau outer products; rescale by the total weight so the
  // plug-in covariance does not grow with the pilot length.
  ComplexMatrix r_norm;
  if (!genie_cov) {
    const double lambda = forgetting;
    const double weight = lambda == 1.0 ? static_cast<double>(tau)
                                        : (1.0 - std::pow(lambda, static_cast<double>(tau))) / (1.0 - lambda);
    r_norm = out.state.r_hat / weight;
  }
  const ComplexMatrix& r = genie_cov ? *genie_cov : r_norm;
  RealVector diag = cov_yp_diagonal(batch.phi_p, r, batch.noise_cov);
  diag = diag.cwiseMax(kVarianceFloor);
  out.op = make_bussgang_operator(batch.phi_p, bussgang_gain(diag));
  out.h_hat = lra_ls_estimate(batch.y_quantized, out.op);
  return out;
}

ComplexVector blmmse_estimate(const QuantizedBatch& batch, const ComplexMatrix& r_h) {
  const ComplexMatrix c_y = cov_yp(batch.phi_p, r_h, batch.noise_cov);
  const RealVector inv_sd = c_y.diagonal().real().cwiseSqrt().cwiseInverse();
  const RealMatrix norm_re = inv_sd.asDiagonal() * c_y.real() * inv_sd.asDiagonal();
  const RealMatrix norm_im = inv_sd.asDiagonal() * c_y.imag() * inv_sd.asDiagonal();
  auto asin_clamped = [](double v) { return std::asin(std::clamp(v, -1.0, 1.0)); };
  ComplexMatrix c_q(c_y.rows(), c_y.cols());
  c_q.real() = (2.0 / std::numbers::pi) * norm_re.unaryExpr(asin_clamped);
  c_q.imag() = (2.0 / std::numbers::pi) * norm_im.unaryExpr(asin_clamped);

  const BussgangOperator op = make_bussgang_operator(batch.phi_p, bussgang_gain(c_y));
  const ComplexMatrix gain = r_h * op.phi_eff.adjoint();
  return gain * c_q.ldlt().solve(batch.y_quantized);
}

}  // namespace onebit
