// SPDX-License-Identifier: Apache-2.0

#include "onebit/validate.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "onebit/channel_sim.hpp"
#include "onebit/estimator.hpp"
#include "onebit/fisher.hpp"
#include "onebit/gaussian.hpp"
#include "onebit/model.hpp"

namespace onebit {

namespace {

using std::numbers::pi;

SystemConfig tiny(int n_users, int n_rx, int m, int n) {
  SystemConfig c;
  c.n_users = n_users;
  c.n_rx = n_rx;
  c.oversampling = m;
  c.block_len = n;
  c.pilot_len = n;
  return c;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

CheckResult check(const std::string& name, const std::function<std::string(bool&)>& body) {
  CheckResult r{name, true, {}};
  try {
    r.detail = body(r.passed);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  return r;
}

// Direct path (I (x) Z) U (H' (x) I_N) x.
ComplexVector direct_model(const ComplexMatrix& h_mat, const ComplexVector& x, const EquivalentModel& model) {
  const Index n = model.dims.block_len;
  const Index m = model.dims.oversampling;
  const Index n_rx = h_mat.rows();
  ComplexVector y(n_rx * n * m);
  for (Index r = 0; r < n_rx; ++r) {
    ComplexVector up = ComplexVector::Zero(n * m);
    for (Index s = 0; s < n; ++s) {
      Complex acc = 0.0;
      for (Index t = 0; t < h_mat.cols(); ++t) acc += h_mat(r, t) * x[t * n + s];
      up[s * m + m - 1] = acc;
    }
    y.segment(r * n * m, n * m) = model.z_mat.cast<Complex>() * up;
  }
  return y;
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& options) {
  std::vector<CheckResult> out;

  out.push_back(check("rrc_taps_even_unit_energy", [](bool& ok) {
    const FilterTaps t = rrc_taps(tiny(1, 1, 3, 4));
    const double asym = (t.taps - t.taps.reverse()).cwiseAbs().maxCoeff();
    const double energy = t.taps.squaredNorm();
    ok = asym <= 1e-12 && std::abs(energy - 1.0) <= 1e-12;
    return "asymmetry=" + fmt(asym) + " energy-1=" + fmt(energy - 1.0);
  }));

  out.push_back(check("toeplitz_g_z", [](bool& ok) {
    const EquivalentModel model = EquivalentModel::build(tiny(1, 1, 2, 5));
    const RealMatrix& g = model.g_mat;
    const RealMatrix& z = model.z_mat;
    double worst = 0.0;
    for (Index r = 1; r < g.rows(); ++r) {
      worst = std::max(worst, (g.row(r).tail(g.cols() - 1) - g.row(r - 1).head(g.cols() - 1)).cwiseAbs().maxCoeff());
    }
    for (Index i = 0; i + 1 < z.rows(); ++i) {
      for (Index j = 0; j + 1 < z.cols(); ++j) worst = std::max(worst, std::abs(z(i, j) - z(i + 1, j + 1)));
    }
    const double diag = (model.noise_shape().diagonal().array() - 1.0).abs().maxCoeff();
    ok = worst == 0.0 && diag <= 1e-12;
    return "shift_mismatch=" + fmt(worst) + " |diag(GG^T)-1|=" + fmt(diag);
  }));

  out.push_back(check("model_equivalence", [](bool& ok) {
    const EquivalentModel model = EquivalentModel::build(tiny(2, 3, 2, 4));
    Rng rng(7);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      ComplexMatrix h(3, 2);
      for (Index i = 0; i < h.size(); ++i) h(i) = rng.complex_normal();
      ComplexVector x(8);
      for (Index i = 0; i < x.size(); ++i) x[i] = rng.complex_normal();
      const ComplexVector h_vec = Eigen::Map<const ComplexVector>(h.data(), h.size());
      worst = std::max(worst, (build_phi(x, model) * h_vec - direct_model(h, x, model)).norm());
    }
    ok = worst <= 1e-10;
    return "max_residual=" + fmt(worst);
  }));

  out.push_back(check("quantizer", [](bool& ok) {
    Rng rng(11);
    ComplexVector y(64);
    for (Index i = 0; i < y.size(); ++i) y[i] = rng.complex_normal();
    y[0] = 0.0;
    const ComplexVector q = quantize(y);
    const double mag = (q.cwiseAbs2().array() - 1.0).abs().maxCoeff();
    const bool idempotent = quantize(q) == q;
    const bool zero_rule = q[0] == Complex(std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2);
    ok = mag <= 1e-15 && idempotent && zero_rule;
    return "|q|^2-1=" + fmt(mag) + (idempotent ? " idempotent" : " NOT idempotent");
  }));

  out.push_back(check("pilot_orthogonality", [](bool& ok) {
    Rng rng(3);
    SystemConfig c = tiny(4, 1, 1, 40);
    double worst = 0.0;
    for (int tau : {10, 40}) {
      c.pilot_len = tau;
      const ComplexMatrix x = draw_pilots(rng, c);
      worst = std::max(worst, (x.adjoint() * x - tau * ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff());
    }
    ok = worst <= 1e-12;
    return "max|X^H X - tau I|=" + fmt(worst);
  }));

  out.push_back(check("fi_equality_m1", [](bool& ok) {
    double worst = 0.0;
    for (auto [nt, nr, tau] : {std::array{1, 1, 4}, std::array{2, 2, 4}}) {
      const SystemConfig c = tiny(nt, nr, 1, tau);
      const EquivalentModel model = EquivalentModel::build(c);
      Rng rng(100 + nt);
      const ChannelState ch = draw_channel(rng, c);
      const ComplexMatrix phi = build_phi(pilot_block(draw_pilots(rng, c)), model);
      const double sigma = 0.8;
      const RealMatrix c_n = sigma * sigma * RealMatrix::Identity(phi.rows(), phi.rows());
      const RealMatrix exact = fisher_white(phi, ch.h_true, sigma, c).fi_matrix;
      const RealMatrix bound = fisher_lower_bound(phi, ch.h_true, c_n).fi_matrix;
      worst = std::max(worst, (exact - bound).norm() / exact.norm());
    }
    ok = worst <= 1e-6;
    return "max_relative_frobenius=" + fmt(worst);
  }));

  out.push_back(check("orthant_sheppard", [&options](bool& ok) {
    // Closed form 1/4 + asin(rho)/(2 pi); the fault switches in 1/pi.
    const double denom = options.inject_orthant_fault ? pi : 2.0 * pi;
    double worst = 0.0;
    for (double rho : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
      OrthantQuery q;
      q.cov = {1.0, rho, 1.0};
      worst = std::max(worst, std::abs(orthant_probability(q) - (0.25 + std::asin(rho) / denom)));
    }
    ok = worst <= 1e-9;
    return "max_abs_error=" + fmt(worst);
  }));

  out.push_back(check("orthant_reflection", [](bool& ok) {
    double worst = 0.0;
    for (double rho : {0.1, 0.4, 0.8, 0.95}) {
      OrthantQuery pos, neg;
      pos.cov = {1.0, rho, 1.0};
      neg.cov = {1.0, -rho, 1.0};
      worst = std::max(worst, std::abs(orthant_probability(pos) + orthant_probability(neg) - 0.5));
    }
    ok = worst <= 1e-9;
    return "max_abs_error=" + fmt(worst);
  }));

  out.push_back(check("mean_gradient_fd", [](bool& ok) {
    const SystemConfig c = tiny(1, 2, 2, 2);
    const EquivalentModel model = EquivalentModel::build(c);
    Rng rng(5);
    const ChannelState ch = draw_channel(rng, c);
    const ComplexMatrix phi = build_phi(pilot_block(draw_pilots(rng, c)), model);
    NoiseCovariance noise{0.5, model.noise_shape(), c.n_rx};
    const RealMatrix c_n = noise.dense();
    const RealMatrix grad = quantized_mean_grad(phi, ch.h_true, c_n);
    const RealVector h0 = stack_real(ch.h_true);
    const double step = 1e-5;
    double worst = 0.0;
    for (Index i = 0; i < h0.size(); ++i) {
      RealVector hp = h0, hm = h0;
      hp[i] += step;
      hm[i] -= step;
      const RealVector fd = (quantized_mean(phi, unstack_real(hp), c_n) - quantized_mean(phi, unstack_real(hm), c_n)) /
                            (2.0 * step);
      for (Index k = 0; k < fd.size(); ++k) {
        worst = std::max(worst, std::abs(fd[k] - grad(k, i)) / std::max(std::abs(grad(k, i)), 1e-3));
      }
    }
    ok = worst <= 1e-6;
    return "max_relative_error=" + fmt(worst);
  }));

  out.push_back(check("scalar_fi_crb", [](bool& ok) {
    const SystemConfig c = tiny(1, 1, 1, 1);
    ComplexMatrix phi(1, 1);
    phi(0, 0) = 1.0;
    FisherResult fi = fisher_white(phi, ComplexVector::Zero(1), 1.0, c);
    fi.crb_diag = crb(fi);
    const double fi_err = (fi.fi_matrix - 4.0 / pi * RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff();
    const double crb_err = (fi.crb_diag.array() - pi / 4.0).abs().maxCoeff();
    ok = fi_err <= 1e-12 && crb_err <= 1e-12;
    return "fi_error=" + fmt(fi_err) + " crb_error=" + fmt(crb_err);
  }));

  out.push_back(check("lra_ls_noiseless_recovery", [](bool& ok) {
    const SystemConfig c = tiny(2, 2, 2, 4);
    const EquivalentModel model = EquivalentModel::build(c);
    Rng rng(9);
    const ChannelState ch = draw_channel(rng, c);
    const ComplexMatrix phi = build_phi(pilot_block(draw_pilots(rng, c)), model);
    RealVector a_p(phi.rows());
    for (Index i = 0; i < a_p.size(); ++i) a_p[i] = 0.5 + 0.01 * double(i);
    const BussgangOperator op = make_bussgang_operator(phi, a_p);
    const double err = (lra_ls_estimate(op.phi_eff * ch.h_true, op) - ch.h_true).norm();
    ok = err <= 1e-10;
    return "error=" + fmt(err);
  }));

  return out;
}

bool print_validation(std::ostream& os, const std::vector<CheckResult>& results) {
  bool all = true;
  for (const auto& r : results) {
    os << (r.passed ? "PASS " : "FAIL ") << r.name << ' ' << r.detail << '\n';
    all = all && r.passed;
  }
  os << (all ? "all checks passed" : "some checks FAILED") << '\n';
  return all;
}

}  // namespace onebit
