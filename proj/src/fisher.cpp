// SPDX-License-Identifier: Apache-2.0

#include "onebit/fisher.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "onebit/errors.hpp"
#include "onebit/model.hpp"

namespace onebit {

namespace {

using std::numbers::pi;

constexpr double kRegularizeCondition = 1e12;
constexpr double kRegularization = 1e-10;
constexpr double kSingularCondition = 1e15;

void check_inputs(const ComplexMatrix& phi, const ComplexVector& h, const RealMatrix& c_n) {
  if (phi.cols() != h.size()) throw InvalidArgument("Phi columns do not match the channel length");
  if (c_n.rows() != phi.rows() || c_n.cols() != phi.rows()) {
    throw InvalidArgument("noise covariance is " + std::to_string(c_n.rows()) + "x" + std::to_string(c_n.cols()) +
                          ", expected " + std::to_string(phi.rows()) + " square");
  }
  for (Index k = 0; k < c_n.rows(); ++k) {
    if (!(c_n(k, k) > 0.0)) throw InvalidArgument("noise variance at sample " + std::to_string(k) + " is not positive");
  }
}

// Observation index k in [0, 2K) maps to sample k % K of the real (k < K) or imaginary part.
Index sample_of(Index k, Index n_samples) { return k < n_samples ? k : k - n_samples; }

// Off-diagonal covariance of two quantized outputs with noiseless values a_k, a_n.
double quantized_pair_cov(double a_k, double a_n, double c_kk, double c_kn, double c_nn, double mu_k, double mu_n) {
  OrthantQuery q;
  q.cov = {0.5 * c_kk, 0.5 * c_kn, 0.5 * c_nn};
  q.mean = {a_k, a_n};
  const double both_positive = orthant_probability(q);
  q.mean = {-a_k, -a_n};
  const double both_negative = orthant_probability(q);
  return both_positive + both_negative - 0.5 - mu_k * mu_n;
}

// Groups of samples coupled through nonzero noise covariance.
std::vector<std::vector<Index>> coupled_groups(const RealMatrix& c_n) {
  const Index n = c_n.rows();
  std::vector<Index> parent(n);
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      if (c_n(i, j) != 0.0) parent[find(i)] = find(j);
    }
  }
  std::vector<Index> label(n, -1);
  std::vector<std::vector<Index>> groups;
  for (Index i = 0; i < n; ++i) {
    const Index root = find(i);
    if (label[root] < 0) {
      label[root] = Index(groups.size());
      groups.emplace_back();
    }
    groups[label[root]].push_back(i);
  }
  return groups;
}

// J^T C^-1 J for one group, regularizing C when it is badly conditioned.
RealMatrix information_block(RealMatrix cov, const RealMatrix& jac) {
  const double cond = condition_number(cov);
  if (cond > kRegularizeCondition) cov.diagonal().array() += kRegularization;
  Eigen::LLT<RealMatrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw SingularError("fisher_lower_bound: quantized-output covariance is not positive definite", cond);
  }
  const RealMatrix whitened = llt.matrixL().solve(jac);
  return whitened.transpose() * whitened;
}

}  // namespace

double condition_number(const RealMatrix& symmetric) {
  if (symmetric.size() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(symmetric, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

RealVector noiseless_outputs(const ComplexMatrix& phi, const ComplexVector& h) {
  if (phi.cols() != h.size()) throw InvalidArgument("Phi columns do not match the channel length");
  return stack_real(ComplexVector(phi * h));
}

FisherResult fisher_white(const ComplexMatrix& phi, const ComplexVector& h, double noise_std,
                          const SystemConfig& cfg) {
  if (cfg.oversampling != 1) {
    throw InvalidArgument("fisher_white: exact FI requires oversampling == 1, got " +
                          std::to_string(cfg.oversampling));
  }
  if (!(noise_std > 0.0)) throw InvalidArgument("fisher_white: noise_std must be positive");
  if (phi.cols() != h.size()) throw InvalidArgument("fisher_white: Phi columns do not match the channel length");

  const RealMatrix d = stack_real(phi);
  const RealVector a = d * stack_real(h);
  const double var = noise_std * noise_std;

  // Per-observation weight exp(-a^2/(var/2)) / (pi var Q(x) Q(-x)), x = a sqrt(2)/sigma.
  RealVector w(a.size());
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < a.size(); ++k) {
    const double x = a[k] * std::numbers::sqrt2 / noise_std;
    if (std::abs(x) > 6.0) {
      const double log_w = -x * x - std::log(pi * var) - log_q_function(x) - log_q_function(-x);
      w[k] = std::exp(log_w);
    } else {
      w[k] = std::exp(-x * x) / (pi * var * q_function(x) * q_function(-x));
    }
  }

  FisherResult out;
  out.kind = FisherResult::Kind::exact_white;
  out.fi_matrix = d.transpose() * w.asDiagonal() * d;
  out.fi_matrix = 0.5 * (out.fi_matrix + out.fi_matrix.transpose()).eval();
  return out;
}

RealVector quantized_mean(const ComplexMatrix& phi, const ComplexVector& h, const RealMatrix& c_n) {
  check_inputs(phi, h, c_n);
  const RealVector a = noiseless_outputs(phi, h);
  const Index n_samples = phi.rows();
  RealVector mu(a.size());
  for (Index k = 0; k < a.size(); ++k) {
    const double c_kk = c_n(sample_of(k, n_samples), sample_of(k, n_samples));
    mu[k] = std::numbers::sqrt2 / 2.0 * (1.0 - 2.0 * q_function(a[k] / std::sqrt(c_kk / 2.0)));
  }
  return mu;
}

RealMatrix quantized_mean_grad(const ComplexMatrix& phi, const ComplexVector& h, const RealMatrix& c_n) {
  check_inputs(phi, h, c_n);
  const RealMatrix d = stack_real(phi);
  const RealVector a = d * stack_real(h);
  const Index n_samples = phi.rows();
  RealVector scale(a.size());
  for (Index k = 0; k < a.size(); ++k) {
    const double c_kk = c_n(sample_of(k, n_samples), sample_of(k, n_samples));
    scale[k] = 2.0 * std::exp(-a[k] * a[k] / c_kk) / std::sqrt(2.0 * pi * c_kk);
  }
  return scale.asDiagonal() * d;
}

QuantizedCov quantized_cov(const ComplexMatrix& phi, const ComplexVector& h, const RealMatrix& c_n) {
  check_inputs(phi, h, c_n);
  const RealVector a = noiseless_outputs(phi, h);
  const RealVector mu = quantized_mean(phi, h, c_n);
  const Index n = phi.rows();

  QuantizedCov out{RealMatrix::Zero(n, n), RealMatrix::Zero(n, n)};
  RealMatrix* parts[2] = {&out.real_part, &out.imag_part};
  for (int part = 0; part < 2; ++part) {
    RealMatrix& c = *parts[part];
    const Index off = part * n;
#pragma omp parallel for schedule(dynamic, 8)
    for (Index k = 0; k < n; ++k) {
      c(k, k) = 0.5 - mu[off + k] * mu[off + k];
      for (Index j = k + 1; j < n; ++j) {
        // Independent Gaussian pairs give exactly zero covariance after quantization.
        if (c_n(k, j) == 0.0) continue;
        c(k, j) = quantized_pair_cov(a[off + k], a[off + j], c_n(k, k), c_n(k, j), c_n(j, j), mu[off + k], mu[off + j]);
      }
    }
    c.triangularView<Eigen::StrictlyLower>() = c.transpose().triangularView<Eigen::StrictlyLower>();
  }
  return out;
}

QuantizedCov quantized_cov_reference(const ComplexMatrix& phi, const ComplexVector& h, const RealMatrix& c_n) {
  check_inputs(phi, h, c_n);
  const RealVector a = noiseless_outputs(phi, h);
  const RealVector mu = quantized_mean(phi, h, c_n);
  const Index n = phi.rows();

  QuantizedCov out{RealMatrix(n, n), RealMatrix(n, n)};
  for (int part = 0; part < 2; ++part) {
    RealMatrix& c = part == 0 ? out.real_part : out.imag_part;
    const Index off = part * n;
    for (Index k = 0; k < n; ++k) {
      for (Index j = 0; j < n; ++j) {
        c(k, j) = k == j ? 0.5 - mu[off + k] * mu[off + k]
                         : quantized_pair_cov(a[off + k], a[off + j], c_n(k, k), c_n(k, j), c_n(j, j), mu[off + k],
                                              mu[off + j]);
      }
    }
  }
  return out;
}

FisherResult fisher_lower_bound(const ComplexMatrix& phi, const ComplexVector& h, const RealMatrix& c_n) {
  const QuantizedCov cov = quantized_cov(phi, h, c_n);
  const RealMatrix jac = quantized_mean_grad(phi, h, c_n);
  const Index n = phi.rows();
  const Index p = jac.cols();
  const auto groups = coupled_groups(c_n);

  // One task per (group, part); summed afterwards in a fixed order.
  const Index n_tasks = Index(groups.size()) * 2;
  std::vector<RealMatrix> partial(n_tasks);
#pragma omp parallel for schedule(dynamic, 1)
  for (Index task = 0; task < n_tasks; ++task) {
    const auto& idx = groups[task / 2];
    const int part = int(task % 2);
    const RealMatrix& full = part == 0 ? cov.real_part : cov.imag_part;
    const Index m = Index(idx.size());
    RealMatrix block(m, m);
    RealMatrix jac_block(m, p);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) block(i, j) = full(idx[i], idx[j]);
      jac_block.row(i) = jac.row(part * n + idx[i]);
    }
    partial[task] = information_block(std::move(block), jac_block);
  }

  FisherResult out;
  out.kind = FisherResult::Kind::lower_bound_colored;
  out.fi_matrix = RealMatrix::Zero(p, p);
  for (const auto& f : partial) out.fi_matrix += f;
  out.fi_matrix = 0.5 * (out.fi_matrix + out.fi_matrix.transpose()).eval();
  return out;
}

RealVector crb(const FisherResult& fi) {
  const RealMatrix& f = fi.fi_matrix;
  if (f.rows() != f.cols() || f.rows() == 0) throw InvalidArgument("crb: FI must be a non-empty square matrix");
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(f);
  const RealVector& lambda = eig.eigenvalues();
  const double lo = lambda.minCoeff();
  const double hi = lambda.maxCoeff();
  const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(cond < kSingularCondition)) {
    throw SingularError("crb: Fisher information is singular (condition number " + std::to_string(cond) + ")", cond);
  }
  const RealMatrix& v = eig.eigenvectors();
  return v.cwiseAbs2() * lambda.cwiseInverse();
}

RealMatrix estimator_mean_jacobian(const StackedEstimator& estimator, const RealVector& h_stacked, int n_mc,
                                   double fd_step, std::uint64_t seed) {
  if (n_mc < 1000) throw InvalidArgument("estimator_mean_jacobian: n_mc must be >= 1000");
  if (!(fd_step > 0.0)) throw InvalidArgument("estimator_mean_jacobian: fd_step must be positive");
  const Index p = h_stacked.size();

  RealMatrix jac(p, p);
  for (Index i = 0; i < p; ++i) {
    RealVector plus = h_stacked;
    RealVector minus = h_stacked;
    plus[i] += fd_step;
    minus[i] -= fd_step;
    std::vector<RealVector> diffs(n_mc);
#pragma omp parallel for schedule(static)
    for (int m = 0; m < n_mc; ++m) {
      Rng rng_plus = Rng::substream(seed, {std::uint64_t(m)});
      Rng rng_minus = Rng::substream(seed, {std::uint64_t(m)});
      diffs[m] = estimator(plus, rng_plus) - estimator(minus, rng_minus);
    }
    RealVector sum = RealVector::Zero(p);
    for (const auto& d : diffs) sum += d;
    jac.col(i) = sum / (2.0 * fd_step * n_mc);
  }
  if (!jac.allFinite()) throw NumericalError("estimator_mean_jacobian: non-finite Jacobian entries");
  return jac;
}

RealVector sandwich_diagonal(const RealMatrix& jacobian, const FisherResult& fi) {
  const RealMatrix& f = fi.fi_matrix;
  if (jacobian.cols() != f.rows()) throw InvalidArgument("sandwich_diagonal: Jacobian does not match the FI size");
  Eigen::LDLT<RealMatrix> ldlt(f);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SingularError("sandwich_diagonal: Fisher information is not positive definite", condition_number(f));
  }
  const RealMatrix solved = ldlt.solve(jacobian.transpose());
  return jacobian.cwiseProduct(solved.transpose()).rowwise().sum();
}

BiasedBound biased_bound(const StackedEstimator& estimator, const RealVector& h_stacked, const FisherResult& fi,
                         int n_mc, double fd_step, std::uint64_t seed) {
  BiasedBound out;
  out.jacobian = estimator_mean_jacobian(estimator, h_stacked, n_mc, fd_step, seed);
  out.bound = sandwich_diagonal(out.jacobian, fi);
  return out;
}

FisherSummary summarize(const FisherResult& fi) {
  FisherSummary s;
  s.trace = fi.fi_matrix.trace();
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(fi.fi_matrix, Eigen::EigenvaluesOnly);
  s.min_eigenvalue = eig.eigenvalues().minCoeff();
  s.max_eigenvalue = eig.eigenvalues().maxCoeff();
  s.mean_crb = fi.crb_diag.size() ? fi.crb_diag.mean() : std::numeric_limits<double>::quiet_NaN();
  return s;
}

void write_summary(std::ostream& os, const FisherSummary& s) {
  const auto old = os.precision(17);
  os << "trace=" << s.trace << " min_eig=" << s.min_eigenvalue << " max_eig=" << s.max_eigenvalue
     << " mean_crb=" << s.mean_crb << '\n';
  os.precision(old);
}

}  // namespace onebit
