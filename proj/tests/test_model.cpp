#include "doctest.h"

#include <array>
#include <cmath>
#include <numbers>

#include "onebit/errors.hpp"
#include "onebit/channel_sim.hpp"
#include "onebit/model.hpp"

using namespace onebit;

namespace {

SystemConfig dims(int n_users, int n_rx, int m, int n) {
  SystemConfig c;
  c.n_users = n_users;
  c.n_rx = n_rx;
  c.oversampling = m;
  c.block_len = n;
  c.pilot_len = n;
  return c;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Literal product (I (x) Z)(I_Nr (x) I_N (x) u)(H' (x) I_N) x, one basis vector of vec(H') at a time.
ComplexMatrix phi_by_kronecker(const ComplexVector& x, const EquivalentModel& model) {
  const SystemConfig& d = model.dims;
  const Index n = d.block_len, n_rx = d.n_rx, n_t = d.n_users;
  const ComplexMatrix z = model.z_mat.cast<Complex>();
  const ComplexMatrix eye_r = ComplexMatrix::Identity(n_rx, n_rx);
  const ComplexMatrix eye_n = ComplexMatrix::Identity(n, n);
  const ComplexMatrix up = kron(kron(eye_r, eye_n), model.u_vec.cast<Complex>());
  const ComplexMatrix filt = kron(eye_r, z);
  ComplexMatrix phi(filt.rows(), n_rx * n_t);
  for (Index j = 0; j < n_rx * n_t; ++j) {
    ComplexMatrix h = ComplexMatrix::Zero(n_rx, n_t);
    h(j % n_rx, j / n_rx) = 1.0;
    phi.col(j) = filt * up * kron(h, eye_n) * x;
  }
  return phi;
}

}  // namespace

TEST_CASE("rrc closed form against high-precision values") {
  CHECK(rrc_value(0.5, 0.4) == doctest::Approx(0.59911012218922048).epsilon(1e-13));
  CHECK(rrc_value(0.3, 0.8) == doctest::Approx(0.90758120324349280).epsilon(1e-13));
  CHECK(rrc_value(1.7, 0.22) == doctest::Approx(-0.090969258049984514).epsilon(1e-12));
  CHECK(rrc_value(-2.25, 0.35) == doctest::Approx(0.065344394316493075).epsilon(1e-12));
}

TEST_CASE("rrc removable singularities use their limits") {
  const double b = 0.8;
  CHECK(rrc_value(0.0, b) == doctest::Approx(1.0 - b + 4.0 * b / std::numbers::pi).epsilon(1e-14));
  CHECK(rrc_value(0.0, b) == doctest::Approx(1.2185916357881302).epsilon(1e-14));
  CHECK(rrc_value(1.0, 0.25) == doctest::Approx(-0.064237155776998622).epsilon(1e-12));
  CHECK(rrc_value(-1.0, 0.25) == doctest::Approx(-0.064237155776998622).epsilon(1e-12));
  CHECK(rrc_value(0.3125, 0.8) == doctest::Approx(0.88398690943700493).epsilon(1e-12));
  // Continuity across the singular point.
  CHECK(rrc_value(0.3125 + 1e-7, 0.8) == doctest::Approx(rrc_value(0.3125, 0.8)).epsilon(1e-6));
}

TEST_CASE("rrc taps are even with unit energy") {
  for (int m : {1, 2, 3}) {
    const FilterTaps t = rrc_taps(dims(1, 1, m, 6));
    REQUIRE(t.taps.size() == 2 * m * 6 + 1);
    CHECK((t.taps - t.taps.reverse()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(t.taps.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("G rows are shifted copies of the taps") {
  SUBCASE("smallest case") {
    FilterTaps t;
    t.taps = RealVector{{0.25, 0.5, 0.75}};
    const RealMatrix g = build_g(t, dims(1, 1, 1, 1));
    REQUIRE(g.rows() == 1);
    REQUIRE(g.cols() == 3);
    CHECK(g(0, 0) == 0.25);
    CHECK(g(0, 1) == 0.5);
    CHECK(g(0, 2) == 0.75);
  }
  SUBCASE("M=2, N=1") {
    const SystemConfig c = dims(1, 1, 2, 1);
    const RealMatrix g = build_g(rrc_taps(c), c);
    REQUIRE(g.rows() == 2);
    REQUIRE(g.cols() == 6);
    for (Index j = 0; j + 1 < 6; ++j) CHECK(g(1, j + 1) == g(0, j));
  }
  SUBCASE("G G^T has unit diagonal") {
    for (int m : {1, 2, 3}) {
      const EquivalentModel model = EquivalentModel::build(dims(1, 1, m, 5));
      CHECK((model.noise_shape().diagonal().array() - 1.0).abs().maxCoeff() <= 1e-12);
    }
  }
  SUBCASE("wrong tap count is rejected") {
    FilterTaps t;
    t.taps = RealVector::Ones(4);
    CHECK_THROWS_AS(build_g(t, dims(1, 1, 1, 1)), InvalidArgument);
  }
}

TEST_CASE("Z is Toeplitz with unit diagonal") {
  const SystemConfig c = dims(1, 1, 2, 2);
  const EquivalentModel model = EquivalentModel::build(c);
  const RealMatrix& z = model.z_mat;
  REQUIRE(z.rows() == 4);
  for (Index i = 0; i < 4; ++i) CHECK(z(i, i) == doctest::Approx(1.0).epsilon(1e-14));
  for (Index i = 0; i + 1 < 4; ++i)
    for (Index j = 0; j + 1 < 4; ++j) CHECK(z(i, j) == z(i + 1, j + 1));

  // First row is the combined pulse at lags 0, T/2, T, 3T/2.
  const FilterTaps t = rrc_taps(c);
  const RealVector pulse = combined_pulse(t, t);
  const Index center = (pulse.size() - 1) / 2;
  for (Index j = 0; j < 4; ++j) CHECK(z(0, j) == pulse[center + j]);
}

TEST_CASE("combined pulse is an independent convolution") {
  FilterTaps a;
  a.taps = RealVector{{1.0, 2.0, 3.0}};
  const RealVector z = combined_pulse(a, a);
  // conv([1 2 3], [1 2 3]) = [1 4 10 12 9], scaled by the lag-0 value 10.
  REQUIRE(z.size() == 5);
  CHECK(z[0] == doctest::Approx(0.1));
  CHECK(z[1] == doctest::Approx(0.4));
  CHECK(z[2] == doctest::Approx(1.0));
  CHECK(z[3] == doctest::Approx(1.2));
  CHECK(z[4] == doctest::Approx(0.9));
}

TEST_CASE("combined pulse peaks at lag zero") {
  for (int m : {1, 2, 3}) {
    const EquivalentModel model = EquivalentModel::build(dims(1, 1, m, 6));
    Index arg = -1;
    model.z_mat.row(0).cwiseAbs().maxCoeff(&arg);
    CHECK(arg == 0);
  }
}

TEST_CASE("Phi matches the literal Kronecker chain") {
  Rng rng(21);
  for (auto [nt, nr, m, n] : {std::array{2, 2, 2, 4}, std::array{1, 3, 3, 2}, std::array{3, 1, 1, 5}}) {
    const EquivalentModel model = EquivalentModel::build(dims(nt, nr, m, n));
    ComplexVector x(nt * n);
    for (Index i = 0; i < x.size(); ++i) x[i] = rng.complex_normal();
    const ComplexMatrix phi = build_phi(x, model);
    CHECK((phi - phi_by_kronecker(x, model)).norm() <= 1e-12);
  }
}

TEST_CASE("Phi scalar collapse and linearity in x") {
  const EquivalentModel one = EquivalentModel::build(dims(1, 1, 1, 1));
  const ComplexMatrix phi = build_phi(ComplexVector::Ones(1), one);
  REQUIRE(phi.rows() == 1);
  REQUIRE(phi.cols() == 1);
  CHECK(std::abs(phi(0, 0) - Complex(1.0)) <= 1e-15);

  const EquivalentModel model = EquivalentModel::build(dims(2, 2, 2, 3));
  Rng rng(4);
  ComplexVector x(6);
  for (Index i = 0; i < 6; ++i) x[i] = rng.complex_normal();
  const Complex alpha(0.3, -1.7);
  CHECK((build_phi(alpha * x, model) - alpha * build_phi(x, model)).norm() <= 1e-12);
  CHECK_THROWS_AS(build_phi(ComplexVector::Ones(5), model), InvalidArgument);
}

TEST_CASE("real stacking") {
  ComplexMatrix phi(1, 1);
  phi(0, 0) = Complex(0.0, 1.0);
  const RealSystem s = stack_real(phi, ComplexVector::Ones(1));
  const RealVector y = s.matrix * s.params;
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 1.0);

  Rng rng(8);
  ComplexMatrix a(6, 4);
  ComplexVector h(4);
  for (Index i = 0; i < a.size(); ++i) a(i) = rng.complex_normal();
  for (Index i = 0; i < h.size(); ++i) h[i] = rng.complex_normal();
  const RealSystem r = stack_real(a, h);
  CHECK(r.matrix.rows() == 12);
  CHECK(r.matrix.cols() == 8);
  CHECK((unstack_real(r.matrix * r.params) - a * h).norm() <= 1e-14);
  CHECK((unstack_real(stack_real(h)) - h).norm() == 0.0);
}
