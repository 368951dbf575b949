#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <omp.h>

#include "onebit/errors.hpp"
#include "onebit/experiments.hpp"

using namespace onebit;

namespace {

SystemConfig small_base() {
  SystemConfig c;
  c.n_users = 2;
  c.n_rx = 4;
  c.pilot_len = 8;
  c.block_len = 8;
  c.seed = 11;
  return c;
}

std::string csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_results_csv(os, rows);
  return os.str();
}

const ChannelEstimator kGenie = [](const Trial& t, const EquivalentModel&, const SystemConfig&) {
  return t.channel.h_true;
};
const ChannelEstimator kZero = [](const Trial& t, const EquivalentModel&, const SystemConfig&) {
  return ComplexVector(ComplexVector::Zero(t.channel.h_true.size()));
};

}  // namespace

TEST_CASE("NMSE definition") {
  const SystemConfig cfg = point_config(small_base(), 2, 0.0, 8);
  const NmseStats genie = run_nmse_point(cfg, 1, 20, kGenie);
  CHECK(genie.nmse == 0.0);
  CHECK(genie.stderr == 0.0);
  const NmseStats zero = run_nmse_point(cfg, 1, 20, kZero);
  CHECK(zero.nmse == 1.0);
  CHECK(zero.nmse_db() == 0.0);
  CHECK_THROWS_AS(run_nmse_point(cfg, 1, 0), InvalidArgument);
}

TEST_CASE("NMSE statistics") {
  const NmseStats s = nmse_stats({1.0, 2.0, 3.0, 4.0});
  CHECK(s.nmse == 2.5);
  CHECK(s.stderr == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(s.stderr_db() == doctest::Approx(10.0 / std::numbers::ln10 * s.stderr / 2.5));

  const SystemConfig cfg = point_config(small_base(), 1, 5.0, 8);
  const NmseStats few = run_nmse_point(cfg, 3, 200);
  const NmseStats many = run_nmse_point(cfg, 3, 800);
  CHECK(many.stderr * 2.0 == doctest::Approx(few.stderr).epsilon(0.2));
}

TEST_CASE("serial and parallel trials agree bit for bit") {
  const SystemConfig cfg = point_config(small_base(), 2, 0.0, 8);
  const std::vector<double> serial = nmse_trials_serial(cfg, 5, 37);
  for (int threads : {1, 2, 3, 5}) {
    omp_set_num_threads(threads);
    CHECK(nmse_trials(cfg, 5, 37) == serial);
  }
  omp_set_num_threads(1);
}

TEST_CASE("point seeds depend only on the point") {
  CHECK(point_seed(1, 2, 0.0, 40) == point_seed(1, 2, 0.0, 40));
  CHECK(point_seed(1, 2, 0.0, 40) != point_seed(1, 2, 0.0, 20));
  CHECK(point_seed(1, 2, 0.0, 40) != point_seed(1, 3, 0.0, 40));
  CHECK(point_seed(1, 2, 0.0, 40) != point_seed(1, 2, 5.0, 40));
  CHECK(point_seed(1, 2, 0.0, 40) != point_seed(2, 2, 0.0, 40));
}

TEST_CASE("sweep rows") {
  SweepSpec spec;
  spec.base_cfg = small_base();
  spec.snr_db_grid = {-5.0, 5.0};
  spec.pilot_grid = {8, 4};
  spec.oversampling_set = {1, 2};
  spec.n_trials = 12;
  spec.crb_draws = 1;
  const auto rows = run_sweep(spec);
  REQUIRE(rows.size() == 8);
  for (const auto& r : rows) {
    CHECK(r.error.empty());
    CHECK(std::isfinite(r.nmse_db));
    CHECK(std::isfinite(r.crb_db));
    CHECK(r.nmse_stderr_db >= 0.0);
    CHECK(r.n_trials == 12);
  }

  SUBCASE("single point reduces to run_nmse_point") {
    const SystemConfig cfg = point_config(spec.base_cfg, 2, 5.0, 4);
    const NmseStats s = run_nmse_point(cfg, point_seed(spec.base_cfg.seed, 2, 5.0, 4), 12);
    const auto it = std::find_if(rows.begin(), rows.end(), [](const ResultRow& r) {
      return r.m == 2 && r.snr_db == 5.0 && r.tau == 4;
    });
    REQUIRE(it != rows.end());
    CHECK(it->nmse_db == s.nmse_db());
  }

  SUBCASE("grid order does not change any row") {
    SweepSpec permuted = spec;
    permuted.snr_db_grid = {5.0, -5.0};
    permuted.pilot_grid = {4, 8};
    permuted.oversampling_set = {2, 1};
    const auto other = run_sweep(permuted);
    REQUIRE(other.size() == rows.size());
    for (const auto& r : rows) {
      const auto it = std::find_if(other.begin(), other.end(), [&](const ResultRow& o) {
        return o.m == r.m && o.snr_db == r.snr_db && o.tau == r.tau;
      });
      REQUIRE(it != other.end());
      CHECK(it->nmse_db == r.nmse_db);
      CHECK(it->crb_db == r.crb_db);
    }
  }

  SUBCASE("csv is identical across reruns and thread counts") {
    const std::string first = csv(rows);
    omp_set_num_threads(3);
    CHECK(csv(run_sweep(spec)) == first);
    omp_set_num_threads(1);
    CHECK(first.rfind("m,snr_db,tau,nmse_db,nmse_stderr_db,crb_db,n_trials\n", 0) == 0);
    CHECK(std::count(first.begin(), first.end(), '\n') == 9);
  }

  SUBCASE("invalid spec") {
    SweepSpec bad = spec;
    bad.pilot_grid.clear();
    CHECK_THROWS_AS(run_sweep(bad), InvalidArgument);
  }
}

TEST_CASE("failed points are recorded and the sweep continues") {
  SweepSpec spec;
  spec.base_cfg = small_base();
  spec.snr_db_grid = {0.0};
  spec.pilot_grid = {3, 8};  // no orthogonal two-user design of odd length
  spec.oversampling_set = {1};
  spec.n_trials = 4;
  const auto rows = run_sweep(spec);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].error.empty());
  CHECK(std::isnan(rows[0].nmse_db));
  CHECK(rows[1].error.empty());
  CHECK(csv(rows).find("nan") != std::string::npos);
}

TEST_CASE("CRB curve") {
  SweepSpec spec;
  spec.base_cfg = small_base();
  spec.snr_db_grid = {0.0};
  spec.pilot_grid = {4, 8, 16};
  spec.oversampling_set = {1, 2};
  const auto curve = crb_curve(spec, 2);
  REQUIRE(curve.size() == 6);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].n_draws == 2);
    if (i % 3) CHECK(curve[i].crb < curve[i - 1].crb);
  }

  SUBCASE("scalar point") {
    SystemConfig c;
    c.n_users = 1;
    c.n_rx = 1;
    c.pilot_len = 1;
    c.block_len = 1;
    // At h = 0 each real part contributes pi/4, so the per-coefficient CRB is pi/2.
    const FisherResult fi =
        fisher_lower_bound(ComplexMatrix::Identity(1, 1), ComplexVector::Zero(1), RealMatrix::Identity(1, 1));
    CHECK(crb(fi).sum() == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-14));
    // Any nonzero channel carries less information than h = 0.
    const CrbPoint p = crb_point(point_config(c, 1, 0.0, 1), 3, 1);
    CHECK(snr_db_from_noise_std(1.0, 1) == 0.0);
    CHECK(p.crb >= std::numbers::pi / 2.0 - 1e-12);
  }
}

TEST_CASE("longer pilots do not hurt at the default operating point") {
  const SystemConfig base;
  const NmseStats short_pilots = run_nmse_point(point_config(base, 2, 0.0, 10), 17, 500);
  const NmseStats long_pilots = run_nmse_point(point_config(base, 2, 0.0, 80), 17, 500);
  CHECK(long_pilots.nmse <= short_pilots.nmse);
}
