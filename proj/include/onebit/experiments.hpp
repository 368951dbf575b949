// SPDX-License-Identifier: Apache-2.0

#ifndef ONEBIT_EXPERIMENTS_HPP
#define ONEBIT_EXPERIMENTS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "onebit/channel_sim.hpp"
#include "onebit/config.hpp"
#include "onebit/estimator.hpp"
#include "onebit/fisher.hpp"
#include "onebit/model.hpp"

namespace onebit {

struct SweepSpec {
  std::vector<double> snr_db_grid{-10, -5, 0, 5, 10, 15, 20};
  std::vector<int> pilot_grid{40};
  std::vector<int> oversampling_set{1, 2, 3};
  int n_trials = 500;
  int crb_draws = 0;  ///< channel draws per point for the CRB column, 0 disables it
  SystemConfig base_cfg;

  void validate() const;
};

/// One grid point. crb_db and the NMSE columns are NaN when not computed or failed.
struct ResultRow {
  int m = 1;
  double snr_db = 0.0;
  int tau = 0;
  double nmse_db = 0.0;
  double nmse_stderr_db = 0.0;
  double crb_db = 0.0;
  int n_trials = 0;
  std::string error;  ///< empty on success
};

/// Everything one Monte Carlo trial produces before estimation.
struct Trial {
  ChannelState channel;
  ComplexMatrix pilots;
  QuantizedBatch batch;
};

using ChannelEstimator = std::function<ComplexVector(const Trial&, const EquivalentModel&, const SystemConfig&)>;

/// The adaptive LRA-LS pipeline.
ComplexVector lra_ls_estimator(const Trial& trial, const EquivalentModel& model, const SystemConfig& cfg);

/// LRA-LS with the true prior covariance in place of the recursive estimate.
ComplexVector genie_cov_estimator(const Trial& trial, const EquivalentModel& model, const SystemConfig& cfg);

/// Configuration of one grid point: oversampling m, noise from snr_db, pilot block of tau.
SystemConfig point_config(const SystemConfig& base, int m, double snr_db, int tau);

/// Seed of a grid point, a function of (base seed, m, snr, tau) only.
std::uint64_t point_seed(std::uint64_t base_seed, int m, double snr_db, int tau);

/// Trial `index` of a point: channel, pilots, and the quantized pilot batch.
/// `model` must have block length cfg.pilot_len.
Trial simulate_trial(const SystemConfig& cfg, const EquivalentModel& model, std::uint64_t seed, std::uint64_t index);

struct NmseStats {
  double nmse = 0.0;    ///< mean of ||h_hat - h||^2 / ||h||^2
  double stderr = 0.0;  ///< standard error of that mean
  int n_trials = 0;

  double nmse_db() const;
  double stderr_db() const;  ///< delta-method standard error in dB
};

NmseStats nmse_stats(const std::vector<double>& per_trial);

/// Per-trial normalized squared errors, trials spread over OpenMP threads.
std::vector<double> nmse_trials(const SystemConfig& cfg, std::uint64_t seed, int n_trials,
                                const ChannelEstimator& estimator = lra_ls_estimator);

/// Serial reference of nmse_trials; identical output bit for bit.
std::vector<double> nmse_trials_serial(const SystemConfig& cfg, std::uint64_t seed, int n_trials,
                                       const ChannelEstimator& estimator = lra_ls_estimator);

NmseStats run_nmse_point(const SystemConfig& cfg, std::uint64_t seed, int n_trials,
                         const ChannelEstimator& estimator = lra_ls_estimator);

struct CrbPoint {
  int m = 1;
  double snr_db = 0.0;
  int tau = 0;
  double crb = 0.0;     ///< sum of the CRB diagonal over N_r N_t, averaged over draws
  double crb_db = 0.0;
  int n_draws = 0;      ///< draws that produced a finite bound
  int n_singular = 0;   ///< draws skipped because the FI was singular
};

/// CRB from the FI lower bound at a single configuration, averaged over channel draws.
CrbPoint crb_point(const SystemConfig& cfg, std::uint64_t seed, int n_draws);

/// crb_point for every grid point of the sweep.
std::vector<CrbPoint> crb_curve(const SweepSpec& spec, int n_draws);

/// One row per (m, snr, tau); deterministic for a given base seed.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, std::ostream* progress = nullptr);

/// CRB-only sweep: NMSE columns NaN and n_trials 0.
std::vector<ResultRow> run_crb_sweep(const SweepSpec& spec, int n_draws, std::ostream* progress = nullptr);

/// `m,snr_db,tau,nmse_db,nmse_stderr_db,crb_db,n_trials`, %.17g numbers, LF endings.
void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows);

/// Stacked-real LRA-LS estimator for a fixed pilot block, for the biased bound.
StackedEstimator make_lra_ls_stacked_estimator(const ComplexMatrix& pilots, const EquivalentModel& model,
                                               double noise_std, double forgetting);

}  // namespace onebit

#endif
