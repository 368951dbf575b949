// SPDX-License-Identifier: Apache-2.0

#include "onebit/experiments.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "onebit/errors.hpp"

namespace onebit {

namespace {

constexpr std::uint64_t kTrialStream = 0;
constexpr std::uint64_t kCrbStream = 1;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double to_db(double v) { return 10.0 * std::log10(v); }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double trial_nmse(const Trial& trial, const EquivalentModel& model, const SystemConfig& cfg,
                  const ChannelEstimator& estimator) {
  const ComplexVector h_hat = estimator(trial, model, cfg);
  const ComplexVector& h = trial.channel.h_true;
  return (h_hat - h).squaredNorm() / h.squaredNorm();
}

void report(std::ostream* progress, const ResultRow& row) {
  if (!progress) return;
  *progress << "M=" << row.m << " snr_db=" << row.snr_db << " tau=" << row.tau << " nmse_db="
            << format_number(row.nmse_db) << " stderr_db=" << format_number(row.nmse_stderr_db)
            << " crb_db=" << format_number(row.crb_db);
  if (!row.error.empty()) *progress << " error=\"" << row.error << '"';
  *progress << '\n';
}

}  // namespace

void SweepSpec::validate() const {
  if (snr_db_grid.empty() || pilot_grid.empty() || oversampling_set.empty()) {
    throw InvalidArgument("sweep grids must be non-empty");
  }
  if (n_trials < 1) throw InvalidArgument("n_trials must be >= 1");
  if (crb_draws < 0) throw InvalidArgument("crb_draws must be >= 0");
  for (int tau : pilot_grid) {
    if (tau < 1) throw InvalidArgument("pilot_grid entries must be >= 1");
  }
  for (int m : oversampling_set) {
    if (m < 1) throw InvalidArgument("oversampling_set entries must be >= 1");
  }
  base_cfg.validate();
}

ComplexVector lra_ls_estimator(const Trial& trial, const EquivalentModel& model, const SystemConfig& cfg) {
  return estimate_channel_pipeline(trial.batch, trial.pilots, model, cfg.forgetting).h_hat;
}

ComplexVector genie_cov_estimator(const Trial& trial, const EquivalentModel& model, const SystemConfig& cfg) {
  return estimate_channel_pipeline(trial.batch, trial.pilots, model, cfg.forgetting, trial.channel.cov_assumed).h_hat;
}

SystemConfig point_config(const SystemConfig& base, int m, double snr_db, int tau) {
  SystemConfig cfg = base;
  cfg.oversampling = m;
  cfg.pilot_len = tau;
  cfg.block_len = tau;
  cfg.noise_std = noise_std_from_snr_db(snr_db, base.n_users);
  return cfg;
}

std::uint64_t point_seed(std::uint64_t base_seed, int m, double snr_db, int tau) {
  std::uint64_t s = splitmix64(base_seed ^ 0x5eed5eed5eed5eedULL);
  s = splitmix64(s ^ std::uint64_t(m));
  s = splitmix64(s ^ std::bit_cast<std::uint64_t>(snr_db + 0.0));
  return splitmix64(s ^ std::uint64_t(tau));
}

Trial simulate_trial(const SystemConfig& cfg, const EquivalentModel& model, std::uint64_t seed, std::uint64_t index) {
  Rng rng = Rng::substream(seed, {kTrialStream, index});
  Trial t;
  t.channel = draw_channel(rng, cfg);
  t.pilots = draw_pilots(rng, cfg);
  t.batch = simulate_pilot_batch(rng, t.channel, t.pilots, model, cfg.noise_std);
  return t;
}

double NmseStats::nmse_db() const { return to_db(nmse); }

double NmseStats::stderr_db() const { return 10.0 / std::numbers::ln10 * stderr / nmse; }

NmseStats nmse_stats(const std::vector<double>& per_trial) {
  NmseStats s;
  s.n_trials = int(per_trial.size());
  if (per_trial.empty()) return s;
  double sum = 0.0;
  for (double v : per_trial) sum += v;
  s.nmse = sum / s.n_trials;
  if (s.n_trials > 1) {
    double ss = 0.0;
    for (double v : per_trial) ss += (v - s.nmse) * (v - s.nmse);
    s.stderr = std::sqrt(ss / (s.n_trials - 1) / s.n_trials);
  }
  return s;
}

std::vector<double> nmse_trials(const SystemConfig& cfg, std::uint64_t seed, int n_trials,
                                const ChannelEstimator& estimator) {
  const SystemConfig block_cfg = cfg.with_block_len(cfg.pilot_len);
  const EquivalentModel model = EquivalentModel::build(block_cfg);
  std::vector<double> out(n_trials);
  // Exceptions must not cross the parallel region; keep the lowest-index one.
  std::vector<std::exception_ptr> errors(n_trials);
  // Each trial owns its substream and output slot; reduction happens serially afterwards.
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < n_trials; ++i) {
    try {
      const Trial trial = simulate_trial(block_cfg, model, seed, std::uint64_t(i));
      out[i] = trial_nmse(trial, model, block_cfg, estimator);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<double> nmse_trials_serial(const SystemConfig& cfg, std::uint64_t seed, int n_trials,
                                       const ChannelEstimator& estimator) {
  const SystemConfig block_cfg = cfg.with_block_len(cfg.pilot_len);
  const EquivalentModel model = EquivalentModel::build(block_cfg);
  std::vector<double> out;
  out.reserve(n_trials);
  for (int i = 0; i < n_trials; ++i) {
    const Trial trial = simulate_trial(block_cfg, model, seed, std::uint64_t(i));
    out.push_back(trial_nmse(trial, model, block_cfg, estimator));
  }
  return out;
}

NmseStats run_nmse_point(const SystemConfig& cfg, std::uint64_t seed, int n_trials,
                         const ChannelEstimator& estimator) {
  if (n_trials < 1) throw InvalidArgument("run_nmse_point: n_trials must be >= 1");
  return nmse_stats(nmse_trials(cfg, seed, n_trials, estimator));
}

CrbPoint crb_point(const SystemConfig& cfg, std::uint64_t seed, int n_draws) {
  const SystemConfig block_cfg = cfg.with_block_len(cfg.pilot_len);
  const EquivalentModel model = EquivalentModel::build(block_cfg);
  NoiseCovariance noise;
  noise.variance = cfg.noise_std * cfg.noise_std;
  noise.shape = model.noise_shape();
  noise.n_rx = cfg.n_rx;
  const RealMatrix c_n = noise.dense();

  CrbPoint out;
  out.m = cfg.oversampling;
  out.snr_db = snr_db_from_noise_std(cfg.noise_std, cfg.n_users);
  out.tau = cfg.pilot_len;
  double sum = 0.0;
  for (int d = 0; d < n_draws; ++d) {
    Rng rng = Rng::substream(seed, {kCrbStream, std::uint64_t(d)});
    const ChannelState channel = draw_channel(rng, block_cfg);
    const ComplexMatrix pilots = draw_pilots(rng, block_cfg);
    const ComplexMatrix phi = build_phi(pilot_block(pilots), model);
    try {
      const FisherResult fi = fisher_lower_bound(phi, channel.h_true, c_n);
      sum += crb(fi).sum() / double(cfg.channel_len());
      ++out.n_draws;
    } catch (const SingularError&) {
      ++out.n_singular;
    }
  }
  out.crb = out.n_draws ? sum / out.n_draws : kNaN;
  out.crb_db = to_db(out.crb);
  return out;
}

std::vector<CrbPoint> crb_curve(const SweepSpec& spec, int n_draws) {
  spec.validate();
  std::vector<CrbPoint> out;
  for (int m : spec.oversampling_set) {
    for (double snr : spec.snr_db_grid) {
      for (int tau : spec.pilot_grid) {
        const SystemConfig cfg = point_config(spec.base_cfg, m, snr, tau);
        CrbPoint p = crb_point(cfg, point_seed(spec.base_cfg.seed, m, snr, tau), n_draws);
        p.snr_db = snr;
        out.push_back(p);
      }
    }
  }
  return out;
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec, std::ostream* progress) {
  spec.validate();
  std::vector<ResultRow> rows;
  for (int m : spec.oversampling_set) {
    for (double snr : spec.snr_db_grid) {
      for (int tau : spec.pilot_grid) {
        ResultRow row{m, snr, tau, kNaN, kNaN, kNaN, spec.n_trials, {}};
        const std::uint64_t seed = point_seed(spec.base_cfg.seed, m, snr, tau);
        try {
          const SystemConfig cfg = point_config(spec.base_cfg, m, snr, tau);
          const NmseStats s = run_nmse_point(cfg, seed, spec.n_trials);
          row.nmse_db = s.nmse_db();
          row.nmse_stderr_db = s.stderr_db();
          if (spec.crb_draws > 0) row.crb_db = crb_point(cfg, seed, spec.crb_draws).crb_db;
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        report(progress, row);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<ResultRow> run_crb_sweep(const SweepSpec& spec, int n_draws, std::ostream* progress) {
  spec.validate();
  std::vector<ResultRow> rows;
  for (int m : spec.oversampling_set) {
    for (double snr : spec.snr_db_grid) {
      for (int tau : spec.pilot_grid) {
        ResultRow row{m, snr, tau, kNaN, kNaN, kNaN, 0, {}};
        try {
          const SystemConfig cfg = point_config(spec.base_cfg, m, snr, tau);
          const CrbPoint p = crb_point(cfg, point_seed(spec.base_cfg.seed, m, snr, tau), n_draws);
          row.crb_db = p.crb_db;
          if (p.n_singular) row.error = std::to_string(p.n_singular) + " singular FI draws skipped";
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        report(progress, row);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "m,snr_db,tau,nmse_db,nmse_stderr_db,crb_db,n_trials\n";
  for (const auto& r : rows) {
    os << r.m << ',' << format_number(r.snr_db) << ',' << r.tau << ',' << format_number(r.nmse_db) << ','
       << format_number(r.nmse_stderr_db) << ',' << format_number(r.crb_db) << ',' << r.n_trials << '\n';
  }
}

StackedEstimator make_lra_ls_stacked_estimator(const ComplexMatrix& pilots, const EquivalentModel& model,
                                               double noise_std, double forgetting) {
  return [pilots, model, noise_std, forgetting](const RealVector& h_stacked, Rng& rng) {
    ChannelState channel;
    channel.h_true = unstack_real(h_stacked);
    channel.cov_assumed = ComplexMatrix::Identity(channel.h_true.size(), channel.h_true.size());
    const QuantizedBatch batch = simulate_pilot_batch(rng, channel, pilots, model, noise_std);
    return stack_real(estimate_channel_pipeline(batch, pilots, model, forgetting).h_hat);
  };
}

}  // namespace onebit
