// SPDX-License-Identifier: Apache-2.0
//
// onebit: channel-estimation experiments for oversampled 1-bit uplink receivers.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "onebit/config_file.hpp"
#include "onebit/experiments.hpp"
#include "onebit/fisher.hpp"
#include "onebit/validate.hpp"

namespace {

enum ExitCode { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3 };

struct Options {
  std::string verb;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  int threads = 0;
  int crb_draws = 4;
  bool biased = false;
  std::string inject_fault;
};

class Output {
public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw onebit::ConfigIoError("cannot open output file '" + path + "' for writing");
  }
  std::ostream& csv() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  std::ostream& log() { return file_.is_open() ? std::cout : std::cerr; }
  void finish(const std::string& path) {
    if (!file_.is_open()) return;
    file_.close();
    if (!file_) throw onebit::ConfigIoError("failed writing '" + path + "'");
  }

private:
  std::ofstream file_;
};

int run_sweep_verb(const Options& opt, onebit::SweepSpec spec) {
  // SNR curves (including the bound-only one) are taken at the configured pilot length.
  if (opt.verb == "nmse-vs-snr" || opt.verb == "crb") spec.pilot_grid = {spec.base_cfg.pilot_len};
  spec.crb_draws = opt.verb == "crb" ? 0 : opt.crb_draws;

  Output out(opt.out_path);
  const auto rows = opt.verb == "crb" ? onebit::run_crb_sweep(spec, opt.crb_draws, &out.log())
                                      : onebit::run_sweep(spec, &out.log());
  onebit::write_results_csv(out.csv(), rows);
  out.finish(opt.out_path);
  for (const auto& r : rows) {
    if (!r.error.empty()) return kCheckFailed;
  }
  return kOk;
}

int run_fisher_check(const Options& opt, const onebit::ParsedConfig& parsed) {
  using namespace onebit;
  const double snr = parsed.sweep.snr_db_grid.front();
  const SystemConfig cfg = point_config(parsed.cfg, parsed.cfg.oversampling, snr, parsed.cfg.pilot_len);
  const EquivalentModel model = EquivalentModel::build(cfg);
  Rng rng = Rng::substream(cfg.seed, {0xf15c});
  const ChannelState channel = draw_channel(rng, cfg);
  const ComplexMatrix pilots = draw_pilots(rng, cfg);
  const ComplexMatrix phi = build_phi(pilot_block(pilots), model);
  const NoiseCovariance noise{cfg.noise_std * cfg.noise_std, model.noise_shape(), cfg.n_rx};

  Output out(opt.out_path);
  std::ostream& log = out.log();
  log << "fisher-check M=" << cfg.oversampling << " N_t=" << cfg.n_users << " N_r=" << cfg.n_rx
      << " tau=" << cfg.pilot_len << " snr_db=" << snr << '\n';

  FisherResult bound = fisher_lower_bound(phi, channel.h_true, noise.dense());
  bound.crb_diag = crb(bound);
  log << "lower-bound FI: ";
  write_summary(log, summarize(bound));
  if (cfg.oversampling == 1) {
    FisherResult exact = fisher_white(phi, channel.h_true, cfg.noise_std, cfg);
    exact.crb_diag = crb(exact);
    log << "exact FI:       ";
    write_summary(log, summarize(exact));
    log << "relative Frobenius distance: " << (exact.fi_matrix - bound.fi_matrix).norm() / exact.fi_matrix.norm()
        << '\n';
  }
  if (opt.biased) {
    const int n_mc = std::max(1000, opt.trials.value_or(1000));
    const auto estimator = make_lra_ls_stacked_estimator(pilots, model, cfg.noise_std, cfg.forgetting);
    const BiasedBound b = biased_bound(estimator, stack_real(channel.h_true), bound, n_mc, 0.05, cfg.seed);
    log << "biased bound (fd_step=0.05, n_mc=" << n_mc << "): mean=" << b.bound.mean() << '\n';
  }
  write_matrix_csv(out.csv(), bound.fi_matrix);
  out.finish(opt.out_path);
  return kOk;
}

int dispatch(const Options& opt) {
  if (opt.verb == "validate") {
    onebit::ValidationOptions v;
    v.inject_orthant_fault = opt.inject_fault == "orthant";
    return onebit::print_validation(std::cout, onebit::run_validation(v)) ? kOk : kCheckFailed;
  }

  std::optional<std::filesystem::path> path;
  if (!opt.config_path.empty()) path = opt.config_path;
  onebit::ParsedConfig parsed = onebit::parse_config(path, opt.overrides);
  if (opt.seed) parsed.cfg.seed = *opt.seed;
  if (opt.trials) parsed.sweep.n_trials = *opt.trials;
  parsed.sweep.base_cfg = parsed.cfg;

  if (opt.verb == "fisher-check") return run_fisher_check(opt, parsed);
  return run_sweep_verb(opt, parsed.sweep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-bit oversampled uplink channel estimation: NMSE sweeps, Fisher information and CRBs"};
  Options opt;
  app.add_option("verb", opt.verb, "nmse-vs-snr | nmse-vs-pilots | crb | fisher-check | validate")
      ->required()
      ->check(CLI::IsMember({"nmse-vs-snr", "nmse-vs-pilots", "crb", "fisher-check", "validate"}));
  app.add_option("--config", opt.config_path, "key=value config file");
  app.add_option("--set", opt.overrides, "override one config key (repeatable)")->take_all();
  app.add_option("--out", opt.out_path, "output CSV path (stdout when omitted)");
  app.add_option("--seed", opt.seed, "base seed, overrides the config");
  app.add_option("--trials", opt.trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);
  app.add_option("--threads", opt.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--crb-draws", opt.crb_draws, "channel draws per point for the CRB column (0 disables)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--biased", opt.biased, "fisher-check: also evaluate the biased-estimator bound");
  app.add_option("--inject-fault", opt.inject_fault, "validate: deliberately break a named check")
      ->check(CLI::IsMember({"orthant"}))
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (opt.threads > 0) omp_set_num_threads(opt.threads);

  try {
    return dispatch(opt);
  } catch (const onebit::ConfigIoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const onebit::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
}
