// SPDX-License-Identifier: Apache-2.0
//
// Serial reference paths against their OpenMP kernels.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "onebit/experiments.hpp"
#include "onebit/fisher.hpp"

namespace {

using namespace onebit;

SystemConfig default_point(int m, int tau) { return point_config(SystemConfig{}, m, 0.0, tau); }

void BM_NmseTrialsSerial(benchmark::State& state) {
  const SystemConfig cfg = default_point(int(state.range(0)), 40);
  for (auto _ : state) benchmark::DoNotOptimize(nmse_trials_serial(cfg, 1, 32));
  state.SetItemsProcessed(state.iterations() * 32);
}

void BM_NmseTrialsParallel(benchmark::State& state) {
  const SystemConfig cfg = default_point(int(state.range(0)), 40);
  for (auto _ : state) benchmark::DoNotOptimize(nmse_trials(cfg, 1, 32));
  state.SetItemsProcessed(state.iterations() * 32);
}

struct CovInstance {
  ComplexMatrix phi;
  ComplexVector h;
  RealMatrix c_n;
};

CovInstance cov_instance(int n_rx, int tau) {
  SystemConfig cfg = default_point(2, tau);
  cfg.n_rx = n_rx;
  const EquivalentModel model = EquivalentModel::build(cfg);
  Rng rng(42);
  const ChannelState ch = draw_channel(rng, cfg);
  const ComplexMatrix phi = build_phi(pilot_block(draw_pilots(rng, cfg)), model);
  const NoiseCovariance noise{cfg.noise_std * cfg.noise_std, model.noise_shape(), cfg.n_rx};
  return {phi, ch.h_true, noise.dense()};
}

void BM_QuantizedCovReference(benchmark::State& state) {
  const CovInstance in = cov_instance(int(state.range(0)), 20);
  for (auto _ : state) benchmark::DoNotOptimize(quantized_cov_reference(in.phi, in.h, in.c_n));
}

void BM_QuantizedCovParallel(benchmark::State& state) {
  const CovInstance in = cov_instance(int(state.range(0)), 20);
  for (auto _ : state) benchmark::DoNotOptimize(quantized_cov(in.phi, in.h, in.c_n));
}

void BM_FisherLowerBound(benchmark::State& state) {
  const CovInstance in = cov_instance(16, int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fisher_lower_bound(in.phi, in.h, in.c_n));
}

BENCHMARK(BM_NmseTrialsSerial)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NmseTrialsParallel)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuantizedCovReference)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuantizedCovParallel)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FisherLowerBound)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
