// SPDX-License-Identifier: Apache-2.0
// Serial versus OpenMP runners on the two heavy kernels. The runners fill
// index-addressed slots, so both orders must produce identical bytes; the
// interesting number here is the speedup only.
#include <benchmark/benchmark.h>

#include "phasecal/experiments.hpp"

namespace {

phasecal::RunConfig small_sweep() {
    phasecal::RunConfig cfg;
    cfg.experiment = "calibrate-sweep";
    cfg.snr_list_db = {20.0, 30.0};
    cfg.iterations = 64;
    cfg.master_seed = 7;
    return cfg;
}

phasecal::RunConfig small_eirp() {
    phasecal::RunConfig cfg;
    cfg.experiment = "eirp-cdf";
    cfg.snr_list_db = {20.0};
    cfg.eirp_instances = 8;
    cfg.sphere_samples = 128;
    cfg.master_seed = 7;
    return cfg;
}

void BM_CalibrateSweepSerial(benchmark::State& state) {
    const phasecal::RunConfig cfg = small_sweep();
    for (auto _ : state)
        benchmark::DoNotOptimize(phasecal::run_calibrate_sweep(cfg, phasecal::Exec::Serial));
}

void BM_CalibrateSweepParallel(benchmark::State& state) {
    const phasecal::RunConfig cfg = small_sweep();
    for (auto _ : state)
        benchmark::DoNotOptimize(phasecal::run_calibrate_sweep(cfg, phasecal::Exec::Parallel));
}

void BM_EirpCdfSerial(benchmark::State& state) {
    const phasecal::RunConfig cfg = small_eirp();
    for (auto _ : state)
        benchmark::DoNotOptimize(phasecal::run_eirp_cdf(cfg, phasecal::Exec::Serial));
}

void BM_EirpCdfParallel(benchmark::State& state) {
    const phasecal::RunConfig cfg = small_eirp();
    for (auto _ : state)
        benchmark::DoNotOptimize(phasecal::run_eirp_cdf(cfg, phasecal::Exec::Parallel));
}

}  // namespace

BENCHMARK(BM_CalibrateSweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CalibrateSweepParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EirpCdfSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EirpCdfParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
