// Serial reference kernels against their OpenMP counterparts, plus the
// end-to-end pieces that use them.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mbv/kernels.hpp"
#include "mbv/pipeline.hpp"
#include "mbv/simulator.hpp"

namespace {

std::vector<double> data(std::size_t n, unsigned seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(eng);
    return v;
}

void BM_SumSerial(benchmark::State& state) {
    const auto x = data(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(mbv::kernels::serial::sum(x));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SumParallel(benchmark::State& state) {
    const auto x = data(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(mbv::kernels::parallel::sum(x));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PairMomentsSerial(benchmark::State& state) {
    const auto a = data(static_cast<std::size_t>(state.range(0)), 2);
    const auto b = data(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(mbv::kernels::serial::pair_moments(a, b));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PairMomentsParallel(benchmark::State& state) {
    const auto a = data(static_cast<std::size_t>(state.range(0)), 2);
    const auto b = data(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(mbv::kernels::parallel::pair_moments(a, b));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_AnalyzePortfolio(benchmark::State& state) {
    mbv::SimConfig c;
    c.seed = 1;
    c.trade_count = static_cast<std::size_t>(state.range(0));
    c.securities = mbv::default_securities(8, 0.001, 100.0);
    for (auto& s : c.securities) s.cv_u = 0.5;
    const auto sim = mbv::generate_tape(c);
    for (auto _ : state) benchmark::DoNotOptimize(mbv::analyze_portfolio(sim.spec, sim.tapes));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 8);
}

void BM_DefaultSweep(benchmark::State& state) {
    mbv::SweepConfig s;
    s.base.seed = 42;
    s.base.trade_count = 4;
    s.base.securities = mbv::default_securities(2, 0.01, 100.0);
    s.cv_grid = {0.0, 0.25, 0.5, 1.0};
    s.rho_grid = {-0.8, 0.0, 0.8};
    s.replications = 100;
    for (auto _ : state) benchmark::DoNotOptimize(mbv::divergence_experiment(s));
}

}  // namespace

BENCHMARK(BM_SumSerial)->RangeMultiplier(16)->Range(1 << 10, 1 << 24);
BENCHMARK(BM_SumParallel)->RangeMultiplier(16)->Range(1 << 10, 1 << 24);
BENCHMARK(BM_PairMomentsSerial)->RangeMultiplier(16)->Range(1 << 10, 1 << 24);
BENCHMARK(BM_PairMomentsParallel)->RangeMultiplier(16)->Range(1 << 10, 1 << 24);
BENCHMARK(BM_AnalyzePortfolio)->Arg(1 << 10)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_DefaultSweep);

BENCHMARK_MAIN();
