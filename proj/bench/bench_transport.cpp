// Serial reference vs OpenMP kernel on the same photon budget.
#include <benchmark/benchmark.h>

#include "cbs/transport.hpp"

namespace {

cbs::TransportSettings slab_settings(double kv) {
    cbs::TransportSettings t;
    t.geometry = cbs::MediumGeometry::slab(1000.0);
    t.velocity = cbs::VelocityDistribution::gaussian(kv);
    t.max_order = 60;
    return t;
}

void BM_Reference(benchmark::State& state) {
    cbs::TransportEngine const engine(slab_settings(0.01));
    cbs::EstimatorSettings est;
    est.photons = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(cbs::simulate_reference(engine, est));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Parallel(benchmark::State& state) {
    cbs::TransportEngine const engine(slab_settings(0.01));
    cbs::EstimatorSettings est;
    est.photons = static_cast<std::uint64_t>(state.range(0));
    est.workers = static_cast<int>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(cbs::simulate(engine, est));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Reference)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->Args({4000, 1})->Args({4000, 2})->Args({4000, 4})->Args({4000, 8})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
