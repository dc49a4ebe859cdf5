// Serial reference against the OpenMP kernels of the path samplers.
#include <benchmark/benchmark.h>

#include <vector>

#include "subtail/bernstein.hpp"
#include "subtail/simulation.hpp"

using namespace subtail;

namespace {

SimConfig config(const benchmark::State& state, Backend backend) {
    SimConfig cfg;
    cfg.n_paths = static_cast<std::size_t>(state.range(0));
    cfg.backend = backend;
    return cfg;
}

void subordinator(benchmark::State& state, Backend backend) {
    const Kernel kernel = make_caputo(0.5);
    const SimConfig cfg = config(state, backend);
    const std::vector<double> rs = {0.1, 0.5, 1.0, 2.0};
    for (auto _ : state) benchmark::DoNotOptimize(sample_S_at(kernel, cfg, rs).values.data());
    state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.n_paths));
}

void inverse(benchmark::State& state, Backend backend) {
    const Kernel kernel{TruncatedKernel{0.5, 1.0, 1.0}};
    const BernsteinTable table(kernel);
    const SimConfig cfg = config(state, backend);
    const std::vector<double> ts = {0.5, 1.0, 2.0};
    std::vector<double> phis;
    for (double t : ts) phis.push_back(table.phi(1.0 / t));
    for (auto _ : state) benchmark::DoNotOptimize(sample_E_t(kernel, cfg, ts, phis).values.data());
    state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.n_paths));
}

}  // namespace

BENCHMARK_CAPTURE(subordinator, serial, Backend::Serial)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(subordinator, openmp, Backend::OpenMP)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(inverse, serial, Backend::Serial)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(inverse, openmp, Backend::OpenMP)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
