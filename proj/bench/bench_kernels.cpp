#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "tsui/detection.hpp"
#include "tsui/experiment.hpp"
#include "tsui/kernels.hpp"

namespace {

using namespace tsui;

std::vector<double> angle_grid(int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = -std::numbers::pi + 2 * std::numbers::pi * k / n;
    return g;
}

kernels::HomodyneInputs landscape_inputs() {
    const InterferometerConfig c = InterferometerConfig::equal_loss(squeeze_from_gain(3.3), 0.65, 1e6);
    InterferometerConfig plus = c, minus = c;
    plus.phi += 1e-5;
    minus.phi -= 1e-5;
    const GaussianState at = build_output_state(c);
    return {at.cov(), at.mean(), (build_output_state(plus).mean() - build_output_state(minus).mean()) / 2e-5,
            1.0, 1.0};
}

template <auto Kernel>
void BM_landscape(benchmark::State& state) {
    const auto g = angle_grid(static_cast<int>(state.range(0)));
    const auto in = landscape_inputs();
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(in, g, g));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <auto Kernel>
void BM_snri_map(benchmark::State& state) {
    const auto g = angle_grid(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(0.4605, 1.0, g, g));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

template <auto Kernel>
void BM_modulated_moments(benchmark::State& state) {
    const InterferometerConfig c = InterferometerConfig::equal_loss(squeeze_from_gain(3.3), 0.65, 50.0);
    std::vector<double> phases(static_cast<std::size_t>(state.range(0)));
    for (std::size_t k = 0; k < phases.size(); ++k) phases[k] = 1.7e-3 * std::sin(0.5 * static_cast<double>(k));
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(c, phases));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_sector_propagators(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n01;
    std::vector<Eigen::MatrixXd> props(static_cast<std::size_t>(2 * dim - 1));
    for (int d = -(dim - 1); d <= dim - 1; ++d) {
        const int len = dim - std::abs(d);
        props[static_cast<std::size_t>(d + dim - 1)] = Eigen::MatrixXd::NullaryExpr(len, len, [&] { return n01(rng); });
    }
    Eigen::MatrixXcd amp = Eigen::MatrixXcd::Random(dim, dim);
    for (auto _ : state) {
        Eigen::MatrixXcd a = amp;
        Kernel(props, a);
        benchmark::DoNotOptimize(a.data());
    }
}

void BM_timeseries(benchmark::State& state) {
    const InterferometerConfig c = InterferometerConfig::equal_loss(squeeze_from_gain(3.3), 0.65, 50.0);
    ModulationConfig mod;
    mod.duration_s = 0.025;
    const Exec exec = state.range(0) ? Exec::parallel : Exec::serial;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_homodyne_timeseries(c, mod, exec));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mod.sample_count()));
}

}  // namespace

BENCHMARK(BM_landscape<kernels::serial::homodyne_landscape>)->Name("landscape/serial")->Arg(90)->Arg(360);
BENCHMARK(BM_landscape<kernels::omp::homodyne_landscape>)->Name("landscape/omp")->Arg(90)->Arg(360);
BENCHMARK(BM_snri_map<kernels::serial::snri_map>)->Name("snri_map/serial")->Arg(361);
BENCHMARK(BM_snri_map<kernels::omp::snri_map>)->Name("snri_map/omp")->Arg(361);
BENCHMARK(BM_modulated_moments<kernels::serial::modulated_moments>)->Name("modulated_moments/serial")->Arg(100000);
BENCHMARK(BM_modulated_moments<kernels::omp::modulated_moments>)->Name("modulated_moments/omp")->Arg(100000);
BENCHMARK(BM_sector_propagators<kernels::serial::apply_sector_propagators>)->Name("sector_propagators/serial")->Arg(81);
BENCHMARK(BM_sector_propagators<kernels::omp::apply_sector_propagators>)->Name("sector_propagators/omp")->Arg(81);
BENCHMARK(BM_timeseries)->Name("timeseries")->Arg(0)->Arg(1);

BENCHMARK_MAIN();
