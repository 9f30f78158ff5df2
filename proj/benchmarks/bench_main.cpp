#include <benchmark/benchmark.h>

#include <cmath>

#include <wfi/capacity.hpp>
#include <wfi/conversions.hpp>
#include <wfi/decay.hpp>
#include <wfi/hardy.hpp>
#include <wfi/numerics.hpp>
#include <wfi/semigroup.hpp>
#include <wfi/verifier.hpp>

using namespace wfi;

namespace {

Measure1D subexp(double a, std::size_t n) {
    auto p = Potential::subexp(a, true);
    return Measure1D::build(p, auto_grid(p, n));
}

void BM_MeasureBuild(benchmark::State& st) {
    const auto n = std::size_t(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(subexp(1.5, n).z());
    st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_MeasureBuild)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_BetaFromCapacity(benchmark::State& st) {
    auto mu = subexp(1.0, 4096);
    for (auto _ : st) benchmark::DoNotOptimize(beta_from_capacity(mu)(1e-6));
}
BENCHMARK(BM_BetaFromCapacity)->Unit(benchmark::kMillisecond);

void BM_HardyBounds(benchmark::State& st) {
    auto mu = subexp(1.5, 4096);
    auto shape = RateFunction::power(1.0, 0.0, 1.0 / 3.0);
    for (auto _ : st) benchmark::DoNotOptimize(hardy_bounds(mu, shape).upper);
}
BENCHMARK(BM_HardyBounds)->Unit(benchmark::kMillisecond);

void BM_ConversionChain(benchmark::State& st) {
    auto b = RateFunction::power(1.0, 0.0, 1.0);
    for (auto _ : st) {
        auto swl = wlsi_to_swlsi(b);
        benchmark::DoNotOptimize(restricted_ls_constant(swl, 4.0, 2.0).A);
        benchmark::DoNotOptimize(wlsi_to_spi(b).rate(100.0));
    }
}
BENCHMARK(BM_ConversionChain)->Unit(benchmark::kMillisecond);

void BM_XiRadius(benchmark::State& st) {
    auto b = RateFunction::power(5.0, 0.0, 1.0 / 3.0);
    double t = 1.0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(xi_radius(b, 0.1, t));
        t = t < 1e4 ? t * 1.1 : 1.0;
    }
}
BENCHMARK(BM_XiRadius);

void BM_EvolveOU(benchmark::State& st) {
    auto V = Potential::subexp(2.0).scaled(0.5);
    auto mu = std::make_shared<const Measure1D>(stationary_measure(V, auto_grid(V.scaled(2.0), std::size_t(st.range(0)))));
    SolverConfig c;
    c.mu = mu;
    c.h0 = dirac_initial(*mu, 1.0, 0.05);
    c.t_end = std::log(2.0);
    c.sample_times = {0.0, c.t_end};
    for (auto _ : st) benchmark::DoNotOptimize(evolve(c).entropy.back());
}
BENCHMARK(BM_EvolveOU)->Arg(512)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_EvolveImplicit(benchmark::State& st) {
    auto mu = std::make_shared<const Measure1D>(subexp(1.5, 2048));
    SolverConfig c;
    c.mu = mu;
    c.h0 = two_level_initial(*mu, 0.0, 0.0, 1.0);
    c.t_end = 80.0;
    c.scheme = Scheme::implicit_euler;
    c.dt = 1e-4;
    c.dt_growth = 1.01;
    c.dt_cap = 0.02;
    for (auto _ : st) benchmark::DoNotOptimize(evolve(c).entropy.back());
}
BENCHMARK(BM_EvolveImplicit)->Unit(benchmark::kMillisecond);

void BM_EulerMaruyama(benchmark::State& st) {
    EmConfig c;
    c.mu = std::make_shared<const Measure1D>(subexp(1.0, 1024));
    c.t_end = 1.0;
    c.dt = 1e-2;
    c.n_paths = std::size_t(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(euler_maruyama(c).variance.back());
    st.SetItemsProcessed(st.iterations() * st.range(0) * 100);
}
BENCHMARK(BM_EulerMaruyama)->Arg(10000)->Arg(40000)->Unit(benchmark::kMillisecond);

void BM_EmpiricalBeta(benchmark::State& st) {
    auto mu = subexp(1.5, 2048);
    auto fam = FunctionFamily::capacity_ramps(mu);
    auto s = logspace(1e-6, 1e-1, 40);
    for (auto _ : st) benchmark::DoNotOptimize(empirical_beta(mu, fam, s).beta.front());
}
BENCHMARK(BM_EmpiricalBeta)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
