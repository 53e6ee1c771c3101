#include <natanzon/mapping.hpp>
#include <natanzon/oracle.hpp>
#include <natanzon/specfun.hpp>
#include <natanzon/spectrum.hpp>

#include <benchmark/benchmark.h>

#include <cmath>

using namespace natanzon;

namespace {

ConfluentSpec oscillator() {
    ConfluentSpec s;
    s.lambda1 = 4;
    s.sigma_beta = 4;
    return s;
}

void BM_Kummer(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    double z = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kummer_1f1(n, 2.5, z));
        z = z < 50.0 ? z + 0.37 : 0.1;
    }
}
BENCHMARK(BM_Kummer)->Arg(2)->Arg(10)->Arg(40);

void BM_MappingODE(benchmark::State& state) {
    const auto spec = oscillator();
    const auto mass = MassProfile::rational(1.0, 0.1);
    const auto points = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_mapping(spec, mass, Interval{1e-6, 20.0}, MappingStart{1e-6, 5e-13, 1}, points));
}
BENCHMARK(BM_MappingODE)->Arg(2001)->Arg(20001)->Unit(benchmark::kMillisecond);

void BM_SolveLevels(benchmark::State& state) {
    ConfluentSpec s;
    s.lambda0 = 0.7;
    s.lambda1 = 1.3;
    s.lambda2 = 0.4;
    s.sigma_beta = 3.0;
    s.sigma_q0 = -8.0;
    s.sigma_c = 1.5;
    for (auto _ : state) benchmark::DoNotOptimize(solve_levels(s, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SolveLevels)->Arg(3)->Arg(10);

void BM_EigenLowest(benchmark::State& state) {
    FDProblem p;
    const int points = static_cast<int>(state.range(0));
    for (int i = 0; i < points; ++i) {
        const double u = -12.0 + 24.0 * i / (points - 1);
        p.u.push_back(u);
        p.mass.push_back(1.0);
        p.potential.push_back(0.5 * u * u);
    }
    const auto a = discretize(p);
    for (auto _ : state) benchmark::DoNotOptimize(eigen_lowest(a, 4));
}
BENCHMARK(BM_EigenLowest)->Arg(4001)->Arg(20001)->Unit(benchmark::kMillisecond);

void BM_Validate(benchmark::State& state) {
    ValidationInput in;
    in.spec = oscillator();
    in.domain = {1e-6, 14.0};
    in.points = static_cast<int>(state.range(0));
    in.start = {1.0, 0.5, 1};
    in.n_max = 3;
    for (auto _ : state) benchmark::DoNotOptimize(validate(in));
}
BENCHMARK(BM_Validate)->Arg(8001)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
