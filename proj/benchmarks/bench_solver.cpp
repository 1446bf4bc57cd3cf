#include <vector>

#include <benchmark/benchmark.h>

#include "lgfb/analysis.hpp"
#include "lgfb/solver.hpp"
#include "lgfb/tridiagonal.hpp"

namespace {

lgfb::ModelParams spreading_params() {
    lgfb::ModelParams p;
    p.a = 1.0;
    p.b = 0.5;
    p.beta = 1.0;
    p.h0 = 2.0;
    return p;
}

void BM_Thomas(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> lower(n, -1.0), diag(n, 4.0), upper(n, -1.0), rhs(n, 1.0);
    lgfb::TridiagonalSolver solver;
    for (auto _ : state) {
        std::fill(rhs.begin(), rhs.end(), 1.0);
        solver.solve(lower, diag, upper, rhs);
        benchmark::DoNotOptimize(rhs.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Thomas)->Arg(400)->Arg(12000)->Arg(24000);

void BM_Advance(benchmark::State& state) {
    lgfb::Discretization d;
    d.ny = static_cast<int>(state.range(0));
    const auto model = lgfb::validate_params(spreading_params(), {});
    lgfb::Solver solver(model, d);
    auto s = solver.initial_state();
    const double dt = std::min(d.dt, 0.5 * solver.cfl_limit(s));
    for (auto _ : state) {
        solver.advance(s, dt);
        benchmark::DoNotOptimize(s.z.data());
    }
}
BENCHMARK(BM_Advance)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);

void BM_SimulateShort(benchmark::State& state) {
    lgfb::Discretization d;
    d.ny = 100;
    d.dt = 0.02;
    d.t_end = 10.0;
    const auto model = lgfb::validate_params(spreading_params(), {});
    for (auto _ : state) benchmark::DoNotOptimize(lgfb::simulate(model, d).series.size());
}
BENCHMARK(BM_SimulateShort)->Unit(benchmark::kMillisecond);

void BM_BoundSequences(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(lgfb::bound_sequences(1.0, 0.5, 50).limit);
}
BENCHMARK(BM_BoundSequences);

}  // namespace

BENCHMARK_MAIN();
