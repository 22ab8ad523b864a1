#include "twinlattice/banded.hpp"
#include "twinlattice/energy.hpp"
#include "twinlattice/minimize.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace twinlat;

namespace {

const WellPair W = build_wells(std::sqrt(2.0));

ChainState relaxed_twin(int n) { return preoptimize_middle(twin_chain(n, W, 0)).chain; }

void BM_density(benchmark::State& state) {
    const Mat2 G = Mat2::Identity();
    const Stencil st{G * Vec2(0, 1), G * Vec2(0, -1), G * Vec2(1, 0), G * Vec2(-1, 0)};
    for (auto _ : state) benchmark::DoNotOptimize(density(st, W));
}
BENCHMARK(BM_density);

void BM_density_jet(benchmark::State& state) {
    const Stencil st{Vec2(0.1, 1.2), Vec2(-0.1, -0.9), Vec2(1.3, 0.2), Vec2(-1.1, 0.1)};
    for (auto _ : state) benchmark::DoNotOptimize(density_jet(st, W.a, W.b));
}
BENCHMARK(BM_density_jet);

void BM_chain_energy(benchmark::State& state) {
    const ChainState c = relaxed_twin(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(rescaled_energy(c));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_chain_energy)->RangeMultiplier(2)->Range(25, 200)->Complexity();

void BM_hessian(benchmark::State& state) {
    const ChainState c = relaxed_twin(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hessian(c, false));
}
BENCHMARK(BM_hessian)->Arg(100);

void BM_banded_cholesky(benchmark::State& state) {
    const BandedSymmetricMatrix H = [] {
        BandedSymmetricMatrix h = hessian(relaxed_twin(100), false);
        h.add_diagonal(10.0);  // the twin start is indefinite
        return h;
    }();
    const std::vector<double> rhs(H.size(), 1.0);
    for (auto _ : state) {
        BandedCholesky chol;
        benchmark::DoNotOptimize(chol.factor(H));
        benchmark::DoNotOptimize(chol.solve(rhs));
    }
}
BENCHMARK(BM_banded_cholesky);

void BM_newton(benchmark::State& state) {
    const ChainState start = relaxed_twin(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(newton_minimize(start).final_grad_norm);
}
BENCHMARK(BM_newton)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
