#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "hdch/dynamics.hpp"
#include "hdch/littlewood_paley.hpp"

namespace {

using namespace hdch;

GridPtr grid2d(int n) { return Grid::create(GridSpec{2, n, 2 * std::numbers::pi, 2.0 / 3.0}); }

ScalarField smooth(const GridPtr& g, double shift) {
    return ScalarField::sample(g, [&](std::span<const double> x) {
        return std::sin(x[0] + shift) * std::cos(2 * x[1]) + 0.3 * std::cos(3 * x[0] - x[1]);
    });
}

void BM_ForwardTransform(benchmark::State& state) {
    const auto g = grid2d(static_cast<int>(state.range(0)));
    const auto f = smooth(g, 0.0);
    auto out = ComplexBuffer::zeros(g->spectral_count());
    for (auto _ : state) {
        g->forward(f.values(), out.span());
        benchmark::DoNotOptimize(out.span().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(g->point_count()));
}
BENCHMARK(BM_ForwardTransform)->Arg(256)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_RhsVelocity(benchmark::State& state) {
    const auto g = grid2d(static_cast<int>(state.range(0)));
    const VectorField u({smooth(g, 0.0), smooth(g, 1.0)});
    for (auto _ : state) benchmark::DoNotOptimize(rhs_velocity(u));
}
BENCHMARK(BM_RhsVelocity)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_BesovNorm(benchmark::State& state) {
    const auto g = grid2d(512);
    const auto part = build_partition(g);
    const VectorField u({smooth(g, 0.0), smooth(g, 1.0)});
    const BesovParams p{3.0, static_cast<double>(state.range(0)), 2.0};
    for (auto _ : state) benchmark::DoNotOptimize(besov_norm(u, p, *part));
}
// p = 2 takes the spectral path; p = 3 synthesizes every block in physical space.
BENCHMARK(BM_BesovNorm)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
