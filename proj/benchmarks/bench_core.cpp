#include <benchmark/benchmark.h>

#include "epred/grid.hpp"
#include "epred/random_fields.hpp"
#include "epred/systems.hpp"

using namespace epred;

namespace {

void BM_VectS1AdStar(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto vect = AlgebraDescriptor::vect_s1(n);
    Rng rng(1);
    FieldShape shape;
    shape.max_mode = 3;
    const AlgElem u = random_alg_elem(rng, vect, shape);
    const DualElem mu = random_dual_elem(rng, vect, shape);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ad_star(u, mu).coords.data());
    }
}
BENCHMARK(BM_VectS1AdStar)->Arg(128)->Arg(1024);

void BM_TrigShift(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(2);
    FieldShape shape;
    shape.max_mode = 3;
    const Eigen::VectorXd f = random_scalar_field(rng, n, shape);
    for (auto _ : state) {
        benchmark::DoNotOptimize(grid::trig_shift(f, n, 0.4321).data());
    }
}
BENCHMARK(BM_TrigShift)->Arg(128)->Arg(512);

void BM_GaugeCocycle(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto gauge = AlgebraDescriptor::gauge_so3(n);
    const ActionDescriptor conn{ActionKind::ConnectionGauge, gauge, +1.0,
                                CocycleKind::GaugeLogDerivative};
    Rng rng(3);
    FieldShape shape;
    shape.max_mode = 2;
    shape.amplitude = 0.1;
    const GroupElem g = random_gauge_map(rng, gauge, shape);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cocycle_eval(conn, g).data());
    }
}
BENCHMARK(BM_GaugeCocycle)->Arg(128);

void BM_HeavyTopStep(benchmark::State& state) {
    const auto sys = build_system("heavy_top", {});
    for (auto _ : state) {
        const Trajectory t = integrate(sys, sys.default_xi0(), sys.default_a0(), 1e-2, 1e-3);
        benchmark::DoNotOptimize(t.states.back().mu.coords.data());
    }
}
BENCHMARK(BM_HeavyTopStep);

void BM_Hs1dStep(benchmark::State& state) {
    SystemParams p;
    p.grid_size = static_cast<int>(state.range(0));
    const auto sys = build_system("hs1d", p);
    // one warm-up run to amortize the cached inertia factorization
    integrate(sys, sys.default_xi0(), std::nullopt, 1e-3, 1e-3);
    for (auto _ : state) {
        const Trajectory t = integrate(sys, sys.default_xi0(), std::nullopt, 1e-2, 1e-3);
        benchmark::DoNotOptimize(t.states.back().mu.coords.data());
    }
}
BENCHMARK(BM_Hs1dStep)->Arg(128);

void BM_SpinRhs(benchmark::State& state) {
    SystemParams p;
    p.grid_size = static_cast<int>(state.range(0));
    const auto sys = build_system("spin_lattice", p);
    Rng rng(4);
    FieldShape shape;
    shape.max_mode = 3;
    const AlgElem xi = random_alg_elem(rng, sys.algebra, shape);
    const AdvectedState gamma = random_advected_state(rng, *sys.action, shape);
    for (auto _ : state) {
        const DualElem mu = sys.lagrangian.d_xi(xi, &gamma);
        DualElem rhs = ad_star(xi, mu);
        rhs.coords = -rhs.coords + ep_forcing(sys.family, sys.lagrangian, xi, &gamma).coords;
        benchmark::DoNotOptimize(rhs.coords.data());
    }
}
BENCHMARK(BM_SpinRhs)->Arg(128);

} // namespace

BENCHMARK_MAIN();
