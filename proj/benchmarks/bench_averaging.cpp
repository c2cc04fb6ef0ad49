#include <benchmark/benchmark.h>

#include "orbint/averaging.hpp"
#include "orbint/instances.hpp"

namespace {

using namespace orbint;

void BM_PowerRiemannSum(benchmark::State& state) {
  const long n = state.range(0);
  double x = 0.6180339887498949;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        power_riemann_sum(x, n, 0.75, SingularPolicy::Skip));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_PowerRiemannSum)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 18);

void BM_CharacterOrbital(benchmark::State& state) {
  ActionSystem system = torus_dyadic_system(0, 1);
  LevelRef level = LevelRef::group(GroupId::finite_cyclic(state.range(0)));
  Integrand f = Integrand::character({7});
  Point x = {0.3137515};
  TruncationPolicy trunc;
  for (auto _ : state) {
    benchmark::DoNotOptimize(orbital_integral(system, level, f, x, trunc));
  }
}
BENCHMARK(BM_CharacterOrbital)->Arg(1 << 8)->Arg(1 << 12)->Arg(1 << 16);

void BM_LatticeAverage2d(benchmark::State& state) {
  ActionSystem system = plane_dyadic_system(0, static_cast<int>(state.range(0)));
  LevelRef level = chain_schedule(system).back().level;
  Integrand f = Integrand::trig_poly(
      {{{0, 0}, {0.7, 0.0}}, {{3, 1}, {1.0, 0.0}}, {{-2, 5}, {0.0, 0.5}}});
  BorelRegion D = BorelRegion::half_open_box({0.0, 0.0}, {1.0, 1.0});
  Point x = {0.125, 0.8};
  for (auto _ : state) {
    benchmark::DoNotOptimize(lattice_average(system, level, f, D, x));
  }
}
BENCHMARK(BM_LatticeAverage2d)->Arg(4)->Arg(6)->Arg(8);

void BM_AffineOrbital(benchmark::State& state) {
  ActionSystem system = affine_self_system(0, 6);
  LevelRef level = LevelRef::group(
      GroupId::affine_scale_level(static_cast<int>(state.range(0))));
  Integrand f = Integrand::bump_affine({0.2, 0.1}, {0.9, 0.8}, 2);
  Point x = {1.0, 0.0};
  TruncationPolicy trunc;
  for (auto _ : state) {
    benchmark::DoNotOptimize(orbital_integral(system, level, f, x, trunc));
  }
}
BENCHMARK(BM_AffineOrbital)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
