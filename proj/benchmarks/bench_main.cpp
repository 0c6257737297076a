#include <benchmark/benchmark.h>

#include "drs/functions.hpp"
#include "drs/harmonic.hpp"
#include "drs/moves.hpp"

using namespace drs;

namespace {

void BM_PeriodPipeline(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  TorusFixture fx = square_torus(p, p, 0.9);
  for (auto _ : state) {
    PeriodData pd = compute_periods(
        fx.map.dc, canonical_dissection(fx.map.dc, {fx.cycle_a, fx.cycle_b}));
    benchmark::DoNotOptimize(pd.pi_gamma);
  }
  state.SetComplexityN(fx.map.dc.quad_count());
}
BENCHMARK(BM_PeriodPipeline)->Arg(2)->Arg(4)->Arg(8)->Complexity();

void BM_HarmonicProjection(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  TorusFixture fx = square_torus(p, p, 0.8);
  HarmonicSolver hs(fx.map.dc);
  CanonicalDissection d =
      canonical_dissection(fx.map.dc, {fx.cycle_a, fx.cycle_b});
  Cochain eta = hs.eta_form(d.aleph_lambda[0]);
  for (auto _ : state) {
    Cochain h = hs.project(eta);
    benchmark::DoNotOptimize(h.val.data());
  }
  state.SetComplexityN(fx.map.dc.vertex_count());
}
BENCHMARK(BM_HarmonicProjection)->Arg(2)->Arg(4)->Arg(8)->Arg(16)->Complexity();

void BM_Exponential(benchmark::State& state) {
  const int r = static_cast<int>(state.range(0));
  CriticalMap patch = tri_hex_patch(r);
  const cplx lambda(0.7, 0.4);
  for (auto _ : state) {
    Cochain ex = exponential(patch, lambda);
    benchmark::DoNotOptimize(ex.val.data());
  }
  state.SetComplexityN(patch.dc.vertex_count());
}
BENCHMARK(BM_Exponential)->Arg(4)->Arg(8)->Arg(16)->Complexity();

void BM_Powers(benchmark::State& state) {
  CriticalMap patch = square_patch(10, 10, 0.6);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto zk = powers(patch, k);
    benchmark::DoNotOptimize(zk.back().val.data());
  }
}
BENCHMARK(BM_Powers)->Arg(4)->Arg(8);

void BM_StarTriangle(benchmark::State& state) {
  TorusFixture fx = tri_hex_torus(0.5, 0.5, 0.75, 3, 3);
  MarkedSurface ms = mark(fx.map);
  int centre = move_III_sites(ms.dc)[0];
  for (auto _ : state) {
    MoveResult fwd = move_III(ms, centre);
    MoveResult back = move_III(fwd.surface, fwd.record.created, centre);
    benchmark::DoNotOptimize(back.surface.dc.quad_count());
  }
}
BENCHMARK(BM_StarTriangle);

}  // namespace

BENCHMARK_MAIN();
