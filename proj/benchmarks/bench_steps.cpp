#include "rhpe/inner.hpp"
#include "rhpe/problems.hpp"
#include "rhpe/regularized.hpp"

#include <benchmark/benchmark.h>

using namespace rhpe;

namespace {

void BM_InnerStep(benchmark::State& state, EngineKind kind) {
  const auto n = static_cast<Index>(state.range(0));
  const auto p = make_l1_regularized(n, 1, 0.5);
  auto engine = InnerEngine::make(kind, p, 0.9);
  const Vector x0 = *p.start;
  Vector x = x0;
  StepResult out;
  StepWorkspace ws;
  for (auto _ : state) {
    engine.step(p, 1e-3, x0, x, out, ws);
    x = out.x_next;
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK_CAPTURE(BM_InnerStep, tseng, EngineKind::tseng)->Arg(8)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(BM_InnerStep, korpelevich, EngineKind::korpelevich)->Arg(8)->Arg(64)->Arg(256);

void BM_DrHpeSkewMulti(benchmark::State& state) {
  const auto p = make_skew_rotation(1.0, 8, 4.0, 0.1);
  SolverConfig cfg;
  cfg.sigma = 0.9;
  cfg.rho_bar = 1.0 / static_cast<double>(state.range(0));
  long inner = 0;
  for (auto _ : state) {
    const auto r = dr_hpe_solve(p, *p.start, cfg, InnerEngine::tseng(p, 0.9));
    inner = r.inner_iterations;
    benchmark::DoNotOptimize(inner);
  }
  state.counters["inner_iters"] = static_cast<double>(inner);
}
BENCHMARK(BM_DrHpeSkewMulti)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
