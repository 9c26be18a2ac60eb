// One full step (SSP-RK2 convective stages, viscous update, damping) of the
// serial reference kernels against the OpenMP ones, on the vortex data.

#include <benchmark/benchmark.h>

#include "vvl/harness.hpp"
#include "vvl/ns_solver.hpp"

namespace {

void advance(benchmark::State& st, vvl::Backend backend) {
  vvl::SweepConfig cfg;
  const int n = static_cast<int>(st.range(0));
  cfg.domain.cells = {n, n, 1};
  cfg.validate();
  const vvl::Grid g = vvl::study_grid(cfg);
  const vvl::ConservedState init = vvl::build_initial_state(cfg, g);
  vvl::PhysParams p = cfg.physics;
  p.epsilon = 0.01;
  vvl::Integrator integ(g, p, cfg.scheme, backend);
  const double dt = vvl::stable_dt(init, p, cfg.scheme);
  vvl::ConservedState s = init;
  for (auto _ : st) {
    vvl::StepDiagnostics diag;
    integ.advance(s, dt, diag);
    benchmark::DoNotOptimize(s.rho.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g.cell_count()));
}

void BM_serial(benchmark::State& st) { advance(st, vvl::Backend::serial); }
void BM_parallel(benchmark::State& st) { advance(st, vvl::Backend::parallel); }

}  // namespace

BENCHMARK(BM_serial)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parallel)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
