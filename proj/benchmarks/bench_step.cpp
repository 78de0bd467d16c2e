#include <benchmark/benchmark.h>

#include "fracporo/cases.hpp"
#include "fracporo/solver.hpp"

namespace {

using namespace fracporo;

struct Setup {
  MeshBundle mesh;
  DofMap dofs;
  MaterialParams params;
  WidthProfile width;
  SourceData data;
  StepConfig cfg;
};

// Clamped block under a ramped shear-and-compression load on the upper half.
Setup contact_setup(double h, Mode mode) {
  Setup s;
  s.mesh = build_rect_mesh_with_fracture({0.0, 0.0, 1.0, 1.0}, {{0.25, 0.5}, {0.75, 0.5}}, h);
  s.dofs = DofMap::build(s.mesh.mesh, BoundaryConditions{});
  s.params.G = 1e10;
  s.params.lambda = 1e10;
  s.params.alpha = 0.8;
  s.params.inv_M = 1e-10;
  s.params.c_f = 4.5e-10;
  s.params.K = 1e-10 * Mat2::Identity();
  s.params.mu_f = 1e-3;
  s.params.g = 0.0;
  s.params.c_fc = 1e-9;
  s.params.gamma = 1e8;
  s.params.c_n = 1e8;
  s.params.c_T = 6e7;
  s.params.normal_jump_sign = -1.0;
  s.width = WidthProfile::tip_power(1e-3, 0.05, s.mesh.fracture.length);
  LoadSpec loads;
  loads.body_force_plus = Vec2(4e8, -2e8);
  loads.ramp_time = 0.2;
  s.data = make_sources(loads);
  s.cfg.dt = 1e-3;
  s.cfg.mode = mode;
  return s;
}

void run_steps(benchmark::State& state, Mode mode) {
  const Setup s = contact_setup(1.0 / static_cast<double>(state.range(0)), mode);
  for (auto _ : state) {
    state.PauseTiming();
    TimeIntegrator integrator(s.mesh, s.dofs, s.params, s.width, s.data, s.cfg);
    State x = integrator.initial_state();
    state.ResumeTiming();
    for (int i = 0; i < 10; ++i) integrator.step(x);
    benchmark::DoNotOptimize(x.U.data());
  }
  state.counters["dofs"] = 2 * s.dofs.num_u() + s.dofs.num_p();
}

void BM_TenStepsQ0(benchmark::State& state) { run_steps(state, Mode::kQ0); }
void BM_TenStepsQ(benchmark::State& state) { run_steps(state, Mode::kQ); }
BENCHMARK(BM_TenStepsQ0)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TenStepsQ)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_CheckPencil(benchmark::State& state) {
  const Setup s = contact_setup(1.0 / static_cast<double>(state.range(0)), Mode::kQ);
  const TimeIntegrator integrator(s.mesh, s.dofs, s.params, s.width, s.data, s.cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_pencil(integrator.dae().M, integrator.dae().N, 1.0 / s.cfg.dt));
  }
}
BENCHMARK(BM_CheckPencil)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
