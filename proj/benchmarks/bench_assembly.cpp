#include <benchmark/benchmark.h>

#include "fracporo/assembly.hpp"

namespace {

using namespace fracporo;

MeshBundle square(double h) {
  return build_rect_mesh_with_fracture({0.0, 0.0, 1.0, 1.0}, {{0.25, 0.5}, {0.75, 0.5}}, h);
}

void BM_AssembleSystem(benchmark::State& state) {
  const MeshBundle mesh = square(1.0 / static_cast<double>(state.range(0)));
  const MaterialParams params;
  const WidthProfile width = WidthProfile::tip_power(1e-3, 0.05, mesh.fracture.length);
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_system(mesh, params, width, 0.0));
  }
  state.counters["triangles"] = mesh.mesh.num_triangles();
}
BENCHMARK(BM_AssembleSystem)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_AssembleFracturePermeability(benchmark::State& state) {
  const MeshBundle mesh = square(1.0 / static_cast<double>(state.range(0)));
  const MaterialParams params;
  const WidthProfile width = WidthProfile::tip_power(1e-3, 0.05, mesh.fracture.length);
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_fracture_permeability(mesh, params, width, 0.0));
  }
}
BENCHMARK(BM_AssembleFracturePermeability)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_BuildMesh(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(square(h));
}
BENCHMARK(BM_BuildMesh)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
