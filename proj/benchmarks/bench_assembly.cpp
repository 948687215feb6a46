// Assembly and solve timings on the channel mesh.
#include <benchmark/benchmark.h>

#include "ranslab/assembly.hpp"
#include "ranslab/ns_solver.hpp"

using namespace ranslab;

namespace {

MeshPtr channel(int ny) { return std::make_shared<const Mesh>(generate_channel_mesh(ny / 5, ny, 1.0, 1.0)); }

}  // namespace

static void BM_LaplaceMatrix(benchmark::State& state) {
  auto V = make_space(channel(static_cast<int>(state.range(0))), Element{static_cast<int>(state.range(1)), ValueShape::Scalar});
  const Form a = inner(grad(trial_function(V)), grad(test_function(V))) * dx;
  for (auto _ : state) benchmark::DoNotOptimize(assemble_matrix(a, V, V));
  state.counters["dofs"] = V->ndofs();
}
BENCHMARK(BM_LaplaceMatrix)->Args({50, 1})->Args({50, 2})->Args({100, 1})->Unit(benchmark::kMillisecond);

static void BM_NSPicardStep(benchmark::State& state) {
  NSParams prm;
  prm.nu = 0.01;
  prm.body_force = {0.01, 0.0};
  prm.velocity_degree = static_cast<int>(state.range(1));
  prm.stabilized = prm.velocity_degree == 1;
  prm.tau = 0.01;
  NSSolver s(channel(static_cast<int>(state.range(0))), prm);
  for (auto _ : state) benchmark::DoNotOptimize(s.scheme().step());
  state.counters["dofs"] = s.VQ->ndofs();
}
BENCHMARK(BM_NSPicardStep)->Args({50, 1})->Args({50, 2})->Unit(benchmark::kMillisecond);

static void BM_SparseLU(benchmark::State& state) {
  auto V = make_space(channel(static_cast<int>(state.range(0))), Element{1, ValueShape::Scalar});
  const Expr u = trial_function(V), v = test_function(V);
  CSRMatrix A = assemble_matrix((inner(grad(u), grad(v)) + u * v) * dx, V, V);
  DenseVector b(A.rows(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(sparse_lu_solve(A, b));
  state.counters["dofs"] = A.rows();
}
BENCHMARK(BM_SparseLU)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
