// OpenMP gather kernels against the serial scatter reference, plus a full
// model step. Thread count comes from OMP_NUM_THREADS.

#include <map>
#include <numbers>
#include <random>

#include <benchmark/benchmark.h>

#include "qgfv/cases.hpp"
#include "qgfv/operators.hpp"
#include "qgfv/reference.hpp"

using namespace qgfv;

namespace {

const PrimalDualMesh& mesh(int n) {
  static std::map<int, PrimalDualMesh> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_quad_mesh(n, n, 1.0, 1.0)).first;
  return it->second;
}

template <class F>
F random_field(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  F f(n);
  for (auto& v : f.values) v = U(rng);
  return f;
}

void set_cells(benchmark::State& state, const PrimalDualMesh& m) {
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(m.num_cells()));
}

void BM_Laplacian(benchmark::State& state) {
  const auto& m = mesh(static_cast<int>(state.range(0)));
  const auto f = random_field<CellField>(m.num_cells(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(laplacian(m, f));
  set_cells(state, m);
}

void BM_LaplacianReference(benchmark::State& state) {
  const auto& m = mesh(static_cast<int>(state.range(0)));
  const auto f = random_field<CellField>(m.num_cells(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(reference::laplacian(m, f));
  set_cells(state, m);
}

void BM_FluxDivergence(benchmark::State& state) {
  const auto& m = mesh(static_cast<int>(state.range(0)));
  const auto u = random_field<EdgeField>(m.num_edges(), 2);
  const auto q = random_field<EdgeField>(m.num_edges(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(flux_divergence(m, u, q));
  set_cells(state, m);
}

void BM_FluxDivergenceReference(benchmark::State& state) {
  const auto& m = mesh(static_cast<int>(state.range(0)));
  const auto u = random_field<EdgeField>(m.num_edges(), 2);
  const auto q = random_field<EdgeField>(m.num_edges(), 3);
  for (auto _ : state) benchmark::DoNotOptimize(reference::flux_divergence(m, u, q));
  set_cells(state, m);
}

void BM_CellToVertex(benchmark::State& state) {
  const auto& m = mesh(static_cast<int>(state.range(0)));
  const auto f = random_field<CellField>(m.num_cells(), 4);
  for (auto _ : state) benchmark::DoNotOptimize(remap_cell_to_vertex(m, f));
  set_cells(state, m);
}

void BM_CellToVertexReference(benchmark::State& state) {
  const auto& m = mesh(static_cast<int>(state.range(0)));
  const auto f = random_field<CellField>(m.num_cells(), 4);
  for (auto _ : state) benchmark::DoNotOptimize(reference::remap_cell_to_vertex(m, f));
  set_cells(state, m);
}

void BM_ModelStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const double L = kEarthRadius * std::numbers::pi / 6.0;
  const auto m = build_quad_mesh(n, n, L, L);
  PhysicalParams p;
  p.alpha = 0.0;
  p.mu = 0.0;
  QgModel model(m, p, Forcing{CellField(m.num_cells())}, SchemeKind::IVFV1);
  auto s = model.initial_state(init_circular_flow(m, p).q);
  for (auto _ : state) model.step(s, 1350.0);
  set_cells(state, m);
}

}  // namespace

BENCHMARK(BM_Laplacian)->Arg(64)->Arg(256);
BENCHMARK(BM_LaplacianReference)->Arg(64)->Arg(256);
BENCHMARK(BM_FluxDivergence)->Arg(64)->Arg(256);
BENCHMARK(BM_FluxDivergenceReference)->Arg(64)->Arg(256);
BENCHMARK(BM_CellToVertex)->Arg(64)->Arg(256);
BENCHMARK(BM_CellToVertexReference)->Arg(64)->Arg(256);
BENCHMARK(BM_ModelStep)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
