#include <benchmark/benchmark.h>

#include <vector>

#include "hopfmin/kernels.hpp"
#include "hopfmin/mesh.hpp"
#include "hopfmin/refmaps.hpp"
#include "hopfmin/stiffness.hpp"

using namespace hopfmin;

namespace {

struct Fixture {
  MeshPtr mesh;
  MapField field;
  Stiffness stiffness;
};

const Fixture& fixture(int n_r) {
  static std::vector<std::pair<int, Fixture>> cache;
  for (const auto& [n, f] : cache)
    if (n == n_r) return f;
  Fixture f;
  f.mesh = build_mesh(AnnulusSpec{1.0, 2.0}, n_r, 4 * n_r);
  f.field = sample_refmap(NitscheMap{1.0, 1.0}, f.mesh);
  f.stiffness = assemble_stiffness(*f.mesh);
  cache.emplace_back(n_r, std::move(f));
  return cache.back().second;
}

template <bool Parallel>
void BM_gradients(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)));
  kernels::Gradients g;
  for (auto _ : st) {
    if constexpr (Parallel) kernels::omp::gradients(*f.mesh, f.field.values, g);
    else kernels::serial::gradients(*f.mesh, f.field.values, g);
    benchmark::DoNotOptimize(g.dx.data());
  }
  st.SetItemsProcessed(st.iterations() * f.mesh->num_triangles());
}

template <bool Parallel>
void BM_energy_density(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)));
  std::vector<double> out(f.mesh->num_triangles());
  for (auto _ : st) {
    if constexpr (Parallel) kernels::omp::energy_density(*f.mesh, f.field.values, out);
    else kernels::serial::energy_density(*f.mesh, f.field.values, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * f.mesh->num_triangles());
}

template <bool Parallel>
void BM_csr_multiply(benchmark::State& st) {
  const Fixture& f = fixture(static_cast<int>(st.range(0)));
  std::vector<Complex> y(f.mesh->num_nodes());
  for (auto _ : st) {
    if constexpr (Parallel) kernels::omp::csr_multiply(f.stiffness.csr, f.field.values, y);
    else kernels::serial::csr_multiply(f.stiffness.csr, f.field.values, y);
    benchmark::DoNotOptimize(y.data());
  }
  st.SetItemsProcessed(st.iterations() * f.mesh->num_nodes());
}

}  // namespace

BENCHMARK(BM_gradients<false>)->Name("gradients/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_gradients<true>)->Name("gradients/omp")->Arg(64)->Arg(256);
BENCHMARK(BM_energy_density<false>)->Name("energy_density/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_energy_density<true>)->Name("energy_density/omp")->Arg(64)->Arg(256);
BENCHMARK(BM_csr_multiply<false>)->Name("csr_multiply/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_csr_multiply<true>)->Name("csr_multiply/omp")->Arg(64)->Arg(256);

BENCHMARK_MAIN();
