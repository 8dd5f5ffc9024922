#include "hopfmin/kernels.hpp"

#include <omp.h>

#include "hopfmin/mesh.hpp"

namespace hopfmin::kernels {

double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

namespace {

inline void triangle_gradient(const PolarMesh& m, std::span<const Complex> v, int t, Complex& dx,
                              Complex& dy) {
  const auto& tri = m.triangles[t];
  const auto& g = m.hat_gradient[t];
  const Complex w0 = v[tri[0]];
  const Complex w1 = v[tri[1]];
  const Complex w2 = v[tri[2]];
  dx = w0 * g[0] + w1 * g[2] + w2 * g[4];
  dy = w0 * g[1] + w1 * g[3] + w2 * g[5];
}

inline double triangle_energy(const PolarMesh& m, std::span<const Complex> v, int t) {
  Complex dx;
  Complex dy;
  triangle_gradient(m, v, t, dx, dy);
  return m.triangle_area[t] * (std::norm(dx) + std::norm(dy));
}

inline Complex csr_row(const Csr& a, std::span<const Complex> x, int i) {
  Complex acc{0.0, 0.0};
  for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) acc += a.val[k] * x[a.col[k]];
  return acc;
}

}  // namespace

namespace serial {

void gradients(const PolarMesh& m, std::span<const Complex> values, Gradients& out) {
  const int nt = m.num_triangles();
  out.dx.resize(nt);
  out.dy.resize(nt);
  for (int t = 0; t < nt; ++t) triangle_gradient(m, values, t, out.dx[t], out.dy[t]);
}

void energy_density(const PolarMesh& m, std::span<const Complex> values, std::span<double> out) {
  const int nt = m.num_triangles();
  for (int t = 0; t < nt; ++t) out[t] = triangle_energy(m, values, t);
}

void csr_multiply(const Csr& a, std::span<const Complex> x, std::span<Complex> y) {
  for (int i = 0; i < a.n; ++i) y[i] = csr_row(a, x, i);
}

}  // namespace serial

namespace omp {

void gradients(const PolarMesh& m, std::span<const Complex> values, Gradients& out) {
  const int nt = m.num_triangles();
  out.dx.resize(nt);
  out.dy.resize(nt);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) triangle_gradient(m, values, t, out.dx[t], out.dy[t]);
}

void energy_density(const PolarMesh& m, std::span<const Complex> values, std::span<double> out) {
  const int nt = m.num_triangles();
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) out[t] = triangle_energy(m, values, t);
}

void csr_multiply(const Csr& a, std::span<const Complex> x, std::span<Complex> y) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.n; ++i) y[i] = csr_row(a, x, i);
}

}  // namespace omp

double dirichlet_energy(const PolarMesh& m, std::span<const Complex> values) {
  thread_local std::vector<double> scratch;
  scratch.resize(m.num_triangles());
  omp::energy_density(m, values, scratch);
  return compensated_sum(scratch);
}

namespace {
int g_threads = 0;
}

void set_threads(int n) {
  g_threads = n;
  if (n > 0) omp_set_num_threads(n);
}

int threads() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

}  // namespace hopfmin::kernels
