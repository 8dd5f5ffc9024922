#include "hopfmin/stiffness.hpp"

#include <vector>

namespace hopfmin {

Stiffness assemble_stiffness(const PolarMesh& mesh) {
  const int n = mesh.num_nodes();
  const int nt = mesh.num_triangles();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(9) * nt);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& g = mesh.hat_gradient[t];
    const double area = mesh.triangle_area[t];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        trip.emplace_back(tri[a], tri[b],
                          area * (g[2 * a] * g[2 * b] + g[2 * a + 1] * g[2 * b + 1]));
  }
  Stiffness s;
  s.K.resize(n, n);
  s.K.setFromTriplets(trip.begin(), trip.end());
  s.K.makeCompressed();

  Eigen::SparseMatrix<double, Eigen::RowMajor> rm = s.K;
  rm.makeCompressed();
  auto& c = s.csr;
  c.n = n;
  c.row_ptr.assign(rm.outerIndexPtr(), rm.outerIndexPtr() + n + 1);
  c.col.assign(rm.innerIndexPtr(), rm.innerIndexPtr() + rm.nonZeros());
  c.val.assign(rm.valuePtr(), rm.valuePtr() + rm.nonZeros());
  c.diag.assign(n, -1);
  for (int i = 0; i < n; ++i)
    for (int k = c.row_ptr[i]; k < c.row_ptr[i + 1]; ++k)
      if (c.col[k] == i) c.diag[i] = k;
  return s;
}

}  // namespace hopfmin
