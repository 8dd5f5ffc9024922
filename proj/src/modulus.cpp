#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/SparseCholesky>

#include "hopfmin/domain.hpp"
#include "hopfmin/errors.hpp"
#include "hopfmin/kernels.hpp"
#include "hopfmin/mesh.hpp"
#include "hopfmin/stiffness.hpp"

namespace hopfmin {

namespace {

// Dirichlet integral of the discrete capacity potential (0 inside, 1 outside).
double potential_energy(const DomainSpec& d, int n_r, int n_theta) {
  const auto mesh = build_mesh(d, n_r, n_theta);
  const Stiffness st = assemble_stiffness(*mesh);
  const int n = mesh->num_nodes();
  std::vector<int> local(n, -1);
  std::vector<int> interior;
  for (int i = 0; i < n; ++i)
    if (!mesh->is_boundary(i)) {
      local[i] = static_cast<int>(interior.size());
      interior.push_back(i);
    }
  std::vector<double> u(n, 0.0);
  for (int i : mesh->outer_boundary) u[i] = 1.0;
  const auto& K = st.csr;
  const int ni = static_cast<int>(interior.size());
  if (ni > 0) {
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
    for (int a = 0; a < ni; ++a) {
      const int i = interior[a];
      for (int k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k) {
        const int j = K.col[k];
        if (local[j] >= 0) trip.emplace_back(a, local[j], K.val[k]);
        else rhs[a] -= K.val[k] * u[j];
      }
    }
    Eigen::SparseMatrix<double> A(ni, ni);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw NumericError("capacity factorization failed", 0.0);
    const Eigen::VectorXd x = ldlt.solve(rhs);
    const double res = (A * x - rhs).norm();
    if (!std::isfinite(res) || res > 1e-9 * (1.0 + rhs.norm()))
      throw NumericError("capacity solve did not converge", res);
    for (int a = 0; a < ni; ++a) u[interior[a]] = x[a];
  }
  std::vector<std::complex<double>> uc(u.begin(), u.end());
  return kernels::dirichlet_energy(*mesh, uc);
}

}  // namespace

ModulusResult conformal_modulus(const DomainSpec& d, ModulusResolution res) {
  d.validate();
  if (res.n_r < 2 || res.n_theta < 8)
    throw ConfigError("modulus resolution must have n_r >= 2 and n_theta >= 8");
  // refine until two successive levels agree to 1e-4 relative, at most twice
  int n_r = res.n_r;
  int n_theta = res.n_theta + (res.n_theta % 2);
  double energy = potential_energy(d, n_r, n_theta);
  int level = 0;
  while (level < 2) {
    const double finer = potential_energy(d, 2 * n_r - 1, 2 * n_theta);
    const double change = std::abs(finer - energy) / finer;
    energy = finer;
    n_r = 2 * n_r - 1;
    n_theta *= 2;
    ++level;
    if (change < 1e-4) break;
  }
  ModulusResult m;
  m.dirichlet_of_potential = energy;
  m.mod = 2.0 * std::numbers::pi / energy;
  m.refinement_level = level;
  return m;
}

}  // namespace hopfmin
