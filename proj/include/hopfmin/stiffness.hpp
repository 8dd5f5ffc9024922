#pragma once

#include <Eigen/SparseCore>

#include "hopfmin/kernels.hpp"
#include "hopfmin/mesh.hpp"

namespace hopfmin {

/// Piecewise-linear stiffness (cotangent) matrix: E[h] = Re(h^H K h) with
/// E the Dirichlet integral of |Dh|^2. Symmetric positive semidefinite;
/// constants span its kernel.
struct Stiffness {
  Eigen::SparseMatrix<double> K;  // column major, both triangles stored
  kernels::Csr csr;               // same entries, row major
};

[[nodiscard]] Stiffness assemble_stiffness(const PolarMesh& mesh);

}  // namespace hopfmin
