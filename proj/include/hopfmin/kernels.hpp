#pragma once

// Data-parallel inner loops. Each kernel has a serial reference version and
// an OpenMP version; both write per-element results into index-ordered
// output arrays, and every reduction is a serial compensated sum over those
// arrays, so results are bit-identical for any thread count.

#include <cmath>
#include <complex>
#include <span>
#include <vector>

namespace hopfmin {

struct PolarMesh;

namespace kernels {

using Complex = std::complex<double>;

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

[[nodiscard]] double compensated_sum(std::span<const double> xs);

/// Compressed sparse rows, real entries, complex vectors.
struct Csr {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;
  std::vector<int> diag;  // position of the diagonal entry of each row
};

/// Per-triangle Cartesian gradient (d/dx, d/dy) of the piecewise-linear field.
struct Gradients {
  std::vector<Complex> dx;
  std::vector<Complex> dy;
};

namespace serial {
void gradients(const PolarMesh& m, std::span<const Complex> values, Gradients& out);
/// area * |Dh|^2 per triangle.
void energy_density(const PolarMesh& m, std::span<const Complex> values, std::span<double> out);
void csr_multiply(const Csr& a, std::span<const Complex> x, std::span<Complex> y);
}  // namespace serial

namespace omp {
void gradients(const PolarMesh& m, std::span<const Complex> values, Gradients& out);
void energy_density(const PolarMesh& m, std::span<const Complex> values, std::span<double> out);
void csr_multiply(const Csr& a, std::span<const Complex> x, std::span<Complex> y);
}  // namespace omp

/// Sum of area * |Dh|^2 (the Dirichlet energy), OpenMP kernel + ordered sum.
[[nodiscard]] double dirichlet_energy(const PolarMesh& m, std::span<const Complex> values);

/// Caps the worker count used by the OpenMP kernels (0 keeps the default).
void set_threads(int n);
[[nodiscard]] int threads();

}  // namespace kernels
}  // namespace hopfmin
