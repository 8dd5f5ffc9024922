#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "hopfmin/domain.hpp"
#include "hopfmin/mesh.hpp"

namespace hopfmin {

struct SolverConfig {
  int max_outer_iters = 20000;
  double boundary_step = 1.0;
  double energy_rel_tol = 1e-10;
  double grad_tol = 1e-8;
  int stagnation_window = 10;
  std::uint64_t seed = 0;
  /// One seeded boundary perturbation restart when the converged field is
  /// not certified minimal.
  bool restart = true;

  void validate() const;
};

void to_json(nlohmann::json& j, const SolverConfig& c);
/// Missing keys keep their defaults; unknown keys are a ConfigError.
void from_json(const nlohmann::json& j, SolverConfig& c);

struct SolveResult {
  MapField field;
  std::vector<double> energy_history;  // accepted states, non-increasing
  bool converged = false;
  int outer_iters = 0;
  int restarts = 0;
};

/// Annulus targets: log-linear radial interpolation. Washer targets: linear
/// interpolation along each ray between the diamond and the outer circle.
[[nodiscard]] MapField initial_map(MeshPtr mesh, const DomainSpec& target);

/// Discrete harmonic extension into the given interior nodes with every other
/// node held fixed. No target constraint is applied.
[[nodiscard]] MapField harmonic_replace(const MapField& f, const std::vector<int>& region);

/// dE/ds for every boundary node, per boundary cycle position.
struct BoundaryGradient {
  std::vector<double> inner;
  std::vector<double> outer;
  [[nodiscard]] double max_abs() const;
};
[[nodiscard]] BoundaryGradient boundary_gradient(const MapField& f);

/// One diagonally scaled gradient step on the boundary parameters, halved
/// until the energy does not increase, followed by the isotonic projection.
[[nodiscard]] MapField boundary_descent_step(const MapField& f, double step);

/// Least-squares projection onto weakly increasing cyclic sequences
/// s_0 <= ... <= s_{n-1} <= s_0 + period.
void isotonic_project(std::vector<double>& s, double period);

/// Accepts or rejects a converged field; used to trigger the restart.
using CertificateHook = std::function<bool(const MapField&)>;

[[nodiscard]] SolveResult solve(MeshPtr mesh, const DomainSpec& target, const SolverConfig& cfg,
                                const CertificateHook& certified = {});
[[nodiscard]] SolveResult solve_from(MapField init, const SolverConfig& cfg,
                                     const CertificateHook& certified = {});

[[nodiscard]] nlohmann::json solve_result_json(const SolveResult& r);

struct GaugeResult {
  int shift = 0;        // source rotation in grid steps
  double alpha = 0.0;   // source rotation angle
  double phase = 0.0;   // target rotation applied after the source rotation
  double l2 = 0.0;      // area-weighted RMS distance
  double linf = 0.0;
  MapField aligned;     // e^{i phase} f(z e^{-i alpha})
};

/// Best grid rotation of the source combined with a target rotation (any
/// angle for annulus targets, quarter turns for washers).
[[nodiscard]] GaugeResult gauge_align(const MapField& f, const MapField& ref);

}  // namespace hopfmin
