#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopfmin/domain.hpp"
#include "hopfmin/mesh.hpp"

namespace hopfmin {

/// total = normal_part + tangential_part; per_ring[i] collects band i
/// (between rings i and i + 1).
struct EnergyBreakdown {
  double total = 0.0;
  double normal_part = 0.0;
  double tangential_part = 0.0;
  std::vector<double> per_ring;
};

[[nodiscard]] EnergyBreakdown dirichlet_energy(const MapField& f);

struct IdentityGap {
  double lhs = 0.0;              // E[H] - E[h]
  double rhs = 0.0;              // first_integral + second_integral
  double first_integral = 0.0;   // 4 [ |f_z - gamma f_zbar|^2 / J_f - 1 ] |h_z h_zbar|
  double second_integral = 0.0;  // 4 (|h_z| - |h_zbar|)^2 |f_zbar|^2 / J_f, never negative
  double uncovered_fraction = 0.0;  // image area of h missed by the image of H
};

/// Both sides of the two-solution energy identity with f = H^{-1} o h. The
/// composition is integrated exactly by overlaying the two image
/// triangulations: on each overlay piece f is affine.
/// Throws NotInvertibleError if some triangle of h or H has J <= 0, and
/// GeometryError if more than 1% of the image of h is not covered by H.
[[nodiscard]] IdentityGap energy_identity_gap(const MapField& h, const MapField& H);

struct BoundsReport {
  std::optional<double> lemKn_lhs;  // annulus targets only
  std::optional<double> lemKn_rhs;
  double lemKt_lhs = 0.0;
  double lemKt_rhs = 0.0;
  double target_modulus = 0.0;
  double area_lhs = 0.0;
  double area_rhs = 0.0;
  double c_estimate = 0.0;
  double ctheory_violation_fraction = 0.0;
  int excluded_triangles = 0;
  double j_floor = 0.0;
  std::vector<double> kN_field;  // |h_N|^2 / J, +inf where excluded
  std::vector<double> kT_field;
};

/// Free-Lagrangian lower bounds with J <= j_floor = 1e-12 * median J
/// excluded from the distortion quotients.
[[nodiscard]] BoundsReport free_lagrangian_report(const MapField& f, const AnnulusSpec& source,
                                                  const DomainSpec& target);

struct HopfResidual {
  double res_radial = 0.0;  // area mean of | |h_N|^2 - |h_T|^2 - 4c/|z|^2 |
  double res_orth = 0.0;    // area mean of | Re(conj(h_N) h_T) |
  double ctheory_violation_fraction = 0.0;
};

/// Violations: |h_N|^2 > J + 1e-9 where c <= 0, |h_T|^2 > J + 1e-9 where
/// c >= 0, measured by area over triangles with J above the floor.
[[nodiscard]] HopfResidual hopf_system_residual(const MapField& f, double c);

struct DifferenceDistortion {
  std::vector<double> k_h;
  std::vector<double> k_H;
  std::vector<double> k_F;  // sqrt(k_h k_H)
  std::vector<Complex> F_values;  // H - h per node
};

[[nodiscard]] DifferenceDistortion difference_distortion(const MapField& h, const MapField& H);

/// Area mean of |f_zbar| for a field, the discrete holomorphy defect.
[[nodiscard]] double antiholomorphic_defect(const PolarMesh& mesh, std::span<const Complex> values);

/// Median of J over the triangles (lower median for even counts).
[[nodiscard]] double median_jacobian(const std::vector<double>& J);

void to_json(nlohmann::json& j, const EnergyBreakdown& e);
void to_json(nlohmann::json& j, const IdentityGap& g);
void to_json(nlohmann::json& j, const BoundsReport& b);
void to_json(nlohmann::json& j, const HopfResidual& r);

struct EnergyRow {
  std::string label;
  EnergyBreakdown energy;
};
void write_energy_csv(const std::vector<EnergyRow>& rows, const std::string& path);

}  // namespace hopfmin
