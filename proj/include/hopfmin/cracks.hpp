#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopfmin/domain.hpp"
#include "hopfmin/mesh.hpp"

namespace hopfmin {

struct CrackOptions {
  double eps_rel = 1e-2;     // distance tolerance as a fraction of diam(Y)
  double eps_j_rel = 1e-3;   // Jacobian tolerance as a fraction of the typical J
  double ring_tolerance = 0.5;  // rings beyond the boundary ring before a ray counts as cracked
};

struct RayProfile {
  double theta = 0.0;
  double r_theta = 0.0;
  double R_theta = 0.0;
  int inner_rings = 0;  // collapsed rings above the inner boundary ring
  int outer_rings = 0;
};

struct Crack {
  double theta_start = 0.0;  // first ray of the run
  double theta_end = 0.0;    // last ray of the run
  int rays = 0;
  double length = 0.0;       // radius units
  int length_rings = 0;
  Complex target_point;
  std::optional<int> corner;  // washer corner index k (point i^k) within eps
};

struct CrackReport {
  std::vector<RayProfile> rays;
  std::vector<Crack> inner_cracks;
  std::vector<Crack> outer_cracks;
  bool crosscut_detected = false;
  bool middle_region_ok = true;
  bool radially_monotone = true;
  std::optional<std::array<std::optional<double>, 4>> washer_corner_alignment;
  std::optional<bool> corner_targeting_ok;
  std::optional<double> symmetry_defect;
  double eps = 0.0;
  double eps_J = 0.0;
};

/// Per node, the least J over the incident triangles on each side of its ring:
/// outward looks at the band toward the outer boundary, inward at the band
/// toward the inner boundary. A boundary ring has one band, used for both.
struct SidedJacobian {
  std::vector<double> outward;
  std::vector<double> inward;
};
[[nodiscard]] SidedJacobian sided_jacobian(const MapField& f);

/// Typical Jacobian scale: median of J over triangles with J > 1e-6 max J.
[[nodiscard]] double jacobian_scale(const std::vector<double>& J);

/// Per ray: the collapsed prefix from each boundary ring, where a node is
/// collapsed if it lies within eps of that target boundary component and its
/// Jacobian on the side away from that boundary is below eps_J.
[[nodiscard]] std::vector<RayProfile> ray_profile(const MapField& f, const DomainSpec& target,
                                                  const CrackOptions& opt = {});

[[nodiscard]] CrackReport crack_report(const MapField& f, const DomainSpec& target,
                                       const CrackOptions& opt = {});

/// max |f(i z) - i f(z)| over nodes, using the quarter-turn grid rotation.
/// Needs n_theta divisible by 4.
[[nodiscard]] double quarter_turn_defect(const MapField& f);

void to_json(nlohmann::json& j, const CrackReport& r);
/// Columns theta, r_theta, R_theta.
void write_rays_csv(const CrackReport& r, const std::string& path);

}  // namespace hopfmin
