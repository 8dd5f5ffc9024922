#pragma once

#include <complex>
#include <optional>
#include <variant>

#include <json.hpp>

namespace hopfmin {

using Complex = std::complex<double>;

/// Circular annulus r < |z| < R.
struct AnnulusSpec {
  double r = 1.0;
  double R = 2.0;

  /// Throws InvalidDomainError unless 0 < r < R < inf.
  void validate() const;
  [[nodiscard]] double modulus() const;  // log(R/r)
};

/// Square washer {1 < |y1| + |y2|, |y| < rho}.
struct WasherSpec {
  double rho = 2.0;

  void validate() const;
};

enum class Boundary { inner = 0, outer = 1 };

[[nodiscard]] const char* to_string(Boundary b);

class DomainSpec {
 public:
  DomainSpec() = default;
  DomainSpec(AnnulusSpec a);  // NOLINT(google-explicit-constructor)
  DomainSpec(WasherSpec w);   // NOLINT(google-explicit-constructor)

  [[nodiscard]] bool is_annulus() const { return std::holds_alternative<AnnulusSpec>(v_); }
  [[nodiscard]] bool is_washer() const { return std::holds_alternative<WasherSpec>(v_); }
  [[nodiscard]] const AnnulusSpec& annulus() const;
  [[nodiscard]] const WasherSpec& washer() const;

  void validate() const;

  /// Parameter period of a boundary component: 2*pi for circles (angle),
  /// 4*sqrt(2) for the diamond (arclength).
  [[nodiscard]] double period(Boundary b) const;
  /// True when the component is a circle (parametrized by angle).
  [[nodiscard]] bool is_circle(Boundary b) const;

  [[nodiscard]] double area() const;
  [[nodiscard]] double diameter() const;
  [[nodiscard]] double outer_radius() const;

  /// Strict interior membership.
  [[nodiscard]] bool contains(Complex p) const;

  bool operator==(const DomainSpec& o) const;

 private:
  std::variant<AnnulusSpec, WasherSpec> v_ = AnnulusSpec{};
};

/// Counterclockwise boundary parametrization; s is wrapped modulo the period.
/// The diamond is anchored at the corner (1, 0).
[[nodiscard]] Complex boundary_point(const DomainSpec& d, Boundary b, double s);
/// dP/ds (one-sided, outgoing edge at diamond corners).
[[nodiscard]] Complex boundary_tangent(const DomainSpec& d, Boundary b, double s);

struct CurvePoint {
  double s = 0.0;  // unwrapped parameter inside the requested window
  Complex point;
  double distance = 0.0;
};

/// Closest point of a boundary component to p with parameter restricted to
/// [lo, hi] (unwrapped, hi - lo <= period).
[[nodiscard]] CurvePoint closest_boundary_point(const DomainSpec& d, Boundary b, Complex p,
                                                double lo, double hi);
/// Closest point over the whole component.
[[nodiscard]] CurvePoint closest_boundary_point(const DomainSpec& d, Boundary b, Complex p);

[[nodiscard]] double distance_to_boundary(const DomainSpec& d, Boundary b, Complex p);

struct ClosureProjection {
  Complex point;
  std::optional<Boundary> hit;  // empty when p already lies in the closed domain
};

/// Nearest point of the closed domain. p inside the domain is returned
/// unchanged with no boundary hit.
[[nodiscard]] ClosureProjection project_to_closure(const DomainSpec& d, Complex p);

/// Parameter of the diamond point on the ray through angle theta.
[[nodiscard]] double diamond_param_on_ray(double theta);
[[nodiscard]] Complex diamond_point_on_ray(double theta);

/// 1/2 (R/r + r/R), the threshold ratio below which annulus minimizers crack.
[[nodiscard]] double nitsche_bound(double r, double R);

/// Radius sigma in (r, R) with 1/2 (R/sigma + sigma/R) = R_star/r_star, or
/// nullopt when the target is thick enough that no collar forms.
[[nodiscard]] std::optional<double> nitsche_sigma(double r, double R, double r_star,
                                                  double R_star);

struct ModulusResolution {
  int n_r = 64;
  int n_theta = 256;
};

struct ModulusResult {
  double mod = 0.0;
  double dirichlet_of_potential = 0.0;
  int refinement_level = 0;
};

/// 2*pi / (Dirichlet integral of the capacity potential), u = 0 on the inner
/// and u = 1 on the outer boundary. Annulus(r, R) gives log(R/r).
[[nodiscard]] ModulusResult conformal_modulus(const DomainSpec& d, ModulusResolution res);

void to_json(nlohmann::json& j, const DomainSpec& d);
void from_json(const nlohmann::json& j, DomainSpec& d);
void to_json(nlohmann::json& j, const ModulusResult& m);

/// Parses "annulus:r,R" or "washer:rho".
[[nodiscard]] DomainSpec parse_domain(const std::string& text);

}  // namespace hopfmin
