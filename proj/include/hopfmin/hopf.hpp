#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hopfmin/domain.hpp"
#include "hopfmin/mesh.hpp"

namespace hopfmin {

/// Laurent polynomial sum_{n=-N}^{N} a_n z^n representing phi dz (x) dz.
struct QuadDifferential {
  int order = 2;
  std::vector<Complex> a;  // a[n + order]

  QuadDifferential() = default;
  explicit QuadDifferential(int n);

  [[nodiscard]] Complex coeff(int n) const;
  void set(int n, Complex v);
  [[nodiscard]] Complex operator()(Complex z) const;
  /// Real part of a_{-2}.
  [[nodiscard]] double c() const { return coeff(-2).real(); }
};

/// "laurent:n:re,im;n:re,im;..." with n in [-N, N] for some N >= 2.
[[nodiscard]] QuadDifferential parse_quad_differential(const std::string& text);
void to_json(nlohmann::json& j, const QuadDifferential& q);

struct HopfSample {
  Complex z;
  Complex phi;
  double weight = 0.0;
};

/// phi = hz * conj(hzbar) at each barycenter, weighted by triangle area.
[[nodiscard]] std::vector<HopfSample> hopf_field(const DerivField& d);

struct LaurentFit {
  QuadDifferential q;
  double residual_rel = 0.0;  // weighted L1 misfit over weighted L1 norm of phi
};

/// Weighted least squares with column scaling; FitError when the samples
/// are too few, span a single radius, or give a rank-deficient system.
[[nodiscard]] LaurentFit laurent_fit(const std::vector<HopfSample>& samples, int order);

struct CertificateThresholds {
  int order = 6;
  double im_ratio = 1e-2;
  double residual_rel = 5e-2;
  double spurious_ratio = 5e-2;
  double conformal_rel = 1e-8;  // phi ~ 0 when L1(phi) < conformal_rel * E
};

enum class Verdict { certified_minimal, not_certified };
enum class Regime { diffeo, crack, conformal };

struct HopfReport {
  double c = 0.0;
  double im_ratio = 0.0;
  double residual_rel = 0.0;
  double spurious_ratio = 0.0;
  Verdict verdict = Verdict::not_certified;
  Regime regime = Regime::conformal;
  QuadDifferential q;
  double phi_l1 = 0.0;
  double energy = 0.0;
};

[[nodiscard]] HopfReport minimality_certificate(const MapField& f, const DomainSpec& target,
                                                const CertificateThresholds& th = {});

[[nodiscard]] const char* to_string(Verdict v);
[[nodiscard]] const char* to_string(Regime r);
void to_json(nlohmann::json& j, const HopfReport& r);

}  // namespace hopfmin
