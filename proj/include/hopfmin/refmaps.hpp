#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hopfmin/domain.hpp"
#include "hopfmin/mesh.hpp"

namespace hopfmin {

struct IdentityMap {};

/// (r_star / 2)(z / r + r / conj(z)).
struct NitscheMap {
  double r = 1.0;
  double r_star = 1.0;
};

/// r_star z / |z| on |z| <= sigma, the Nitsche form with r replaced by sigma outside.
struct CrackedNitscheMap {
  double r = 1.0;
  double sigma = 2.0;
  double r_star = 1.0;
};

/// Harmonic map of A(1/R, R) with Hopf product 1 / z^2, vanishing on |z| = 1.
struct LogMap {
  double R = 2.0;
};

/// Companion of LogMap with Hopf product -1 / z^2; discontinuous across the
/// positive real axis.
struct LogMapDual {
  double R = 2.0;
};

using RefMapKind = std::variant<IdentityMap, NitscheMap, CrackedNitscheMap, LogMap, LogMapDual>;

struct RefEval {
  Complex value;
  Complex hz;
  Complex hzbar;
};

void validate(const RefMapKind& k);

/// Throws EvalDomainError outside the map's domain of definition.
[[nodiscard]] RefEval eval_refmap(const RefMapKind& k, Complex z);

/// hz * conj(hzbar), which equals c / z^2 with c = hopf_constant(k).
[[nodiscard]] Complex refmap_hopf_product(const RefMapKind& k, Complex z);
[[nodiscard]] double hopf_constant(const RefMapKind& k);

/// Exact Dirichlet energy over the region.
[[nodiscard]] double refmap_energy(const RefMapKind& k, const AnnulusSpec& region);

/// Image annulus of the region, when the image is a round annulus.
[[nodiscard]] std::optional<DomainSpec> refmap_image(const RefMapKind& k,
                                                     const AnnulusSpec& region);

/// Node-wise samples on an annulus mesh. Nodes on the discontinuity cut of
/// LogMapDual take the limit from the upper half-plane.
[[nodiscard]] MapField sample_refmap(const RefMapKind& k, MeshPtr mesh);

/// CLI names: identity, nitsche (r, r_star), cracked-nitsche (r, sigma, r_star),
/// logmap (R), logmap-dual (R).
[[nodiscard]] RefMapKind parse_refmap(const std::string& kind, const std::vector<double>& params);
[[nodiscard]] std::string refmap_name(const RefMapKind& k);

}  // namespace hopfmin
