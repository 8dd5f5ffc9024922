#include "hopfmin/refmaps.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hopfmin/errors.hpp"

namespace hopfmin {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << "reference map parameter " << name << " must be positive, got " << v;
    throw ConfigError(os.str());
  }
}

void require_nonzero(Complex z) {
  if (z == Complex{0.0, 0.0}) throw EvalDomainError("reference map evaluated at z = 0");
}

void require_log_annulus(double R, Complex z) {
  const double m = std::abs(z);
  if (!(m >= 1.0 / R && m <= R)) {
    std::ostringstream os;
    os << "log map evaluated at |z| = " << m << " outside [1/R, R] with R = " << R;
    throw EvalDomainError(os.str());
  }
  if (std::abs(z - R) < 1e-14 * R || std::abs(z - 1.0 / R) < 1e-14) {
    throw EvalDomainError("log map evaluated at its boundary singularity z = R^(+-1)");
  }
}

RefEval nitsche_eval(double r, double r_star, Complex z) {
  const Complex zb = std::conj(z);
  return {0.5 * r_star * (z / r + r / zb), Complex{0.5 * r_star / r, 0.0},
          -0.5 * r_star * r / (zb * zb)};
}

// Dirichlet integral of the Nitsche form over A(a, b).
double nitsche_energy(double r, double r_star, double a, double b) {
  if (b <= a) return 0.0;
  return 0.5 * kPi * r_star * r_star * ((b * b - a * a) / (r * r) + r * r * (1.0 / (a * a) - 1.0 / (b * b)));
}

// Energy of LogMap over A(1, rho), rho in [1, R), from the Laurent expansions
// of (Rz - 1)/(R - z) and its reciprocal: the circle means of |hz|^2 |z|^2 and
// |hzbar|^2 |z|^2 are 1/R^2 + (R^2-1)^2 t^2 / (R^2 (R^2 - t^2)) and
// 1/R^2 + (R^2-1)^2 / (R^2 (R^2 t^2 - 1)).
double logmap_energy_from_one(double R, double rho) {
  if (rho == 1.0) return 0.0;
  const double R2 = R * R;
  const double q = (R2 * rho * rho - 1.0) / (R2 * rho * rho - rho * rho * rho * rho);
  return 8.0 * kPi * std::log(rho) / R2 + 2.0 * kPi * (R2 - 1.0) * (R2 - 1.0) / R2 * std::log(q);
}

}  // namespace

void validate(const RefMapKind& k) {
  std::visit(Overloaded{[](const IdentityMap&) {},
                        [](const NitscheMap& m) {
                          require_positive(m.r, "r");
                          require_positive(m.r_star, "r_star");
                        },
                        [](const CrackedNitscheMap& m) {
                          require_positive(m.r, "r");
                          require_positive(m.r_star, "r_star");
                          if (!(m.sigma > m.r) || !std::isfinite(m.sigma))
                            throw ConfigError("cracked Nitsche map needs sigma > r");
                        },
                        [](const LogMap& m) {
                          if (!(m.R > 1.0) || !std::isfinite(m.R))
                            throw ConfigError("log map needs R > 1");
                        },
                        [](const LogMapDual& m) {
                          if (!(m.R > 1.0) || !std::isfinite(m.R))
                            throw ConfigError("dual log map needs R > 1");
                        }},
             k);
}

RefEval eval_refmap(const RefMapKind& k, Complex z) {
  validate(k);
  return std::visit(
      Overloaded{
          [&](const IdentityMap&) { return RefEval{z, {1.0, 0.0}, {0.0, 0.0}}; },
          [&](const NitscheMap& m) {
            require_nonzero(z);
            return nitsche_eval(m.r, m.r_star, z);
          },
          [&](const CrackedNitscheMap& m) {
            require_nonzero(z);
            const double a = std::abs(z);
            if (a > m.sigma) return nitsche_eval(m.sigma, m.r_star, z);
            const Complex u = z / a;
            return RefEval{m.r_star * u, Complex{0.5 * m.r_star / a, 0.0},
                           -0.5 * m.r_star * u / std::conj(z)};
          },
          [&](const LogMap& m) {
            require_log_annulus(m.R, z);
            const double R = m.R;
            const Complex zb = std::conj(z);
            const Complex arg = (R * z * zb - z) / (R - z);
            const Complex value = (R - 1.0 / R) * std::log(arg) - 2.0 * R * std::log(std::abs(z));
            const Complex hz = (R * z - 1.0) / ((R - z) * z);
            const Complex hzbar = std::conj((R - z) / ((R * z - 1.0) * z));
            return RefEval{value, hz, hzbar};
          },
          [&](const LogMapDual& m) {
            require_log_annulus(m.R, z);
            if (z.imag() == 0.0 && z.real() > 0.0)
              throw EvalDomainError("dual log map is undefined on the positive real axis");
            const double R = m.R;
            double arg = std::arg(z);
            if (arg < 0.0) arg += 2.0 * kPi;
            const Complex value =
                Complex{0.0, -2.0 / R * arg} -
                (R * R - 1.0) / R * (std::log(1.0 - z / R) + std::log(1.0 - 1.0 / (R * std::conj(z))));
            const Complex hz = (z * R - 1.0) / (z * (R - z));
            const Complex hzbar = std::conj((z - R) / (z * (z * R - 1.0)));
            return RefEval{value, hz, hzbar};
          }},
      k);
}

Complex refmap_hopf_product(const RefMapKind& k, Complex z) {
  const RefEval e = eval_refmap(k, z);
  return e.hz * std::conj(e.hzbar);
}

double hopf_constant(const RefMapKind& k) {
  return std::visit(Overloaded{[](const IdentityMap&) { return 0.0; },
                               [](const NitscheMap& m) { return -0.25 * m.r_star * m.r_star; },
                               [](const CrackedNitscheMap& m) { return -0.25 * m.r_star * m.r_star; },
                               [](const LogMap&) { return 1.0; },
                               [](const LogMapDual&) { return -1.0; }},
                    k);
}

double refmap_energy(const RefMapKind& k, const AnnulusSpec& region) {
  validate(k);
  region.validate();
  const double a = region.r;
  const double b = region.R;
  return std::visit(
      Overloaded{[&](const IdentityMap&) { return 2.0 * kPi * (b * b - a * a); },
                 [&](const NitscheMap& m) { return nitsche_energy(m.r, m.r_star, a, b); },
                 [&](const CrackedNitscheMap& m) {
                   const double collar_top = std::min(b, m.sigma);
                   double e = 0.0;
                   if (collar_top > a) e += 2.0 * kPi * m.r_star * m.r_star * std::log(collar_top / a);
                   e += nitsche_energy(m.sigma, m.r_star, std::max(a, m.sigma), b);
                   return e;
                 },
                 [&](const auto& m) {
                   // both log maps share |hz| and |hzbar|
                   const double R = m.R;
                   if (!(a > 1.0 / R) || !(b < R))
                     throw EvalDomainError("energy region must lie inside A(1/R, R)");
                   // inversion z -> 1/z preserves the energy and maps A(a, 1) onto A(1, 1/a)
                   auto from_one = [&](double rho) {
                     return rho >= 1.0 ? logmap_energy_from_one(R, rho)
                                       : -logmap_energy_from_one(R, 1.0 / rho);
                   };
                   return from_one(b) - from_one(a);
                 }},
      k);
}

std::optional<DomainSpec> refmap_image(const RefMapKind& k, const AnnulusSpec& region) {
  return std::visit(
      Overloaded{[&](const IdentityMap&) -> std::optional<DomainSpec> { return DomainSpec{region}; },
                 [&](const NitscheMap& m) -> std::optional<DomainSpec> {
                   if (region.r < m.r) return std::nullopt;
                   auto radius = [&](double t) { return 0.5 * m.r_star * (t / m.r + m.r / t); };
                   return DomainSpec{AnnulusSpec{radius(region.r), radius(region.R)}};
                 },
                 [&](const CrackedNitscheMap& m) -> std::optional<DomainSpec> {
                   if (region.r > m.sigma || region.R <= m.sigma) return std::nullopt;
                   const double outer = 0.5 * m.r_star * (region.R / m.sigma + m.sigma / region.R);
                   return DomainSpec{AnnulusSpec{m.r_star, outer}};
                 },
                 [&](const auto&) -> std::optional<DomainSpec> { return std::nullopt; }},
      k);
}

MapField sample_refmap(const RefMapKind& k, MeshPtr mesh) {
  if (!mesh->domain.is_annulus()) throw InvalidDomainError("reference maps need an annulus mesh");
  const auto target = refmap_image(k, mesh->domain.annulus());
  const bool dual = std::holds_alternative<LogMapDual>(k);
  return sample_field(mesh, target, [&](Complex z) {
    if (dual && z.imag() == 0.0 && z.real() > 0.0) {
      const auto& m = std::get<LogMapDual>(k);
      const double R = m.R;
      return -(R * R - 1.0) / R *
             (std::log(Complex{1.0 - z.real() / R, 0.0}) + std::log(Complex{1.0 - 1.0 / (R * z.real()), 0.0}));
    }
    return eval_refmap(k, z).value;
  });
}

RefMapKind parse_refmap(const std::string& kind, const std::vector<double>& p) {
  auto need = [&](std::size_t n) {
    if (p.size() != n) {
      std::ostringstream os;
      os << "reference map '" << kind << "' takes " << n << " parameter(s), got " << p.size();
      throw ConfigError(os.str());
    }
  };
  RefMapKind k;
  if (kind == "identity") {
    need(0);
    k = IdentityMap{};
  } else if (kind == "nitsche") {
    need(2);
    k = NitscheMap{p[0], p[1]};
  } else if (kind == "cracked-nitsche") {
    need(3);
    k = CrackedNitscheMap{p[0], p[1], p[2]};
  } else if (kind == "logmap") {
    need(1);
    k = LogMap{p[0]};
  } else if (kind == "logmap-dual") {
    need(1);
    k = LogMapDual{p[0]};
  } else {
    throw ConfigError("unknown reference map '" + kind + "'");
  }
  validate(k);
  return k;
}

std::string refmap_name(const RefMapKind& k) {
  return std::visit(Overloaded{[](const IdentityMap&) { return std::string("identity"); },
                               [](const NitscheMap&) { return std::string("nitsche"); },
                               [](const CrackedNitscheMap&) { return std::string("cracked-nitsche"); },
                               [](const LogMap&) { return std::string("logmap"); },
                               [](const LogMapDual&) { return std::string("logmap-dual"); }},
                    k);
}

}  // namespace hopfmin
