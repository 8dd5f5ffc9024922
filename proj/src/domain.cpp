#include "hopfmin/domain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hopfmin/errors.hpp"

namespace hopfmin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);
const double kDiamondPeriod = 4.0 * std::sqrt(2.0);

constexpr std::array<Complex, 5> kDiamondCorners = {
    Complex{1.0, 0.0}, Complex{0.0, 1.0}, Complex{-1.0, 0.0}, Complex{0.0, -1.0},
    Complex{1.0, 0.0}};

double wrap(double s, double period) {
  double w = s - period * std::floor(s / period);
  if (w >= period) w -= period;
  return w;
}

// Edge index and edge coordinate of a wrapped diamond parameter. Parameters
// within 1e-12 of a corner belong to the edge leaving it counterclockwise, so
// the choice does not depend on rounding and is the same at every corner.
std::pair<int, double> diamond_edge(double s) {
  double u = wrap(s, kDiamondPeriod) / kSqrt2;
  int edge = static_cast<int>(std::floor(u + 1e-12));
  if (edge >= 4) {
    edge = 0;
    u -= 4.0;
  }
  return {edge, u - edge};
}

Complex diamond_at(double s) {
  const auto [edge, t] = diamond_edge(s);
  return kDiamondCorners[edge] + t * (kDiamondCorners[edge + 1] - kDiamondCorners[edge]);
}

Complex diamond_tangent_at(double s) {
  const int edge = diamond_edge(s).first;
  return (kDiamondCorners[edge + 1] - kDiamondCorners[edge]) / kSqrt2;
}

CurvePoint closest_on_circle(double radius, Complex p, double lo, double hi) {
  const double period = kTwoPi;
  double angle = (std::abs(p) > 0.0) ? std::arg(p) : 0.0;
  // shift into [lo, lo + period)
  double s = lo + wrap(angle - lo, period);
  if (s > hi) {
    // outside the window: pick the nearer endpoint in angular distance
    const double to_hi = s - hi;
    const double to_lo = lo + period - s;
    s = (to_hi <= to_lo) ? hi : lo;
  }
  const Complex q = std::polar(radius, s);
  return {s, q, std::abs(q - p)};
}

constexpr double kTieTol = 1e-12;

CurvePoint closest_on_diamond(Complex p, double lo, double hi) {
  CurvePoint best{lo, diamond_at(lo), std::numeric_limits<double>::infinity()};
  best.distance = std::abs(best.point - p);
  const int m0 = static_cast<int>(std::floor(lo / kDiamondPeriod)) - 1;
  for (int m = m0; m <= m0 + 2; ++m) {
    for (int e = 0; e < 4; ++e) {
      const double e0 = m * kDiamondPeriod + e * kSqrt2;
      const double e1 = e0 + kSqrt2;
      const double a = std::max(e0, lo);
      const double b = std::min(e1, hi);
      if (a > b) continue;
      const Complex c0 = kDiamondCorners[e];
      const Complex dir = kDiamondCorners[e + 1] - c0;
      const double t = std::real((p - c0) * std::conj(dir)) / std::norm(dir);
      const double s = std::clamp(e0 + t * kSqrt2, a, b);
      const Complex q = c0 + ((s - e0) / kSqrt2) * dir;
      const double dist = std::abs(q - p);
      // near-ties go to the counterclockwise candidate, independent of the
      // visiting order
      const bool better = dist < best.distance - kTieTol ||
                          (dist <= best.distance + kTieTol && std::arg(q) > std::arg(best.point));
      if (better) best = {s, q, dist};
    }
  }
  return best;
}

// Quarter-turn sector of p: k with i^{-k} p in {x > 0, -x < y <= x}. The test
// uses exact swaps and negations, so sector(i p) = sector(p) + 1 mod 4.
int quarter_sector(Complex p) {
  for (int k = 0; k < 4; ++k) {
    if (p.real() > 0.0 && p.imag() <= p.real() && p.imag() > -p.real()) return k;
    p = Complex{p.imag(), -p.real()};
  }
  return 0;
}

Complex turn(Complex p, int k) {
  for (int c = 0; c < k; ++c) p = Complex{-p.imag(), p.real()};
  return p;
}

// closest_on_diamond evaluated in the frame of p's sector, so that ties at a
// corner bisector resolve identically at all four corners.
CurvePoint closest_on_diamond_sym(Complex p, double lo, double hi) {
  const int k = quarter_sector(p);
  if (k == 0) return closest_on_diamond(p, lo, hi);
  const double shift = k * kSqrt2;
  CurvePoint cp = closest_on_diamond(turn(p, 4 - k), lo - shift, hi - shift);
  double s = cp.s + shift;
  if (s > hi && s - kDiamondPeriod >= lo) s -= kDiamondPeriod;
  cp.s = std::clamp(s, lo, hi);
  cp.point = turn(cp.point, k);
  return cp;
}

}  // namespace

const char* to_string(Boundary b) { return b == Boundary::inner ? "inner" : "outer"; }

void AnnulusSpec::validate() const {
  if (!(r > 0.0) || !(R > r) || !std::isfinite(R)) {
    std::ostringstream os;
    os << "invalid annulus: need 0 < r < R < inf, got r=" << r << " R=" << R;
    throw InvalidDomainError(os.str());
  }
}

double AnnulusSpec::modulus() const { return std::log(R / r); }

void WasherSpec::validate() const {
  if (!(rho > 1.0) || !std::isfinite(rho)) {
    std::ostringstream os;
    os << "invalid washer: need rho > 1, got rho=" << rho;
    throw InvalidDomainError(os.str());
  }
}

DomainSpec::DomainSpec(AnnulusSpec a) : v_(a) {}
DomainSpec::DomainSpec(WasherSpec w) : v_(w) {}

const AnnulusSpec& DomainSpec::annulus() const {
  if (!is_annulus()) throw InvalidDomainError("domain is not an annulus");
  return std::get<AnnulusSpec>(v_);
}

const WasherSpec& DomainSpec::washer() const {
  if (!is_washer()) throw InvalidDomainError("domain is not a washer");
  return std::get<WasherSpec>(v_);
}

void DomainSpec::validate() const {
  std::visit([](const auto& s) { s.validate(); }, v_);
}

double DomainSpec::period(Boundary b) const {
  return is_circle(b) ? kTwoPi : kDiamondPeriod;
}

bool DomainSpec::is_circle(Boundary b) const { return is_annulus() || b == Boundary::outer; }

double DomainSpec::area() const {
  if (is_annulus()) {
    const auto& a = annulus();
    return std::numbers::pi * (a.R * a.R - a.r * a.r);
  }
  const double rho = washer().rho;
  return std::numbers::pi * rho * rho - 2.0;
}

double DomainSpec::diameter() const { return 2.0 * outer_radius(); }

double DomainSpec::outer_radius() const {
  return is_annulus() ? annulus().R : washer().rho;
}

bool DomainSpec::contains(Complex p) const {
  const double m = std::abs(p);
  if (is_annulus()) {
    const auto& a = annulus();
    return m > a.r && m < a.R;
  }
  return std::abs(p.real()) + std::abs(p.imag()) > 1.0 && m < washer().rho;
}

bool DomainSpec::operator==(const DomainSpec& o) const {
  if (is_annulus() && o.is_annulus())
    return annulus().r == o.annulus().r && annulus().R == o.annulus().R;
  if (is_washer() && o.is_washer()) return washer().rho == o.washer().rho;
  return false;
}

Complex boundary_point(const DomainSpec& d, Boundary b, double s) {
  if (d.is_annulus()) {
    const auto& a = d.annulus();
    return std::polar(b == Boundary::inner ? a.r : a.R, s);
  }
  if (b == Boundary::outer) return std::polar(d.washer().rho, s);
  return diamond_at(s);
}

Complex boundary_tangent(const DomainSpec& d, Boundary b, double s) {
  if (d.is_circle(b)) {
    const double radius =
        d.is_annulus() ? (b == Boundary::inner ? d.annulus().r : d.annulus().R) : d.washer().rho;
    return Complex{0.0, 1.0} * std::polar(radius, s);
  }
  return diamond_tangent_at(s);
}

CurvePoint closest_boundary_point(const DomainSpec& d, Boundary b, Complex p, double lo,
                                  double hi) {
  if (d.is_circle(b)) {
    const double radius =
        d.is_annulus() ? (b == Boundary::inner ? d.annulus().r : d.annulus().R) : d.washer().rho;
    return closest_on_circle(radius, p, lo, hi);
  }
  return closest_on_diamond_sym(p, lo, hi);
}

CurvePoint closest_boundary_point(const DomainSpec& d, Boundary b, Complex p) {
  return closest_boundary_point(d, b, p, 0.0, d.period(b));
}

double distance_to_boundary(const DomainSpec& d, Boundary b, Complex p) {
  return closest_boundary_point(d, b, p).distance;
}

ClosureProjection project_to_closure(const DomainSpec& d, Complex p) {
  const double m = std::abs(p);
  const double outer = d.outer_radius();
  if (m > outer) return {p * (outer / m), Boundary::outer};
  if (d.is_annulus()) {
    const double r = d.annulus().r;
    if (m < r) {
      if (m == 0.0) return {Complex{r, 0.0}, Boundary::inner};
      return {p * (r / m), Boundary::inner};
    }
    return {p, std::nullopt};
  }
  if (std::abs(p.real()) + std::abs(p.imag()) < 1.0)
    return {closest_on_diamond_sym(p, 0.0, kDiamondPeriod).point, Boundary::inner};
  return {p, std::nullopt};
}

Complex diamond_point_on_ray(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return Complex{c, s} / (std::abs(c) + std::abs(s));
}

double diamond_param_on_ray(double theta) {
  return closest_on_diamond_sym(diamond_point_on_ray(theta), 0.0, kDiamondPeriod).s;
}

double nitsche_bound(double r, double R) {
  AnnulusSpec{r, R}.validate();
  return 0.5 * (R / r + r / R);
}

std::optional<double> nitsche_sigma(double r, double R, double r_star, double R_star) {
  AnnulusSpec{r, R}.validate();
  if (!(r_star > 0.0) || !(R_star / r_star > 1.0) || !std::isfinite(R_star)) {
    std::ostringstream os;
    os << "invalid target annulus: need R_*/r_* > 1, got r_*=" << r_star << " R_*=" << R_star;
    throw InvalidTargetError(os.str());
  }
  const double q = R_star / r_star;
  if (q >= nitsche_bound(r, R)) return std::nullopt;
  // smaller root of sigma^2 - 2 q R sigma + R^2 = 0, written without cancellation
  const double disc = std::sqrt(q * q - 1.0);
  const double sigma = R / (q + disc);
  return sigma;
}

void to_json(nlohmann::json& j, const DomainSpec& d) {
  if (d.is_annulus()) {
    j = {{"annulus", {{"r", d.annulus().r}, {"R", d.annulus().R}}}};
  } else {
    j = {{"washer", {{"rho", d.washer().rho}}}};
  }
}

void from_json(const nlohmann::json& j, DomainSpec& d) {
  if (!j.is_object() || j.size() != 1)
    throw InvalidDomainError("domain JSON must hold exactly one of 'annulus' or 'washer'");
  if (j.contains("annulus")) {
    const auto& a = j.at("annulus");
    d = AnnulusSpec{a.at("r").get<double>(), a.at("R").get<double>()};
  } else if (j.contains("washer")) {
    d = WasherSpec{j.at("washer").at("rho").get<double>()};
  } else {
    throw InvalidDomainError("domain JSON must hold exactly one of 'annulus' or 'washer'");
  }
  d.validate();
}

void to_json(nlohmann::json& j, const ModulusResult& m) {
  j = {{"mod", m.mod},
       {"dirichlet_of_potential", m.dirichlet_of_potential},
       {"refinement_level", m.refinement_level}};
}

DomainSpec parse_domain(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw InvalidDomainError("domain must look like annulus:r,R or washer:rho, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  std::vector<double> nums;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      nums.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InvalidDomainError("bad number '" + item + "' in domain '" + text + "'");
    }
  }
  DomainSpec d;
  if (kind == "annulus" && nums.size() == 2) {
    d = AnnulusSpec{nums[0], nums[1]};
  } else if (kind == "washer" && nums.size() == 1) {
    d = WasherSpec{nums[0]};
  } else {
    throw InvalidDomainError("domain must look like annulus:r,R or washer:rho, got '" + text + "'");
  }
  d.validate();
  return d;
}

}  // namespace hopfmin
