#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "hopfmin/errors.hpp"
#include "hopfmin/hopf.hpp"
#include "hopfmin/refmaps.hpp"

using namespace hopfmin;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<HopfSample> synthetic(const std::function<Complex(Complex)>& phi, int n_rad = 12,
                                  int n_ang = 48) {
  std::vector<HopfSample> s;
  for (int i = 0; i < n_rad; ++i) {
    const double rho = std::exp(std::log(2.0) * (i + 0.5) / n_rad);
    for (int j = 0; j < n_ang; ++j) {
      const Complex z = std::polar(rho, 2 * kPi * (j + 0.25) / n_ang);
      s.push_back({z, phi(z), rho * rho});
    }
  }
  return s;
}
}  // namespace

TEST_CASE("laurent fit recovers exact samples") {
  const LaurentFit a = laurent_fit(synthetic([](Complex z) { return 1.0 / (z * z); }), 6);
  CHECK(std::abs(a.q.coeff(-2) - 1.0) < 1e-10);
  for (int n = -6; n <= 6; ++n) {
    if (n != -2) CHECK(std::abs(a.q.coeff(n)) < 1e-10);
  }
  CHECK(a.residual_rel < 1e-10);
  const LaurentFit b = laurent_fit(synthetic([](Complex z) { return -0.25 / (z * z); }), 6);
  CHECK(b.q.c() == Approx(-0.25).epsilon(1e-12));
  const LaurentFit c = laurent_fit(synthetic([](Complex z) { return 1.0 / (z * z) + 0.01 * z; }), 6);
  CHECK(std::abs(c.q.coeff(-2) - 1.0) < 1e-8);
  CHECK(std::abs(c.q.coeff(1) - 0.01) < 1e-8);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  QuadDifferential q(4);
  for (int n = -4; n <= 4; ++n) q.set(n, Complex(g(rng), g(rng)) * std::pow(0.5, std::abs(n)));
  const LaurentFit d = laurent_fit(synthetic([&](Complex z) { return q(z); }), 4);
  CHECK(d.residual_rel < 1e-10);
  for (int n = -4; n <= 4; ++n) CHECK(std::abs(d.q.coeff(n) - q.coeff(n)) < 1e-9);
}

TEST_CASE("laurent fit failures") {
  const auto one_radius = [] {
    std::vector<HopfSample> s;
    for (int j = 0; j < 64; ++j) s.push_back({std::polar(1.5, 0.1 * j), 1.0, 1.0});
    return s;
  }();
  CHECK_THROWS_AS((void)laurent_fit(one_radius, 3), FitError);
  CHECK_THROWS_AS((void)laurent_fit(synthetic([](Complex) { return 1.0; }, 2, 3), 6), FitError);
  CHECK_THROWS_AS((void)laurent_fit(synthetic([](Complex) { return 1.0; }), 1), FitError);
}

TEST_CASE("hopf field of reference maps") {
  const auto m = build_mesh(AnnulusSpec{1.0, 2.0}, 32, 128);
  for (const HopfSample& s : hopf_field(element_derivatives(sample_refmap(IdentityMap{}, m)))) {
    CHECK(std::abs(s.phi) < 1e-12);
  }
  double worst = 0.0;
  for (const HopfSample& s :
       hopf_field(element_derivatives(sample_refmap(NitscheMap{1.0, 1.0}, m)))) {
    worst = std::max(worst, std::abs(s.phi * s.z * s.z + 0.25) / 0.25);
    CHECK(s.weight > 0.0);
  }
  CHECK(worst < 5e-2);
}

TEST_CASE("minimality certificate verdicts") {
  const auto m = build_mesh(AnnulusSpec{1.0, 2.0}, 32, 128);
  const HopfReport nit = minimality_certificate(sample_refmap(NitscheMap{1.0, 1.0}, m), AnnulusSpec{1.0, 1.25});
  CHECK(nit.verdict == Verdict::certified_minimal);
  CHECK(nit.regime == Regime::crack);
  CHECK(nit.c == Approx(-0.25).epsilon(2e-2));

  const auto ml = build_mesh(AnnulusSpec{1.0, 1.5}, 32, 128);
  const MapField lm = sample_refmap(LogMap{2.0}, ml);
  const HopfReport log = minimality_certificate(lm, AnnulusSpec{1.0, 2.0});
  CHECK(log.verdict == Verdict::certified_minimal);
  CHECK(log.regime == Regime::diffeo);
  CHECK(log.c == Approx(1.0).epsilon(2e-2));

  const HopfReport id = minimality_certificate(sample_refmap(IdentityMap{}, m), AnnulusSpec{1.0, 2.0});
  CHECK(id.verdict == Verdict::certified_minimal);
  CHECK(id.regime == Regime::conformal);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MapField p = sample_refmap(NitscheMap{1.0, 1.0}, m);
  for (int n = 0; n < m->num_nodes(); ++n) {
    if (!m->is_boundary(n)) p.values[n] += 0.05 * std::abs(p.values[n]) * Complex(u(rng), u(rng));
  }
  const HopfReport bad = minimality_certificate(p, AnnulusSpec{1.0, 1.25});
  CHECK(bad.verdict == Verdict::not_certified);
  CHECK(bad.residual_rel > 5e-2);
}

TEST_CASE("certificate constant is invariant under source rotation") {
  const auto m = build_mesh(AnnulusSpec{1.0, 2.0}, 16, 64);
  MapField f = sample_refmap(NitscheMap{1.0, 1.0}, m);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < m->num_nodes(); ++n) {
    if (!m->is_boundary(n)) f.values[n] += 0.003 * Complex(u(rng), u(rng));
  }
  const double c0 = minimality_certificate(f, AnnulusSpec{1.0, 1.25}).c;
  for (int s : {1, 7, 16}) {
    CHECK(minimality_certificate(rotate_source(f, s), AnnulusSpec{1.0, 1.25}).c ==
          Approx(c0).epsilon(1e-10));
  }
}

TEST_CASE("certificate residual decreases under refinement") {
  double prev = 1e300;
  for (int n : {16, 32, 64}) {
    const auto m = build_mesh(AnnulusSpec{1.0, 2.0}, n, 4 * n);
    const double r = minimality_certificate(sample_refmap(NitscheMap{1.0, 1.0}, m), AnnulusSpec{1.0, 1.25}).residual_rel;
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("quadratic differential parsing") {
  const QuadDifferential q = parse_quad_differential("laurent:-2:1.0,0.0;1:0.5,-0.5");
  CHECK(q.order >= 2);
  CHECK(q.coeff(-2) == Complex(1.0, 0.0));
  CHECK(q.coeff(1) == Complex(0.5, -0.5));
  CHECK(q(Complex(2.0, 0.0)) == Complex(0.25 + 1.0, -1.0));
  CHECK_THROWS_AS((void)parse_quad_differential("poly:1"), ConfigError);
  CHECK_THROWS_AS((void)parse_quad_differential("laurent:x:1,0"), ConfigError);
  const nlohmann::json j = q;
  CHECK(j["order"] == q.order);
  CHECK(j["coefficients"].size() == static_cast<std::size_t>(2 * q.order + 1));
}
