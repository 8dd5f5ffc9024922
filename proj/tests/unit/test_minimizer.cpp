#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "hopfmin/energy.hpp"
#include "hopfmin/errors.hpp"
#include "hopfmin/minimizer.hpp"
#include "hopfmin/refmaps.hpp"

using namespace hopfmin;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<int> interior_nodes(const PolarMesh& m) {
  std::vector<int> out;
  for (int n = 0; n < m.num_nodes(); ++n) {
    if (!m.is_boundary(n)) out.push_back(n);
  }
  return out;
}

bool cyclic_monotone(const std::vector<double>& s, double period, double tol) {
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k] < s[k - 1] - tol) return false;
  }
  return s.back() <= s.front() + period + tol;
}
}  // namespace

TEST_CASE("initial map") {
  const auto m = build_mesh(AnnulusSpec{1.0, 4.0}, 3, 16);
  const MapField f = initial_map(m, AnnulusSpec{1.0, 2.0});
  for (int j = 0; j < m->n_theta; ++j) {
    CHECK(std::abs(f.values[m->node(0, j)] - std::polar(1.0, m->theta[j])) < 1e-14);
    CHECK(std::abs(f.values[m->node(1, j)] - std::polar(std::sqrt(2.0), m->theta[j])) < 1e-14);
  }
  CHECK(f.boundary_monotone());
  for (int n : {8, 16, 32, 64}) {
    const auto mm = build_mesh(AnnulusSpec{1.0, 3.0}, n, 4 * n);
    const DerivField d = element_derivatives(initial_map(mm, AnnulusSpec{1.0, 1.3}));
    for (double J : d.J) CHECK(J > 0.0);
  }
  const MapField w = initial_map(build_mesh(AnnulusSpec{1.0, 2.0}, 8, 32), WasherSpec{2.0});
  CHECK(w.boundary_monotone());
}

TEST_CASE("harmonic replacement") {
  const auto m = build_mesh(AnnulusSpec{1.0, 2.0}, 12, 48);
  const auto region = interior_nodes(*m);
  std::vector<Complex> lin(m->nodes.size());
  const Complex a(0.3, -1.1), b(2.0, 0.5);
  for (std::size_t n = 0; n < lin.size(); ++n) lin[n] = a * m->nodes[n] + b;
  MapField noisy = make_field(m, std::nullopt, lin);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int n : region) noisy.values[n] += 0.1 * Complex(g(rng), g(rng));
  const MapField rep = harmonic_replace(noisy, region);
  for (std::size_t n = 0; n < lin.size(); ++n) CHECK(std::abs(rep.values[n] - lin[n]) < 1e-11);

  MapField nit = sample_refmap(NitscheMap{1.0, 1.0}, m);
  const MapField once = harmonic_replace(nit, region);
  const MapField twice = harmonic_replace(once, region);
  for (std::size_t n = 0; n < lin.size(); ++n) CHECK(std::abs(twice.values[n] - once.values[n]) < 1e-12);
  for (int n : region) nit.values[n] += 0.02 * Complex(g(rng), g(rng));
  CHECK(dirichlet_energy(harmonic_replace(nit, region)).total < dirichlet_energy(nit).total);
  CHECK(dirichlet_energy(harmonic_replace(nit, region)).total == Approx(dirichlet_energy(once).total).epsilon(1e-12));
  CHECK_THROWS_AS((void)harmonic_replace(nit, {m->inner_boundary[0]}), ConfigError);
}

TEST_CASE("boundary gradient matches finite differences") {
  const auto m = build_mesh(AnnulusSpec{1.0, 2.0}, 6, 24);
  for (const DomainSpec target : {DomainSpec{AnnulusSpec{1.0, 1.4}}, DomainSpec{WasherSpec{2.0}}}) {
    MapField f = initial_map(m, target);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (int n : interior_nodes(*m)) f.values[n] *= 1.0 + Complex(u(rng), u(rng));
    const BoundaryGradient grad = boundary_gradient(f);
    for (Boundary b : {Boundary::inner, Boundary::outer}) {
      const auto& gv = b == Boundary::inner ? grad.inner : grad.outer;
      for (std::size_t k = 0; k < gv.size(); k += 5) {
        // A diamond corner belongs to the edge leaving it counterclockwise, so the gradient there is one-sided.
        const double edge = std::sqrt(2.0);
        const double s = f.params(b)[k];
        const bool corner = target.is_washer() && b == Boundary::inner &&
                            std::abs(s / edge - std::round(s / edge)) < 1e-12;
        const double h = corner ? 1e-8 : 1e-6;
        MapField p = f, q = f;
        p.params(b)[k] += h;
        if (!corner) q.params(b)[k] -= h;
        p.sync_boundary_values();
        q.sync_boundary_values();
        const double fd = (dirichlet_energy(p).total - dirichlet_energy(q).total) / (corner ? h : 2 * h);
        CHECK(std::abs(fd - gv[k]) <= 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("isotonic projection") {
  std::vector<double> s = {0.0, 1.0, 2.0, 3.0, 5.0, 4.0, 6.0};
  const double P = 8.0;
  isotonic_project(s, P);
  CHECK(cyclic_monotone(s, P, 1e-12));
  CHECK(s[4] == Approx(4.5));
  CHECK(s[5] == Approx(4.5));
  std::vector<double> ok = {0.1, 0.5, 0.5, 2.0};
  const auto copy = ok;
  isotonic_project(ok, 3.0);
  CHECK(ok == copy);

  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 12;
    std::vector<double> x(n);
    for (int k = 0; k < n; ++k) x[k] = (k + u(rng) * 3.0 - 1.0) * P / n;
    std::vector<double> y = x;
    isotonic_project(y, P);
    CHECK(cyclic_monotone(y, P, 1e-12));
    double cost = 0.0;
    for (int k = 0; k < n; ++k) cost += (y[k] - x[k]) * (y[k] - x[k]);
    std::vector<double> again = y;
    isotonic_project(again, P);
    CHECK(again == y);
    // Any other feasible point nearby costs at least as much.
    for (int alt = 0; alt < 20; ++alt) {
      std::vector<double> z = y;
      for (double& v : z) v += 0.05 * (u(rng) - 0.5);
      isotonic_project(z, P);
      double c2 = 0.0;
      for (int k = 0; k < n; ++k) c2 += (z[k] - x[k]) * (z[k] - x[k]);
      CHECK(c2 >= cost - 1e-12);
    }
  }
}

TEST_CASE("boundary descent step keeps monotone parameters and does not raise energy") {
  const auto m = build_mesh(AnnulusSpec{1.0, 2.0}, 8, 32);
  MapField f = initial_map(m, WasherSpec{2.0});
  f = harmonic_replace(f, interior_nodes(*m));
  std::swap(f.inner_param[3], f.inner_param[4]);
  isotonic_project(f.inner_param, 4 * std::sqrt(2.0));
  f.sync_boundary_values();
  const double e0 = dirichlet_energy(f).total;
  const MapField g = boundary_descent_step(f, 1.0);
  CHECK(g.boundary_monotone());
  CHECK(dirichlet_energy(g).total <= e0 + 1e-12);
  CHECK(g.inner_param.back() - g.inner_param.front() <= 4 * std::sqrt(2.0) + 1e-12);
}

TEST_CASE("solver on annulus targets") {
  const auto m = build_mesh(AnnulusSpec{1.0, 2.0}, 24, 96);
  const SolveResult conf = solve(m, AnnulusSpec{1.0, 2.0}, SolverConfig{});
  CHECK(conf.converged);
  CHECK(conf.energy_history.back() == Approx(6 * kPi).epsilon(5e-3));
  for (std::size_t k = 1; k < conf.energy_history.size(); ++k) {
    CHECK(conf.energy_history[k] <= conf.energy_history[k - 1] + 1e-12 * conf.energy_history[k - 1]);
  }
  const SolveResult nit = solve(m, AnnulusSpec{1.0, 1.25}, SolverConfig{});
  CHECK(nit.converged);
  CHECK(nit.field.boundary_monotone());
  const BoundaryGradient g = boundary_gradient(nit.field);
  CHECK(g.max_abs() < 1e-4);
  const GaugeResult ga = gauge_align(nit.field, sample_refmap(NitscheMap{1.0, 1.0}, m));
  CHECK(ga.linf < 2e-2);
  // Solving from a rotated start gives the same energy.
  const MapField rot = rotate_source(initial_map(m, AnnulusSpec{1.0, 1.25}), 5);
  const SolveResult r2 = solve_from(rot, SolverConfig{});
  CHECK(r2.energy_history.back() == Approx(nit.energy_history.back()).epsilon(1e-10));
  const nlohmann::json j = solve_result_json(nit);
  CHECK(j["converged"].get<bool>());
  CHECK(j["energy_history"].size() == nit.energy_history.size());
}

TEST_CASE("non-convergence is reported") {
  const auto m = build_mesh(AnnulusSpec{1.0, 4.0}, 16, 64);
  SolverConfig cfg;
  cfg.max_outer_iters = 1;
  const SolveResult r = solve(m, AnnulusSpec{1.0, 1.25}, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.outer_iters == 1);
  CHECK(r.energy_history.size() >= 1);
}

TEST_CASE("gauge alignment recovers a grid rotation") {
  const auto m = build_mesh(AnnulusSpec{1.0, 2.0}, 8, 32);
  MapField ref = sample_refmap(NitscheMap{1.0, 1.0}, m);
  for (int n = 0; n < m->num_nodes(); ++n) {
    const double th = std::arg(m->nodes[n]);
    if (!m->is_boundary(n)) ref.values[n] += 0.05 * std::cos(th) * std::cos(th);
  }
  const GaugeResult g = gauge_align(rotate_source(ref, 3), ref);
  CHECK(((g.shift % 32) + 32) % 32 == 29);
  CHECK(g.l2 < 1e-12);
  CHECK(g.linf < 1e-12);
}

TEST_CASE("solver config validation and JSON") {
  SolverConfig c;
  c.grad_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  SolverConfig d;
  d.seed = 99;
  d.max_outer_iters = 7;
  const nlohmann::json j = d;
  const SolverConfig back = j.get<SolverConfig>();
  CHECK(back.seed == 99);
  CHECK(back.max_outer_iters == 7);
  CHECK(back.energy_rel_tol == 1e-10);
  CHECK_THROWS_AS((void)nlohmann::json::parse(R"({"bogus": 1})").get<SolverConfig>(), ConfigError);
  const SolverConfig partial = nlohmann::json::parse(R"({"grad_tol": 1e-6})").get<SolverConfig>();
  CHECK(partial.grad_tol == 1e-6);
  CHECK(partial.stagnation_window == 10);
}
