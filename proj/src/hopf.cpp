#include "hopfmin/hopf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "hopfmin/errors.hpp"
#include "hopfmin/kernels.hpp"

namespace hopfmin {

QuadDifferential::QuadDifferential(int n) : order(n), a(static_cast<std::size_t>(2 * n + 1)) {
  if (n < 2) throw ConfigError("quadratic differential order must be at least 2");
}

Complex QuadDifferential::coeff(int n) const {
  if (n < -order || n > order) return {0.0, 0.0};
  return a[static_cast<std::size_t>(n + order)];
}

void QuadDifferential::set(int n, Complex v) {
  if (n < -order || n > order) throw ConfigError("Laurent index out of range");
  a[static_cast<std::size_t>(n + order)] = v;
}

Complex QuadDifferential::operator()(Complex z) const {
  // Horner in z for n >= 0 and in 1/z for n < 0
  Complex pos{0.0, 0.0};
  for (int n = order; n >= 0; --n) pos = pos * z + coeff(n);
  Complex neg{0.0, 0.0};
  const Complex w = 1.0 / z;
  for (int n = -order; n <= -1; ++n) neg = (neg + coeff(n)) * w;
  return pos + neg;
}

QuadDifferential parse_quad_differential(const std::string& text) {
  const std::string prefix = "laurent:";
  if (text.rfind(prefix, 0) != 0)
    throw ConfigError("quadratic differential must look like laurent:n:re,im;...");
  std::vector<std::pair<int, Complex>> terms;
  std::stringstream ss(text.substr(prefix.size()));
  std::string item;
  int max_abs = 2;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    const auto comma = item.find(',', colon == std::string::npos ? 0 : colon);
    if (colon == std::string::npos || comma == std::string::npos)
      throw ConfigError("bad Laurent term '" + item + "'");
    try {
      const int n = std::stoi(item.substr(0, colon));
      const double re = std::stod(item.substr(colon + 1, comma - colon - 1));
      const double im = std::stod(item.substr(comma + 1));
      terms.emplace_back(n, Complex{re, im});
      max_abs = std::max(max_abs, std::abs(n));
    } catch (const std::logic_error&) {
      throw ConfigError("bad Laurent term '" + item + "'");
    }
  }
  if (terms.empty()) throw ConfigError("quadratic differential has no terms");
  QuadDifferential q(max_abs);
  for (const auto& [n, v] : terms) q.set(n, q.coeff(n) + v);
  return q;
}

void to_json(nlohmann::json& j, const QuadDifferential& q) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (int n = -q.order; n <= q.order; ++n) {
    const Complex v = q.coeff(n);
    coeffs.push_back({{"n", n}, {"re", v.real()}, {"im", v.imag()}});
  }
  j = {{"order", q.order}, {"coefficients", coeffs}};
}

std::vector<HopfSample> hopf_field(const DerivField& d) {
  std::vector<HopfSample> s(static_cast<std::size_t>(d.size()));
  for (int t = 0; t < d.size(); ++t)
    s[t] = {d.barycenter[t], d.hz[t] * std::conj(d.hzbar[t]), d.area[t]};
  return s;
}

LaurentFit laurent_fit(const std::vector<HopfSample>& samples, int order) {
  if (order < 2) throw FitError("Laurent fit order must be at least 2");
  const int m = static_cast<int>(samples.size());
  const int ncol = 2 * order + 1;
  if (m < 4 * order + 4) throw FitError("too few samples for the Laurent fit");
  double rmin = std::abs(samples[0].z), rmax = rmin;
  for (const auto& s : samples) {
    rmin = std::min(rmin, std::abs(s.z));
    rmax = std::max(rmax, std::abs(s.z));
  }
  if (!(rmax - rmin > 1e-12 * rmax)) throw FitError("Laurent fit samples span a single radius");

  Eigen::MatrixXcd A(m, ncol);
  Eigen::VectorXcd b(m);
  for (int i = 0; i < m; ++i) {
    const double sw = std::sqrt(samples[i].weight);
    const Complex z = samples[i].z;
    for (int k = 0; k < ncol; ++k) A(i, k) = sw * std::pow(z, k - order);
    b[i] = sw * samples[i].phi;
  }
  Eigen::VectorXd scale(ncol);
  for (int k = 0; k < ncol; ++k) {
    scale[k] = A.col(k).norm();
    if (!(scale[k] > 0.0)) throw FitError("Laurent fit column vanishes");
    A.col(k) /= scale[k];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
  qr.setThreshold(1e-13);
  if (qr.rank() < ncol) throw FitError("rank-deficient Laurent fit");
  const Eigen::VectorXcd x = qr.solve(b);

  LaurentFit fit;
  fit.q = QuadDifferential(order);
  for (int k = 0; k < ncol; ++k) fit.q.set(k - order, x[k] / scale[k]);
  kernels::CompensatedSum mis, nrm;
  for (const auto& s : samples) {
    mis.add(s.weight * std::abs(fit.q(s.z) - s.phi));
    nrm.add(s.weight * std::abs(s.phi));
  }
  fit.residual_rel = nrm.value() > 0.0 ? mis.value() / nrm.value() : 0.0;
  return fit;
}

HopfReport minimality_certificate(const MapField& f, const DomainSpec& target,
                                  const CertificateThresholds& th) {
  if (!f.mesh->domain.is_annulus())
    throw InvalidDomainError("the minimality certificate needs an annulus source");
  target.validate();
  const DerivField d = element_derivatives(f);
  const auto samples = hopf_field(d);
  HopfReport r;
  r.energy = kernels::dirichlet_energy(*f.mesh, f.values);
  kernels::CompensatedSum l1;
  for (const auto& s : samples) l1.add(s.weight * std::abs(s.phi));
  r.phi_l1 = l1.value();
  r.q = QuadDifferential(th.order);
  if (r.phi_l1 < th.conformal_rel * r.energy) {
    r.regime = Regime::conformal;
    r.verdict = Verdict::certified_minimal;
    return r;
  }
  const LaurentFit fit = laurent_fit(samples, th.order);
  r.q = fit.q;
  r.residual_rel = fit.residual_rel;
  const Complex a2 = fit.q.coeff(-2);
  r.c = a2.real();
  r.im_ratio = std::abs(a2) > 0.0 ? std::abs(a2.imag()) / std::abs(a2) : 1.0;
  auto mono_norm = [&](int n) {
    kernels::CompensatedSum s;
    for (const auto& p : samples) s.add(p.weight * std::norm(std::pow(p.z, n)));
    return std::sqrt(s.value());
  };
  const double ref = std::abs(a2) * mono_norm(-2);
  double spur = 0.0;
  for (int n = -th.order; n <= th.order; ++n) {
    if (n == -2) continue;
    spur = std::max(spur, std::abs(fit.q.coeff(n)) * mono_norm(n));
  }
  r.spurious_ratio = ref > 0.0 ? spur / ref : std::numeric_limits<double>::infinity();
  r.regime = r.c > 0.0 ? Regime::diffeo : Regime::crack;
  const bool ok = r.im_ratio < th.im_ratio && r.residual_rel < th.residual_rel &&
                  r.spurious_ratio < th.spurious_ratio;
  r.verdict = ok ? Verdict::certified_minimal : Verdict::not_certified;
  return r;
}

const char* to_string(Verdict v) {
  return v == Verdict::certified_minimal ? "certified_minimal" : "not_certified";
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::diffeo: return "diffeo";
    case Regime::crack: return "crack";
    case Regime::conformal: return "conformal";
  }
  return "conformal";
}

void to_json(nlohmann::json& j, const HopfReport& r) {
  j = {{"c", r.c},
       {"im_ratio", r.im_ratio},
       {"residual_rel", r.residual_rel},
       {"spurious_ratio", std::isfinite(r.spurious_ratio) ? nlohmann::json(r.spurious_ratio)
                                                          : nlohmann::json(nullptr)},
       {"verdict", to_string(r.verdict)},
       {"regime", to_string(r.regime)},
       {"phi_l1", r.phi_l1},
       {"energy", r.energy},
       {"laurent", r.q}};
}

}  // namespace hopfmin
