#include "hopfmin/energy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "hopfmin/errors.hpp"
#include "hopfmin/kernels.hpp"

namespace hopfmin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
using kernels::compensated_sum;

double j_floor_of(const std::vector<double>& J) {
  return 1e-12 * std::abs(median_jacobian(J));
}

// Real 2x2 Jacobian [[ux, uy], [vx, vy]] of a triangle.
struct Mat2 {
  double a, b, c, d;
  [[nodiscard]] double det() const { return a * d - b * c; }
};

Mat2 jacobian_of(Complex hz, Complex hzbar) {
  const Complex dx = hz + hzbar;
  const Complex dy = Complex{0.0, 1.0} * (hz - hzbar);
  return {dx.real(), dy.real(), dx.imag(), dy.imag()};
}

Mat2 inverse(const Mat2& m) {
  const double det = m.det();
  return {m.d / det, -m.b / det, -m.c / det, m.a / det};
}

Mat2 multiply(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}

void wirtinger(const Mat2& m, Complex& fz, Complex& fzbar) {
  const Complex dx{m.a, m.c};
  const Complex dy{m.b, m.d};
  fz = 0.5 * (dx - Complex{0.0, 1.0} * dy);
  fzbar = 0.5 * (dx + Complex{0.0, 1.0} * dy);
}

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

double polygon_area(const std::vector<Complex>& p) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += cross(p[k], p[(k + 1) % p.size()]);
  return 0.5 * s;
}

// Sutherland-Hodgman clip of a polygon against a counterclockwise triangle.
std::vector<Complex> clip(std::vector<Complex> poly, const std::array<Complex, 3>& tri) {
  std::vector<Complex> out;
  for (int e = 0; e < 3 && !poly.empty(); ++e) {
    const Complex a = tri[e];
    const Complex b = tri[(e + 1) % 3];
    const Complex ab = b - a;
    out.clear();
    const std::size_t n = poly.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Complex p = poly[k];
      const Complex q = poly[(k + 1) % n];
      const double sp = cross(ab, p - a);
      const double sq = cross(ab, q - a);
      if (sp >= 0.0) out.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) out.push_back(p + (q - p) * (sp / (sp - sq)));
    }
    poly.swap(out);
  }
  return poly;
}

// Uniform bucket grid over the image triangles of a field.
class TriangleGrid {
 public:
  TriangleGrid(const PolarMesh& m, std::span<const Complex> v) : m_(m), v_(v) {
    lo_ = hi_ = v[0];
    for (const Complex& p : v) {
      lo_ = {std::min(lo_.real(), p.real()), std::min(lo_.imag(), p.imag())};
      hi_ = {std::max(hi_.real(), p.real()), std::max(hi_.imag(), p.imag())};
    }
    const int nt = m.num_triangles();
    n_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(nt) / 2.0)));
    const double w = std::max(hi_.real() - lo_.real(), 1e-300);
    const double h = std::max(hi_.imag() - lo_.imag(), 1e-300);
    cw_ = w / n_;
    ch_ = h / n_;
    cells_.assign(static_cast<std::size_t>(n_) * n_, {});
    for (int t = 0; t < nt; ++t) {
      int x0, x1, y0, y1;
      box(t, x0, x1, y0, y1);
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) cells_[static_cast<std::size_t>(y) * n_ + x].push_back(t);
    }
  }

  // Triangles whose bounding boxes meet the given box, each reported once.
  void query(Complex blo, Complex bhi, std::vector<int>& out, std::vector<int>& stamp, int tag) const {
    out.clear();
    const int x0 = cell_x(blo.real()), x1 = cell_x(bhi.real());
    const int y0 = cell_y(blo.imag()), y1 = cell_y(bhi.imag());
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        for (int t : cells_[static_cast<std::size_t>(y) * n_ + x])
          if (stamp[t] != tag) {
            stamp[t] = tag;
            out.push_back(t);
          }
  }

 private:
  int cell_x(double x) const { return std::clamp(static_cast<int>((x - lo_.real()) / cw_), 0, n_ - 1); }
  int cell_y(double y) const { return std::clamp(static_cast<int>((y - lo_.imag()) / ch_), 0, n_ - 1); }
  void box(int t, int& x0, int& x1, int& y0, int& y1) const {
    const auto& tri = m_.triangles[t];
    double ax = v_[tri[0]].real(), bx = ax, ay = v_[tri[0]].imag(), by = ay;
    for (int k = 1; k < 3; ++k) {
      ax = std::min(ax, v_[tri[k]].real());
      bx = std::max(bx, v_[tri[k]].real());
      ay = std::min(ay, v_[tri[k]].imag());
      by = std::max(by, v_[tri[k]].imag());
    }
    x0 = cell_x(ax);
    x1 = cell_x(bx);
    y0 = cell_y(ay);
    y1 = cell_y(by);
  }

  const PolarMesh& m_;
  std::span<const Complex> v_;
  Complex lo_, hi_;
  int n_ = 1;
  double cw_ = 1.0, ch_ = 1.0;
  std::vector<std::vector<int>> cells_;
};

}  // namespace

double median_jacobian(const std::vector<double>& J) {
  if (J.empty()) return 0.0;
  std::vector<double> s = J;
  const std::size_t mid = (s.size() - 1) / 2;
  std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(mid), s.end());
  return s[mid];
}

EnergyBreakdown dirichlet_energy(const MapField& f) {
  const DerivField d = element_derivatives(f);
  const PolarMesh& m = *f.mesh;
  const int nt = d.size();
  std::vector<double> tot(nt), nor(nt), tan(nt);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    tot[t] = d.area[t] * 2.0 * (std::norm(d.hz[t]) + std::norm(d.hzbar[t]));
    nor[t] = d.area[t] * std::norm(d.hN[t]);
    tan[t] = d.area[t] * std::norm(d.hT[t]);
  }
  EnergyBreakdown e;
  e.total = compensated_sum(tot);
  e.normal_part = compensated_sum(nor);
  e.tangential_part = compensated_sum(tan);
  std::vector<kernels::CompensatedSum> rings(static_cast<std::size_t>(m.n_r - 1));
  for (int t = 0; t < nt; ++t) rings[m.triangle_band(t)].add(tot[t]);
  for (const auto& r : rings) e.per_ring.push_back(r.value());
  return e;
}

IdentityGap energy_identity_gap(const MapField& h, const MapField& H) {
  const PolarMesh& mh = *h.mesh;
  const PolarMesh& mH = *H.mesh;
  if (h.target && H.target && !(*h.target == *H.target))
    throw InvalidTargetError("energy identity needs both maps onto the same target");
  const DerivField dh = element_derivatives(h);
  const DerivField dH = element_derivatives(H);
  for (int t = 0; t < dH.size(); ++t)
    if (!(dH.J[t] > 0.0)) throw NotInvertibleError("H has a triangle with J <= 0");
  for (int t = 0; t < dh.size(); ++t)
    if (!(dh.J[t] > 0.0)) throw NotInvertibleError("h has a triangle with J <= 0");

  const TriangleGrid grid(mH, H.values);
  std::vector<Mat2> inv_DH(dH.size());
  for (int t = 0; t < dH.size(); ++t) inv_DH[t] = inverse(jacobian_of(dH.hz[t], dH.hzbar[t]));

  const int nt = dh.size();
  std::vector<double> first(nt, 0.0), second(nt, 0.0), img(nt, 0.0), covered(nt, 0.0);
#pragma omp parallel
  {
    std::vector<int> cand;
    std::vector<int> stamp(static_cast<std::size_t>(dH.size()), -1);
#pragma omp for schedule(static)
    for (int t = 0; t < nt; ++t) {
      const auto& tri = mh.triangles[t];
      const std::vector<Complex> poly = {h.values[tri[0]], h.values[tri[1]], h.values[tri[2]]};
      img[t] = polygon_area(poly);
      Complex blo = poly[0], bhi = poly[0];
      for (const Complex& p : poly) {
        blo = {std::min(blo.real(), p.real()), std::min(blo.imag(), p.imag())};
        bhi = {std::max(bhi.real(), p.real()), std::max(bhi.imag(), p.imag())};
      }
      grid.query(blo, bhi, cand, stamp, t);
      std::sort(cand.begin(), cand.end());
      const Complex hz = dh.hz[t];
      const Complex hzb = dh.hzbar[t];
      const Complex phi = hz * std::conj(hzb);
      const Complex gamma = std::abs(phi) > 0.0 ? phi / std::abs(phi) : Complex{0.0, 0.0};
      const Mat2 Dh = jacobian_of(hz, hzb);
      kernels::CompensatedSum s1, s2, cov;
      for (int u : cand) {
        const auto& tu = mH.triangles[u];
        const std::array<Complex, 3> target = {H.values[tu[0]], H.values[tu[1]], H.values[tu[2]]};
        const std::vector<Complex> piece = clip(poly, target);
        if (piece.size() < 3) continue;
        const double a = polygon_area(piece);
        if (!(a > 0.0)) continue;
        cov.add(a);
        const Mat2 Df = multiply(inv_DH[u], Dh);
        const double Jf = Df.det();
        Complex fz, fzb;
        wirtinger(Df, fz, fzb);
        const double src_area = a / dh.J[t];
        s1.add(src_area * 4.0 * (std::norm(fz - gamma * fzb) / Jf - 1.0) * std::abs(hz * hzb));
        s2.add(src_area * 4.0 * std::pow(std::abs(hz) - std::abs(hzb), 2) * std::norm(fzb) / Jf);
      }
      first[t] = s1.value();
      second[t] = s2.value();
      covered[t] = cov.value();
    }
  }
  IdentityGap g;
  g.first_integral = compensated_sum(first);
  g.second_integral = compensated_sum(second);
  g.rhs = g.first_integral + g.second_integral;
  const double total_img = compensated_sum(img);
  const double total_cov = compensated_sum(covered);
  g.uncovered_fraction = std::max(0.0, (total_img - total_cov) / total_img);
  if (g.uncovered_fraction > 1e-2)
    throw GeometryError("image of h is not covered by the image of H (uncovered fraction " +
                        std::to_string(g.uncovered_fraction) + ")");
  g.lhs = kernels::dirichlet_energy(mH, H.values) - kernels::dirichlet_energy(mh, h.values);
  return g;
}

BoundsReport free_lagrangian_report(const MapField& f, const AnnulusSpec& source,
                                    const DomainSpec& target) {
  source.validate();
  target.validate();
  const DerivField d = element_derivatives(f);
  const int nt = d.size();
  BoundsReport b;
  b.j_floor = j_floor_of(d.J);
  b.kN_field.assign(nt, std::numeric_limits<double>::infinity());
  b.kT_field.assign(nt, std::numeric_limits<double>::infinity());
  std::vector<double> kn(nt, 0.0), kt(nt, 0.0), area_j(nt), wphi(nt), w(nt);
  int excluded = 0;
  for (int t = 0; t < nt; ++t) {
    const Complex z = d.barycenter[t];
    area_j[t] = d.area[t] * d.J[t];
    const Complex phi = d.hz[t] * std::conj(d.hzbar[t]);
    wphi[t] = d.area[t] * std::real(phi * z * z);
    w[t] = d.area[t];
    if (d.J[t] <= b.j_floor) {
      ++excluded;
      continue;
    }
    b.kN_field[t] = std::norm(d.hN[t]) / d.J[t];
    b.kT_field[t] = std::norm(d.hT[t]) / d.J[t];
    kn[t] = d.area[t] * b.kN_field[t] / std::norm(z);
    kt[t] = d.area[t] * b.kT_field[t] / std::norm(z);
  }
  b.excluded_triangles = excluded;
  if (target.is_annulus()) {
    b.lemKn_lhs = compensated_sum(kn);
    b.lemKn_rhs = kTwoPi * std::log(target.annulus().R / target.annulus().r);
    b.target_modulus = target.annulus().modulus();
  } else {
    b.target_modulus = conformal_modulus(target, ModulusResolution{}).mod;
  }
  const double L = std::log(source.R / source.r);
  b.lemKt_lhs = compensated_sum(kt);
  b.lemKt_rhs = kTwoPi * L * L / b.target_modulus;
  b.area_lhs = compensated_sum(area_j);
  b.area_rhs = target.area();
  b.c_estimate = compensated_sum(wphi) / compensated_sum(w);
  b.ctheory_violation_fraction = hopf_system_residual(f, b.c_estimate).ctheory_violation_fraction;
  return b;
}

HopfResidual hopf_system_residual(const MapField& f, double c) {
  const DerivField d = element_derivatives(f);
  const int nt = d.size();
  const double floor = j_floor_of(d.J);
  std::vector<double> rr(nt), ro(nt), w(nt), wv(nt, 0.0), wk(nt, 0.0);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    const double a = d.area[t];
    const double nN = std::norm(d.hN[t]);
    const double nT = std::norm(d.hT[t]);
    rr[t] = a * std::abs(nN - nT - 4.0 * c / std::norm(d.barycenter[t]));
    ro[t] = a * std::abs(std::real(std::conj(d.hN[t]) * d.hT[t]));
    w[t] = a;
    if (d.J[t] > floor) {
      wk[t] = a;
      bool bad = false;
      if (c <= 0.0 && nN > d.J[t] + 1e-9) bad = true;
      if (c >= 0.0 && nT > d.J[t] + 1e-9) bad = true;
      if (bad) wv[t] = a;
    }
  }
  HopfResidual r;
  const double total = compensated_sum(w);
  r.res_radial = compensated_sum(rr) / total;
  r.res_orth = compensated_sum(ro) / total;
  const double kept = compensated_sum(wk);
  r.ctheory_violation_fraction = kept > 0.0 ? compensated_sum(wv) / kept : 0.0;
  return r;
}

DifferenceDistortion difference_distortion(const MapField& h, const MapField& H) {
  if (h.mesh->num_nodes() != H.mesh->num_nodes() || !(h.mesh->domain == H.mesh->domain) ||
      h.mesh->n_theta != H.mesh->n_theta)
    throw MeshError("difference distortion needs fields on the same mesh");
  const DerivField a = element_derivatives(h);
  const DerivField b = element_derivatives(H);
  DifferenceDistortion out;
  const int nt = a.size();
  out.k_h.resize(nt);
  out.k_H.resize(nt);
  out.k_F.resize(nt);
  auto ratio = [](Complex z, Complex zb) {
    return std::abs(z) > 0.0 ? std::abs(zb) / std::abs(z) : 0.0;
  };
  for (int t = 0; t < nt; ++t) {
    out.k_h[t] = ratio(a.hz[t], a.hzbar[t]);
    out.k_H[t] = ratio(b.hz[t], b.hzbar[t]);
    out.k_F[t] = std::sqrt(out.k_h[t] * out.k_H[t]);
  }
  out.F_values.resize(h.values.size());
  for (std::size_t n = 0; n < h.values.size(); ++n) out.F_values[n] = H.values[n] - h.values[n];
  return out;
}

double antiholomorphic_defect(const PolarMesh& mesh, std::span<const Complex> values) {
  const DerivField d = element_derivatives(mesh, values);
  std::vector<double> num(d.size()), den(d.size());
  for (int t = 0; t < d.size(); ++t) {
    num[t] = d.area[t] * std::abs(d.hzbar[t]);
    den[t] = d.area[t];
  }
  return compensated_sum(num) / compensated_sum(den);
}

void to_json(nlohmann::json& j, const EnergyBreakdown& e) {
  j = {{"total", e.total}, {"normal_part", e.normal_part}, {"tangential_part", e.tangential_part},
       {"per_ring", e.per_ring}};
}

void to_json(nlohmann::json& j, const IdentityGap& g) {
  j = {{"lhs", g.lhs},
       {"rhs", g.rhs},
       {"first_integral", g.first_integral},
       {"second_integral", g.second_integral},
       {"uncovered_fraction", g.uncovered_fraction}};
}

namespace {
nlohmann::json finite_or_null(const std::vector<double>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) a.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
  return a;
}
nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
}  // namespace

void to_json(nlohmann::json& j, const BoundsReport& b) {
  j = {{"lemKn_lhs", opt(b.lemKn_lhs)},
       {"lemKn_rhs", opt(b.lemKn_rhs)},
       {"lemKt_lhs", b.lemKt_lhs},
       {"lemKt_rhs", b.lemKt_rhs},
       {"target_modulus", b.target_modulus},
       {"area_lhs", b.area_lhs},
       {"area_rhs", b.area_rhs},
       {"c_estimate", b.c_estimate},
       {"ctheory_violation_fraction", b.ctheory_violation_fraction},
       {"excluded_triangles", b.excluded_triangles},
       {"j_floor", b.j_floor},
       {"kN_field", finite_or_null(b.kN_field)},
       {"kT_field", finite_or_null(b.kT_field)}};
}

void to_json(nlohmann::json& j, const HopfResidual& r) {
  j = {{"res_radial", r.res_radial},
       {"res_orth", r.res_orth},
       {"ctheory_violation_fraction", r.ctheory_violation_fraction}};
}

void write_energy_csv(const std::vector<EnergyRow>& rows, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path);
  os.precision(17);
  os << "label,total,normal,tangential\n";
  for (const auto& r : rows)
    os << r.label << ',' << r.energy.total << ',' << r.energy.normal_part << ','
       << r.energy.tangential_part << '\n';
}

}  // namespace hopfmin
