#include "hopfmin/cracks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "hopfmin/energy.hpp"
#include "hopfmin/errors.hpp"

namespace hopfmin {

namespace {

constexpr std::array<Complex, 4> kCorners = {Complex{1.0, 0.0}, Complex{0.0, 1.0},
                                             Complex{-1.0, 0.0}, Complex{0.0, -1.0}};

// Radius at which the distance signal crosses eps between rings i and i + 1
// (walking outward from the inner boundary), or rho_i when there is no crossing.
double refine(double rho_i, double rho_next, double d_i, double d_next, double eps) {
  if (!(d_next > d_i) || d_next < eps || d_i > eps) return rho_i;
  return rho_i + (eps - d_i) / (d_next - d_i) * (rho_next - rho_i);
}

}  // namespace

SidedJacobian sided_jacobian(const MapField& f) {
  const DerivField d = element_derivatives(f);
  const PolarMesh& m = *f.mesh;
  const double inf = std::numeric_limits<double>::infinity();
  SidedJacobian sj;
  sj.outward.assign(m.nodes.size(), inf);
  sj.inward.assign(m.nodes.size(), inf);
  for (int t = 0; t < d.size(); ++t) {
    const auto& tri = m.triangles[t];
    int band = m.n_r;
    for (int v : tri) band = std::min(band, m.ring_index[v]);
    for (int v : tri) {
      auto& slot = m.ring_index[v] == band ? sj.outward[v] : sj.inward[v];
      slot = std::min(slot, d.J[t]);
    }
  }
  // boundary rings have a single side
  for (int v : m.outer_boundary) sj.outward[v] = sj.inward[v];
  for (int v : m.inner_boundary) sj.inward[v] = sj.outward[v];
  return sj;
}

double jacobian_scale(const std::vector<double>& J) {
  double jmax = 0.0;
  for (double j : J) jmax = std::max(jmax, j);
  std::vector<double> kept;
  for (double j : J)
    if (j > 1e-6 * jmax) kept.push_back(j);
  return median_jacobian(kept);
}

std::vector<RayProfile> ray_profile(const MapField& f, const DomainSpec& target,
                                    const CrackOptions& opt) {
  const PolarMesh& m = *f.mesh;
  if (!m.domain.is_annulus()) throw InvalidDomainError("crack analysis needs an annulus source");
  target.validate();
  const DerivField d = element_derivatives(f);
  const SidedJacobian sj = sided_jacobian(f);
  const double eps = opt.eps_rel * target.diameter();
  const double eps_J = opt.eps_j_rel * jacobian_scale(d.J);
  const int nr = m.n_r;
  std::vector<RayProfile> out(static_cast<std::size_t>(m.n_theta));
#pragma omp parallel for schedule(static)
  for (int j = 0; j < m.n_theta; ++j) {
    RayProfile p;
    p.theta = m.theta[j];
    std::vector<double> din(nr), dout(nr);
    for (int i = 0; i < nr; ++i) {
      const Complex v = f.values[m.node(i, j)];
      din[i] = distance_to_boundary(target, Boundary::inner, v);
      dout[i] = distance_to_boundary(target, Boundary::outer, v);
    }
    // the Jacobian signal of a node looks away from the boundary being scanned
    auto collapsed_in = [&](int i) { return din[i] < eps && sj.outward[m.node(i, j)] < eps_J; };
    auto collapsed_out = [&](int i) { return dout[i] < eps && sj.inward[m.node(i, j)] < eps_J; };
    int a = 0;
    while (a < nr && collapsed_in(a)) ++a;
    const int top_in = std::max(a - 1, 0);  // last collapsed ring (0 when none)
    int b = nr - 1;
    while (b >= 0 && collapsed_out(b)) --b;
    const int bot_out = std::min(b + 1, nr - 1);
    p.inner_rings = top_in;
    p.outer_rings = nr - 1 - bot_out;
    p.r_theta = m.ring_radius(top_in);
    if (top_in > 0 && top_in + 1 < nr)
      p.r_theta = refine(m.ring_radius(top_in), m.ring_radius(top_in + 1), din[top_in], din[top_in + 1], eps);
    p.R_theta = m.ring_radius(bot_out);
    if (bot_out < nr - 1 && bot_out > 0) {
      // mirror of the inner refinement, walking inward
      const double rho = m.ring_radius(bot_out), rho_prev = m.ring_radius(bot_out - 1);
      if (dout[bot_out] <= eps && dout[bot_out - 1] > dout[bot_out] && dout[bot_out - 1] >= eps)
        p.R_theta = rho + (eps - dout[bot_out]) / (dout[bot_out - 1] - dout[bot_out]) * (rho_prev - rho);
    }
    out[j] = p;
  }
  return out;
}

double quarter_turn_defect(const MapField& f) {
  const PolarMesh& m = *f.mesh;
  if (m.n_theta % 4 != 0) throw ConfigError("quarter-turn symmetry needs n_theta divisible by 4");
  const int q = m.n_theta / 4;
  double worst = 0.0;
  for (int n = 0; n < m.num_nodes(); ++n) {
    const Complex fi = f.values[m.rotated(n, q)];  // f(i z)
    worst = std::max(worst, std::abs(fi - Complex{0.0, 1.0} * f.values[n]));
  }
  return worst;
}

CrackReport crack_report(const MapField& f, const DomainSpec& target, const CrackOptions& opt) {
  const PolarMesh& m = *f.mesh;
  CrackReport rep;
  rep.rays = ray_profile(f, target, opt);
  rep.eps = opt.eps_rel * target.diameter();
  rep.eps_J = opt.eps_j_rel * jacobian_scale(element_derivatives(f).J);
  const int nt = m.n_theta;
  const double r = m.ring_radius(0);
  const double R = m.ring_radius(m.n_r - 1);

  for (const auto& p : rep.rays)
    if (p.inner_rings + p.outer_rings >= m.n_r - 1) rep.crosscut_detected = true;
  rep.middle_region_ok = !rep.crosscut_detected;

  // radial monotonicity: collapsed nodes on a ray form one interval anchored at the boundary
  const SidedJacobian sj = sided_jacobian(f);
  for (int j = 0; j < nt && rep.radially_monotone; ++j) {
    const int top = rep.rays[j].inner_rings;
    if (top == 0) continue;
    const Complex anchor = f.values[m.node(0, j)];
    for (int i = top + 2; i < m.n_r - 1 - rep.rays[j].outer_rings; ++i) {
      const Complex v = f.values[m.node(i, j)];
      if (std::abs(v - anchor) < 1e-9 * target.diameter() && sj.outward[m.node(i, j)] < rep.eps_J) {
        rep.radially_monotone = false;
        break;
      }
    }
  }

  auto collect = [&](bool inner) {
    std::vector<Crack> cracks;
    std::vector<char> flag(static_cast<std::size_t>(nt));
    for (int j = 0; j < nt; ++j) {
      const int rings = inner ? rep.rays[j].inner_rings : rep.rays[j].outer_rings;
      flag[j] = rings > opt.ring_tolerance ? 1 : 0;
    }
    const bool all = std::all_of(flag.begin(), flag.end(), [](char c) { return c != 0; });
    int start = 0;
    if (!all) {
      // begin scanning just after an unflagged ray so runs never straddle the seam
      while (flag[start]) ++start;
    }
    auto finish = [&](int first, int count) {
      Crack c;
      c.theta_start = m.theta[first % nt];
      c.theta_end = m.theta[(first + count - 1) % nt];
      c.rays = count;
      int best = first % nt;
      for (int k = 0; k < count; ++k) {
        const int j = (first + k) % nt;
        const auto& p = rep.rays[j];
        const int rings = inner ? p.inner_rings : p.outer_rings;
        const int best_rings = inner ? rep.rays[best].inner_rings : rep.rays[best].outer_rings;
        if (rings > best_rings) best = j;
        c.length = std::max(c.length, inner ? p.r_theta - r : R - p.R_theta);
      }
      const auto& pb = rep.rays[best];
      c.length_rings = inner ? pb.inner_rings : pb.outer_rings;
      // mean image of every collapsed node of the run
      Complex sum{0.0, 0.0};
      int cnt = 0;
      for (int k = 0; k < count; ++k) {
        const int j = (first + k) % nt;
        const int rings = inner ? rep.rays[j].inner_rings : rep.rays[j].outer_rings;
        for (int i = 0; i <= rings; ++i) {
          sum += f.values[m.node(inner ? i : m.n_r - 1 - i, j)];
          ++cnt;
        }
      }
      c.target_point = sum / static_cast<double>(cnt);
      if (target.is_washer() && inner) {
        for (int k = 0; k < 4; ++k)
          if (std::abs(c.target_point - kCorners[k]) < rep.eps) c.corner = k;
      }
      cracks.push_back(c);
    };
    if (all) {
      finish(0, nt);
      return cracks;
    }
    int k = 0;
    while (k < nt) {
      const int j = (start + k) % nt;
      if (!flag[j]) {
        ++k;
        continue;
      }
      int len = 0;
      while (k + len < nt && flag[(start + k + len) % nt]) ++len;
      finish(j, len);
      k += len;
    }
    return cracks;
  };
  rep.inner_cracks = collect(true);
  rep.outer_cracks = collect(false);

  if (target.is_washer()) {
    std::array<std::optional<double>, 4> align{};
    bool ok = rep.outer_cracks.empty();
    for (const auto& c : rep.inner_cracks) {
      if (!c.corner) {
        ok = false;
        continue;
      }
      // central source angle of the run
      double mid = 0.5 * (c.theta_start + c.theta_end);
      if (c.theta_end < c.theta_start) mid = std::fmod(mid + std::numbers::pi, 2.0 * std::numbers::pi);
      align[*c.corner] = mid;
    }
    rep.washer_corner_alignment = align;
    rep.corner_targeting_ok = ok;
    if (m.n_theta % 4 == 0) rep.symmetry_defect = quarter_turn_defect(f);
  }
  return rep;
}

namespace {
nlohmann::json crack_json(const Crack& c) {
  nlohmann::json j = {{"theta_interval", {c.theta_start, c.theta_end}},
                      {"rays", c.rays},
                      {"length", c.length},
                      {"length_rings", c.length_rings},
                      {"target_point", {c.target_point.real(), c.target_point.imag()}}};
  j["corner"] = c.corner ? nlohmann::json(*c.corner) : nlohmann::json(nullptr);
  return j;
}
}  // namespace

void to_json(nlohmann::json& j, const CrackReport& r) {
  nlohmann::json rays = nlohmann::json::array();
  for (const auto& p : r.rays)
    rays.push_back({{"theta", p.theta},
                    {"r_theta", p.r_theta},
                    {"R_theta", p.R_theta},
                    {"inner_rings", p.inner_rings},
                    {"outer_rings", p.outer_rings}});
  nlohmann::json inner = nlohmann::json::array();
  for (const auto& c : r.inner_cracks) inner.push_back(crack_json(c));
  nlohmann::json outer = nlohmann::json::array();
  for (const auto& c : r.outer_cracks) outer.push_back(crack_json(c));
  j = {{"rays", rays},
       {"inner_cracks", inner},
       {"outer_cracks", outer},
       {"crosscut_detected", r.crosscut_detected},
       {"middle_region_ok", r.middle_region_ok},
       {"radially_monotone", r.radially_monotone},
       {"eps", r.eps},
       {"eps_J", r.eps_J}};
  if (r.washer_corner_alignment) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& v : *r.washer_corner_alignment) a.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
    j["washer_corner_alignment"] = a;
  } else {
    j["washer_corner_alignment"] = nullptr;
  }
  j["corner_targeting_ok"] = r.corner_targeting_ok ? nlohmann::json(*r.corner_targeting_ok) : nlohmann::json(nullptr);
  j["symmetry_defect"] = r.symmetry_defect ? nlohmann::json(*r.symmetry_defect) : nlohmann::json(nullptr);
}

void write_rays_csv(const CrackReport& r, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path);
  os.precision(17);
  os << "theta,r_theta,R_theta\n";
  for (const auto& p : r.rays) os << p.theta << ',' << p.r_theta << ',' << p.R_theta << '\n';
}

}  // namespace hopfmin
