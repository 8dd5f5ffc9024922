#include "hopfmin/mesh.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hopfmin/errors.hpp"
#include "hopfmin/kernels.hpp"

namespace hopfmin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void finish_geometry(PolarMesh& m) {
  const int nt = m.num_triangles();
  m.triangle_area.resize(nt);
  m.hat_gradient.resize(nt);
  m.node_area.assign(m.nodes.size(), 0.0);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = m.triangles[t];
    const Complex p0 = m.nodes[tri[0]];
    const Complex p1 = m.nodes[tri[1]];
    const Complex p2 = m.nodes[tri[2]];
    const Complex e1 = p1 - p0;
    const Complex e2 = p2 - p0;
    const double det = e1.real() * e2.imag() - e1.imag() * e2.real();
    const double scale = std::norm(e1) + std::norm(e2);
    if (!(det > 1e-14 * scale)) {
      std::ostringstream os;
      os << "degenerate or clockwise triangle " << t << " (signed double area " << det << ")";
      throw MeshError(os.str());
    }
    m.triangle_area[t] = 0.5 * det;
    // grad of the hat function at vertex a is rot90(opposite edge) / det
    std::array<double, 6> g{};
    for (int a = 0; a < 3; ++a) {
      const Complex pb = m.nodes[tri[(a + 1) % 3]];
      const Complex pc = m.nodes[tri[(a + 2) % 3]];
      const Complex edge = pc - pb;
      g[2 * a] = -edge.imag() / det;
      g[2 * a + 1] = edge.real() / det;
    }
    m.hat_gradient[t] = g;
    for (int a = 0; a < 3; ++a) m.node_area[tri[a]] += m.triangle_area[t] / 3.0;
  }
}

std::vector<double> unwrap_cycle(const std::vector<double>& raw, double period) {
  std::vector<double> out(raw.size());
  if (raw.empty()) return out;
  out[0] = raw[0];
  for (std::size_t k = 1; k < raw.size(); ++k) {
    double step = raw[k] - raw[k - 1];
    step -= period * std::round(step / period);
    out[k] = out[k - 1] + step;
  }
  return out;
}

}  // namespace

double PolarMesh::ring_radius(int ring) const { return std::abs(nodes[node(ring, 0)]); }

int PolarMesh::rotated(int n, int shift) const {
  const int ring = ring_index[n];
  int ray = (ray_index[n] + shift) % n_theta;
  if (ray < 0) ray += n_theta;
  return node(ring, ray);
}

MeshPtr build_mesh(const DomainSpec& d, int n_r, int n_theta) {
  d.validate();
  if (n_r < 2 || n_theta < 8 || n_theta % 2 != 0) {
    std::ostringstream os;
    os << "mesh needs N_r >= 2 and even N_theta >= 8, got N_r=" << n_r << " N_theta=" << n_theta;
    throw ConfigError(os.str());
  }
  auto m = std::make_shared<PolarMesh>();
  m->domain = d;
  m->n_r = n_r;
  m->n_theta = n_theta;
  const int nn = n_r * n_theta;
  m->nodes.resize(nn);
  m->ray_index.resize(nn);
  m->ring_index.resize(nn);
  m->theta.resize(n_theta);
  for (int j = 0; j < n_theta; ++j) m->theta[j] = kTwoPi * j / n_theta;

  for (int i = 0; i < n_r; ++i) {
    const double t = static_cast<double>(i) / (n_r - 1);
    for (int j = 0; j < n_theta; ++j) {
      const int n = m->node(i, j);
      const double th = m->theta[j];
      Complex p;
      if (d.is_annulus()) {
        const auto& a = d.annulus();
        // last ring pinned to R exactly
        const double rho = (i == n_r - 1) ? a.R : a.r * std::pow(a.R / a.r, t);
        p = std::polar(rho, th);
      } else {
        const Complex inner = diamond_point_on_ray(th);
        const Complex outer = std::polar(d.washer().rho, th);
        p = (1.0 - t) * inner + t * outer;
      }
      m->nodes[n] = p;
      m->ray_index[n] = j;
      m->ring_index[n] = i;
    }
  }
  m->triangles.reserve(static_cast<std::size_t>(2 * (n_r - 1) * n_theta));
  for (int i = 0; i + 1 < n_r; ++i) {
    for (int j = 0; j < n_theta; ++j) {
      const int jn = (j + 1) % n_theta;
      const int a = m->node(i, j);
      const int b = m->node(i + 1, j);
      const int c = m->node(i + 1, jn);
      const int e = m->node(i, jn);
      m->triangles.push_back({a, b, c});
      m->triangles.push_back({a, c, e});
    }
  }
  m->inner_boundary.resize(n_theta);
  m->outer_boundary.resize(n_theta);
  for (int j = 0; j < n_theta; ++j) {
    m->inner_boundary[j] = m->node(0, j);
    m->outer_boundary[j] = m->node(n_r - 1, j);
  }
  finish_geometry(*m);
  return m;
}

const DomainSpec& MapField::target_domain() const {
  if (!target) throw InvalidTargetError("field has no standard target domain");
  return *target;
}

void MapField::sync_boundary_values() {
  if (!target) return;
  for (Boundary b : {Boundary::inner, Boundary::outer}) {
    const auto& cyc = cycle(b);
    const auto& ps = params(b);
    for (std::size_t k = 0; k < cyc.size(); ++k) values[cyc[k]] = boundary_point(*target, b, ps[k]);
  }
}

bool MapField::boundary_monotone(double tol) const {
  if (!target) return true;
  for (Boundary b : {Boundary::inner, Boundary::outer}) {
    const auto& ps = params(b);
    const double period = target->period(b);
    for (std::size_t k = 1; k < ps.size(); ++k)
      if (ps[k] < ps[k - 1] - tol) return false;
    // closing increment from the last node back to the first, one period on
    if (ps.front() + period < ps.back() - tol) return false;
  }
  return true;
}

MapField make_field(MeshPtr mesh, std::optional<DomainSpec> target, std::vector<Complex> values) {
  if (values.size() != mesh->nodes.size()) throw MeshError("field size does not match mesh");
  for (const Complex& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw MeshError("field value is not finite");
  MapField f;
  f.mesh = std::move(mesh);
  f.target = std::move(target);
  f.values = std::move(values);
  if (f.target) {
    f.target->validate();
    for (Boundary b : {Boundary::inner, Boundary::outer}) {
      const auto& cyc = f.cycle(b);
      std::vector<double> raw(cyc.size());
      for (std::size_t k = 0; k < cyc.size(); ++k)
        raw[k] = closest_boundary_point(*f.target, b, f.values[cyc[k]]).s;
      f.params(b) = unwrap_cycle(raw, f.target->period(b));
    }
    f.sync_boundary_values();
  }
  return f;
}

DerivField element_derivatives(const PolarMesh& mesh, std::span<const Complex> values) {
  const int nt = mesh.num_triangles();
  kernels::Gradients g;
  kernels::omp::gradients(mesh, values, g);
  DerivField d;
  d.hz.resize(nt);
  d.hzbar.resize(nt);
  d.hN.resize(nt);
  d.hT.resize(nt);
  d.J.resize(nt);
  d.barycenter.resize(nt);
  d.area = mesh.triangle_area;
  const Complex I{0.0, 1.0};
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a) {
      if (!std::isfinite(values[tri[a]].real()) || !std::isfinite(values[tri[a]].imag()))
        throw MeshError("non-finite field value");
    }
    const Complex c = (mesh.nodes[tri[0]] + mesh.nodes[tri[1]] + mesh.nodes[tri[2]]) / 3.0;
    const Complex hz = 0.5 * (g.dx[t] - I * g.dy[t]);
    const Complex hzb = 0.5 * (g.dx[t] + I * g.dy[t]);
    const Complex e = c / std::abs(c);
    d.hz[t] = hz;
    d.hzbar[t] = hzb;
    d.hN[t] = hz * e + hzb * std::conj(e);
    d.hT[t] = I * (hz * e - hzb * std::conj(e));
    d.J[t] = std::norm(hz) - std::norm(hzb);
    d.barycenter[t] = c;
  }
  return d;
}

DerivField element_derivatives(const MapField& f) { return element_derivatives(*f.mesh, f.values); }

MapField rotate_source(const MapField& f, int shift) {
  const PolarMesh& m = *f.mesh;
  const int nt = m.n_theta;
  shift %= nt;
  if (shift < 0) shift += nt;
  MapField g = f;
  for (int n = 0; n < m.num_nodes(); ++n) g.values[m.rotated(n, shift)] = f.values[n];
  if (f.target) {
    for (Boundary b : {Boundary::inner, Boundary::outer}) {
      const auto& src = f.params(b);
      auto& dst = g.params(b);
      const double period = f.target->period(b);
      for (int k = 0; k < nt; ++k) {
        const int from = k - shift;
        dst[k] = from >= 0 ? src[from] : src[from + nt] - period;
      }
    }
  }
  return g;
}

void to_json(nlohmann::json& j, const MapField& f) {
  const PolarMesh& m = *f.mesh;
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& p : m.nodes) nodes.push_back({p.real(), p.imag()});
  nlohmann::json tris = nlohmann::json::array();
  for (const auto& t : m.triangles) tris.push_back({t[0], t[1], t[2]});
  nlohmann::json vals = nlohmann::json::array();
  for (const auto& v : f.values) vals.push_back({v.real(), v.imag()});
  j = nlohmann::json::object();
  j["source"] = m.domain;
  j["n_r"] = m.n_r;
  j["n_theta"] = m.n_theta;
  j["target"] = f.target ? nlohmann::json(*f.target) : nlohmann::json(nullptr);
  j["nodes"] = std::move(nodes);
  j["triangles"] = std::move(tris);
  j["values"] = std::move(vals);
  j["boundary_param"] = {{"inner", f.inner_param}, {"outer", f.outer_param}};
}

MapField field_from_json(const nlohmann::json& j) {
  try {
    const auto source = j.at("source").get<DomainSpec>();
    auto mesh = build_mesh(source, j.at("n_r").get<int>(), j.at("n_theta").get<int>());
    const auto& vals = j.at("values");
    if (vals.size() != mesh->nodes.size()) throw MeshError("values do not match mesh size");
    MapField f;
    f.mesh = mesh;
    if (!j.at("target").is_null()) f.target = j.at("target").get<DomainSpec>();
    f.values.resize(vals.size());
    for (std::size_t n = 0; n < vals.size(); ++n)
      f.values[n] = Complex{vals[n].at(0).get<double>(), vals[n].at(1).get<double>()};
    const auto& bp = j.at("boundary_param");
    f.inner_param = bp.at("inner").get<std::vector<double>>();
    f.outer_param = bp.at("outer").get<std::vector<double>>();
    if (f.target && (f.inner_param.size() != mesh->inner_boundary.size() ||
                     f.outer_param.size() != mesh->outer_boundary.size()))
      throw MeshError("boundary_param does not match mesh");
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed field JSON: ") + e.what());
  }
}

void write_field_csv(const MapField& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path);
  os.precision(17);
  os << "x,y,u,v\n";
  for (int n = 0; n < f.mesh->num_nodes(); ++n) {
    const Complex p = f.mesh->nodes[n];
    os << p.real() << ',' << p.imag() << ',' << f.values[n].real() << ',' << f.values[n].imag()
       << '\n';
  }
}

void write_derivatives_csv(const DerivField& d, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path);
  os.precision(17);
  os << "cx,cy,hz_re,hz_im,hzbar_re,hzbar_im,J\n";
  for (int t = 0; t < d.size(); ++t) {
    os << d.barycenter[t].real() << ',' << d.barycenter[t].imag() << ',' << d.hz[t].real() << ','
       << d.hz[t].imag() << ',' << d.hzbar[t].real() << ',' << d.hzbar[t].imag() << ',' << d.J[t]
       << '\n';
  }
}

}  // namespace hopfmin
