#include "hopfmin/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "hopfmin/errors.hpp"
#include "hopfmin/kernels.hpp"
#include "hopfmin/stiffness.hpp"

namespace hopfmin {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// x* = -(sum_{j != i} K_ij x_j) / K_ii, the unconstrained minimizer of E in x_i.
Complex relaxed_value(const kernels::Csr& K, std::span<const Complex> x, int i) {
  Complex acc{0.0, 0.0};
  for (int k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k)
    if (K.col[k] != i) acc += K.val[k] * x[K.col[k]];
  return -acc / K.val[K.diag[i]];
}

// Projection onto the closed target in which points of the target closer than
// 1e-12 diam to its boundary also count as contact (and are left in place).
// Contact status then does not flip on rounding noise.
ClosureProjection project_with_band(const DomainSpec& d, Complex p) {
  ClosureProjection pr = project_to_closure(d, p);
  if (pr.hit) return pr;
  const double band = 1e-12 * d.diameter();
  // cheap lower bounds on the distance to each component screen out most points
  const double inner_lb = d.is_annulus() ? std::abs(p) - d.annulus().r
                                         : (std::abs(p.real()) + std::abs(p.imag()) - 1.0) / std::sqrt(2.0);
  if (inner_lb < band && distance_to_boundary(d, Boundary::inner, p) < band) pr.hit = Boundary::inner;
  else if (d.outer_radius() - std::abs(p) < band) pr.hit = Boundary::outer;
  return pr;
}

// Pool adjacent violators on a chain with unit weights.
void pav(std::vector<double>& u) {
  const std::size_t n = u.size();
  std::vector<double> mean;
  std::vector<std::size_t> count;
  mean.reserve(n);
  count.reserve(n);
  for (double v : u) {
    mean.push_back(v);
    count.push_back(1);
    while (mean.size() > 1 && mean[mean.size() - 2] > mean.back()) {
      const std::size_t c = count[count.size() - 2] + count.back();
      const double m =
          (mean[mean.size() - 2] * static_cast<double>(count[count.size() - 2]) +
           mean.back() * static_cast<double>(count.back())) /
          static_cast<double>(c);
      mean.pop_back();
      count.pop_back();
      mean.back() = m;
      count.back() = c;
    }
  }
  std::size_t k = 0;
  for (std::size_t b = 0; b < mean.size(); ++b)
    for (std::size_t c = 0; c < count[b]; ++c) u[k++] = mean[b];
}

bool cyclic_monotone(const std::vector<double>& s, double period) {
  for (std::size_t k = 1; k < s.size(); ++k)
    if (s[k] < s[k - 1]) return false;
  return s.back() <= s.front() + period;
}

enum class NodeKind : std::uint8_t { free, boundary, contact };

struct BoundarySlot {
  Boundary b = Boundary::inner;
  int k = -1;
};

// Mutable solver state around one field. Interior nodes are either free
// (solved exactly by the cached factorization) or in contact with the target
// boundary; boundary nodes slide along their curve.
class Engine {
 public:
  Engine(MapField f, const Stiffness& st, bool project_interior = true)
      : f_(std::move(f)), m_(*f_.mesh), st_(st), target_(f_.target_domain()) {
    const int n = m_.num_nodes();
    kind_.assign(n, NodeKind::free);
    slot_.assign(n, BoundarySlot{});
    for (Boundary b : {Boundary::inner, Boundary::outer}) {
      const auto& cyc = f_.cycle(b);
      for (int k = 0; k < static_cast<int>(cyc.size()); ++k) {
        kind_[cyc[k]] = NodeKind::boundary;
        slot_[cyc[k]] = {b, k};
      }
    }
    for (int i = 0; i < n; ++i) {
      if (kind_[i] == NodeKind::boundary || !project_interior) continue;
      const auto p = project_to_closure(target_, f_.values[i]);
      if (p.hit) {
        f_.values[i] = p.point;
        kind_[i] = NodeKind::contact;
      }
    }
    energy_ = energy_of(f_.values);
    // Gauss-Seidel order. With n_theta divisible by 4 the four quarter-turn
    // images of a node are visited consecutively, so a sweep maps
    // quarter-symmetric states to quarter-symmetric states.
    order_.reserve(static_cast<std::size_t>(n));
    const int q = m_.n_theta % 4 == 0 ? m_.n_theta / 4 : m_.n_theta;
    const int copies = m_.n_theta / q;
    for (int r = 0; r < m_.n_r; ++r)
      for (int jj = 0; jj < q; ++jj)
        for (int c = 0; c < copies; ++c) order_.push_back(m_.node(r, jj + c * q));
  }

  [[nodiscard]] double energy() const { return energy_; }
  [[nodiscard]] const MapField& field() const { return f_; }
  [[nodiscard]] MapField& field() { return f_; }
  [[nodiscard]] int refactorizations() const { return refactor_count_; }

  [[nodiscard]] double energy_of(std::span<const Complex> x) const {
    return kernels::dirichlet_energy(m_, x);
  }

  // Exact solve over the free nodes, then projection of violators onto the
  // target, with step halving until the energy does not increase.
  double interior_step() {
    if (!factored_) factor();
    if (free_.empty()) return 0.0;
    const int nf = static_cast<int>(free_.size());
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nf, 2);
    const auto& K = st_.csr;
    for (int a = 0; a < nf; ++a) {
      const int i = free_[a];
      Complex acc{0.0, 0.0};
      for (int k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k) {
        const int j = K.col[k];
        if (kind_[j] != NodeKind::free) acc += K.val[k] * f_.values[j];
      }
      rhs(a, 0) = -acc.real();
      rhs(a, 1) = -acc.imag();
    }
    const Eigen::MatrixXd sol = ldlt_.solve(rhs);
    if (ldlt_.info() != Eigen::Success) throw NumericError("interior solve failed", 0.0);

    std::vector<Complex> cand = f_.values;
    std::vector<int> hits;
    for (double t = 1.0; t >= 0.125; t *= 0.5) {
      hits.clear();
      double moved = 0.0;
      for (int a = 0; a < nf; ++a) {
        const int i = free_[a];
        const Complex target{sol(a, 0), sol(a, 1)};
        Complex v = f_.values[i] + t * (target - f_.values[i]);
        const auto p = project_with_band(target_, v);
        if (p.hit) {
          v = p.point;
          hits.push_back(i);
        }
        moved = std::max(moved, std::abs(v - f_.values[i]));
        cand[i] = v;
      }
      const double e = energy_of(cand);
      if (e <= energy_) {
        f_.values.swap(cand);
        energy_ = e;
        for (int i : hits) kind_[i] = NodeKind::contact;
        if (!hits.empty()) factored_ = false;
        return moved;
      }
    }
    // fallback: projected Gauss-Seidel over the interior, monotone by construction
    return sweep(/*interior=*/true, /*curve=*/false);
  }

  // Projected Gauss-Seidel over the selected node classes. Each update is the
  // exact minimizer of the energy in that node over its admissible set.
  double sweep(bool interior, bool curve) {
    const auto& K = st_.csr;
    double moved = 0.0;
    for (int i : order_) {
      const NodeKind k = kind_[i];
      if (k == NodeKind::boundary) {
        if (!curve) continue;
        const auto& sl = slot_[i];
        auto& ps = f_.params(sl.b);
        const int n = static_cast<int>(ps.size());
        const double period = target_.period(sl.b);
        const double lo = sl.k > 0 ? ps[sl.k - 1] : ps[n - 1] - period;
        const double hi = sl.k + 1 < n ? ps[sl.k + 1] : ps[0] + period;
        const Complex xs = relaxed_value(K, f_.values, i);
        const auto cp = closest_boundary_point(target_, sl.b, xs, lo, hi);
        moved = std::max(moved, std::abs(cp.point - f_.values[i]));
        ps[sl.k] = cp.s;
        f_.values[i] = cp.point;
      } else {
        if (k == NodeKind::free && !interior) continue;
        if (k == NodeKind::contact && !(interior || curve)) continue;
        const Complex xs = relaxed_value(K, f_.values, i);
        const auto p = project_with_band(target_, xs);
        const NodeKind nk = p.hit ? NodeKind::contact : NodeKind::free;
        if (nk != k) {
          kind_[i] = nk;
          factored_ = false;
        }
        moved = std::max(moved, std::abs(p.point - f_.values[i]));
        f_.values[i] = p.point;
      }
    }
    energy_ = energy_of(f_.values);
    return moved;
  }

  // Diagonally scaled gradient step on the boundary parameters with
  // backtracking and isotonic projection.
  double descent(double step) {
    const auto& K = st_.csr;
    std::vector<Complex> Kx(m_.num_nodes());
    kernels::omp::csr_multiply(K, f_.values, Kx);
    struct Dir {
      std::vector<double> inner, outer;
    } dir;
    for (Boundary b : {Boundary::inner, Boundary::outer}) {
      const auto& cyc = f_.cycle(b);
      const auto& ps = f_.params(b);
      auto& d = b == Boundary::inner ? dir.inner : dir.outer;
      d.resize(cyc.size());
      for (std::size_t k = 0; k < cyc.size(); ++k) {
        const int i = cyc[k];
        const Complex tan = boundary_tangent(target_, b, ps[k]);
        const double g = 2.0 * std::real(std::conj(Kx[i]) * tan);
        d[k] = -g / (2.0 * K.val[K.diag[i]] * std::norm(tan));
      }
    }
    const std::vector<double> s_in = f_.inner_param;
    const std::vector<double> s_out = f_.outer_param;
    const std::vector<Complex> x0 = f_.values;
    for (double tau = step; tau > step * 1e-6; tau *= 0.5) {
      for (Boundary b : {Boundary::inner, Boundary::outer}) {
        auto& ps = f_.params(b);
        const auto& base = b == Boundary::inner ? s_in : s_out;
        const auto& d = b == Boundary::inner ? dir.inner : dir.outer;
        for (std::size_t k = 0; k < ps.size(); ++k) ps[k] = base[k] + tau * d[k];
        isotonic_project(ps, target_.period(b));
      }
      f_.sync_boundary_values();
      const double e = energy_of(f_.values);
      if (e <= energy_) {
        double moved = 0.0;
        for (std::size_t i = 0; i < x0.size(); ++i) moved = std::max(moved, std::abs(f_.values[i] - x0[i]));
        energy_ = e;
        return moved;
      }
    }
    f_.inner_param = s_in;
    f_.outer_param = s_out;
    f_.values = x0;
    return 0.0;
  }

 private:
  void factor() {
    free_.clear();
    local_.assign(m_.num_nodes(), -1);
    for (int i = 0; i < m_.num_nodes(); ++i)
      if (kind_[i] == NodeKind::free) {
        local_[i] = static_cast<int>(free_.size());
        free_.push_back(i);
      }
    const auto& K = st_.csr;
    std::vector<Eigen::Triplet<double>> trip;
    for (int i : free_)
      for (int k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k)
        if (local_[K.col[k]] >= 0) trip.emplace_back(local_[i], local_[K.col[k]], K.val[k]);
    SpMat A(static_cast<int>(free_.size()), static_cast<int>(free_.size()));
    A.setFromTriplets(trip.begin(), trip.end());
    if (!free_.empty()) {
      if (!pattern_ready_ || free_.size() != last_free_size_) {
        ldlt_.analyzePattern(A);
        pattern_ready_ = true;
      }
      ldlt_.factorize(A);
      if (ldlt_.info() != Eigen::Success)
        throw NumericError("interior stiffness factorization failed", 0.0);
    }
    last_free_size_ = free_.size();
    pattern_ready_ = false;  // contact changes alter the pattern; re-analyse next time
    factored_ = true;
    ++refactor_count_;
  }

  MapField f_;
  const PolarMesh& m_;
  const Stiffness& st_;
  DomainSpec target_;
  std::vector<NodeKind> kind_;
  std::vector<BoundarySlot> slot_;
  std::vector<int> order_;
  std::vector<int> free_;
  std::vector<int> local_;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  bool factored_ = false;
  bool pattern_ready_ = false;
  std::size_t last_free_size_ = 0;
  int refactor_count_ = 0;
  double energy_ = 0.0;
};

SolveResult run_engine(MapField init, const Stiffness& st, const SolverConfig& cfg) {
  Engine eng(std::move(init), st);
  SolveResult res;
  res.energy_history.push_back(eng.energy());
  const int window = cfg.stagnation_window;
  for (int it = 0; it < cfg.max_outer_iters; ++it) {
    const double d_int = eng.interior_step();
    const double d_desc = eng.descent(cfg.boundary_step);
    const double d_pgs = eng.sweep(/*interior=*/false, /*curve=*/true);
    res.outer_iters = it + 1;
    res.energy_history.push_back(eng.energy());
    const auto& h = res.energy_history;
    const double e = h.back();
    const double scale = eng.field().mesh->domain.diameter();
    const bool still = std::max({d_int, d_desc, d_pgs}) < cfg.grad_tol * scale;
    const bool flat = static_cast<int>(h.size()) > window &&
                      h[h.size() - 1 - window] - e <= cfg.energy_rel_tol * std::abs(e);
    if (still || flat) {
      res.converged = true;
      break;
    }
  }
  res.field = eng.field();
  return res;
}

}  // namespace

void SolverConfig::validate() const {
  if (max_outer_iters <= 0) throw ConfigError("max_outer_iters must be positive");
  if (!(boundary_step > 0.0)) throw ConfigError("boundary_step must be positive");
  if (!(energy_rel_tol > 0.0)) throw ConfigError("energy_rel_tol must be positive");
  if (!(grad_tol > 0.0)) throw ConfigError("grad_tol must be positive");
  if (stagnation_window <= 0) throw ConfigError("stagnation_window must be positive");
}

void to_json(nlohmann::json& j, const SolverConfig& c) {
  j = {{"max_outer_iters", c.max_outer_iters}, {"boundary_step", c.boundary_step},
       {"energy_rel_tol", c.energy_rel_tol},   {"grad_tol", c.grad_tol},
       {"stagnation_window", c.stagnation_window}, {"seed", c.seed},
       {"restart", c.restart}};
}

void from_json(const nlohmann::json& j, SolverConfig& c) {
  if (!j.is_object()) throw ConfigError("solver config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "max_outer_iters") c.max_outer_iters = v.get<int>();
      else if (key == "boundary_step") c.boundary_step = v.get<double>();
      else if (key == "energy_rel_tol") c.energy_rel_tol = v.get<double>();
      else if (key == "grad_tol") c.grad_tol = v.get<double>();
      else if (key == "stagnation_window") c.stagnation_window = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "restart") c.restart = v.get<bool>();
      else throw ConfigError("unknown solver config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad solver config value: ") + e.what());
  }
  c.validate();
}

MapField initial_map(MeshPtr mesh, const DomainSpec& target) {
  target.validate();
  const PolarMesh& m = *mesh;
  std::vector<Complex> values(m.nodes.size());
  for (int n = 0; n < m.num_nodes(); ++n) {
    const double t = static_cast<double>(m.ring_index[n]) / (m.n_r - 1);
    const double th = m.theta[m.ray_index[n]];
    if (target.is_annulus()) {
      const auto& a = target.annulus();
      const double rho = (m.ring_index[n] == m.n_r - 1) ? a.R : a.r * std::pow(a.R / a.r, t);
      values[n] = std::polar(rho, th);
    } else {
      values[n] = (1.0 - t) * diamond_point_on_ray(th) + t * std::polar(target.washer().rho, th);
    }
  }
  return make_field(std::move(mesh), target, std::move(values));
}

MapField harmonic_replace(const MapField& f, const std::vector<int>& region) {
  const PolarMesh& m = *f.mesh;
  const Stiffness st = assemble_stiffness(m);
  const auto& K = st.csr;
  std::vector<int> local(m.num_nodes(), -1);
  for (int a = 0; a < static_cast<int>(region.size()); ++a) {
    const int i = region[a];
    if (i < 0 || i >= m.num_nodes() || m.is_boundary(i))
      throw ConfigError("harmonic replacement region must consist of interior nodes");
    if (local[i] >= 0) throw ConfigError("harmonic replacement region has duplicate nodes");
    local[i] = a;
  }
  const int nr = static_cast<int>(region.size());
  MapField g = f;
  if (nr == 0) return g;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nr, 2);
  for (int a = 0; a < nr; ++a) {
    const int i = region[a];
    for (int k = K.row_ptr[i]; k < K.row_ptr[i + 1]; ++k) {
      const int j = K.col[k];
      if (local[j] >= 0) {
        trip.emplace_back(a, local[j], K.val[k]);
      } else {
        rhs(a, 0) -= K.val[k] * f.values[j].real();
        rhs(a, 1) -= K.val[k] * f.values[j].imag();
      }
    }
  }
  SpMat A(nr, nr);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SpMat> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw NumericError("harmonic replacement system is singular", 0.0);
  const Eigen::MatrixXd sol = ldlt.solve(rhs);
  const Eigen::MatrixXd resid = A * sol - rhs;
  const double rn = resid.norm();
  if (!std::isfinite(rn) || rn > 1e-8 * (1.0 + rhs.norm()))
    throw NumericError("harmonic replacement system is singular", rn);
  for (int a = 0; a < nr; ++a) g.values[region[a]] = Complex{sol(a, 0), sol(a, 1)};
  return g;
}

double BoundaryGradient::max_abs() const {
  double m = 0.0;
  for (double v : inner) m = std::max(m, std::abs(v));
  for (double v : outer) m = std::max(m, std::abs(v));
  return m;
}

BoundaryGradient boundary_gradient(const MapField& f) {
  const PolarMesh& m = *f.mesh;
  const Stiffness st = assemble_stiffness(m);
  std::vector<Complex> Kx(m.num_nodes());
  kernels::serial::csr_multiply(st.csr, f.values, Kx);
  BoundaryGradient g;
  const auto& target = f.target_domain();
  for (Boundary b : {Boundary::inner, Boundary::outer}) {
    const auto& cyc = f.cycle(b);
    const auto& ps = f.params(b);
    auto& out = b == Boundary::inner ? g.inner : g.outer;
    out.resize(cyc.size());
    for (std::size_t k = 0; k < cyc.size(); ++k)
      out[k] = 2.0 * std::real(std::conj(Kx[cyc[k]]) * boundary_tangent(target, b, ps[k]));
  }
  return g;
}

MapField boundary_descent_step(const MapField& f, double step) {
  if (!(step > 0.0)) throw ConfigError("boundary step must be positive");
  const Stiffness st = assemble_stiffness(*f.mesh);
  Engine eng(f, st, /*project_interior=*/false);
  (void)eng.descent(step);
  return eng.field();
}

void isotonic_project(std::vector<double>& s, double period) {
  const std::size_t n = s.size();
  if (n < 2 || cyclic_monotone(s, period)) return;
  std::vector<double> best;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<double> u(n);
  for (std::size_t brk = 0; brk < n; ++brk) {
    // chain s_brk, ..., s_{n-1}, s_0 + P, ..., s_{brk-1} + P
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t idx = (brk + k) % n;
      u[k] = s[idx] + (idx < brk ? period : 0.0);
    }
    pav(u);
    if (u[n - 1] > u[0] + period) continue;  // dropped constraint violated
    double cost = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t idx = (brk + k) % n;
      const double d = u[k] - (s[idx] + (idx < brk ? period : 0.0));
      cost += d * d;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best.assign(n, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t idx = (brk + k) % n;
        best[idx] = u[k] - (idx < brk ? period : 0.0);
      }
    }
  }
  s = best;
  // round-off guard
  for (std::size_t k = 1; k < n; ++k) s[k] = std::max(s[k], s[k - 1]);
}

SolveResult solve_from(MapField init, const SolverConfig& cfg, const CertificateHook& certified) {
  cfg.validate();
  if (!init.target) throw InvalidTargetError("solve needs a target domain");
  const Stiffness st = assemble_stiffness(*init.mesh);
  SolveResult res = run_engine(std::move(init), st, cfg);
  if (cfg.restart && res.converged && certified && !certified(res.field)) {
    MapField pert = res.field;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (Boundary b : {Boundary::inner, Boundary::outer}) {
      auto& ps = pert.params(b);
      const double spacing = pert.target->period(b) / static_cast<double>(ps.size());
      for (double& s : ps) s += spacing * u(rng);
      isotonic_project(ps, pert.target->period(b));
    }
    pert.sync_boundary_values();
    SolveResult again = run_engine(std::move(pert), st, cfg);
    again.restarts = 1;
    if (again.energy_history.back() < res.energy_history.back()) {
      again.outer_iters += res.outer_iters;
      return again;
    }
    res.restarts = 1;
  }
  return res;
}

SolveResult solve(MeshPtr mesh, const DomainSpec& target, const SolverConfig& cfg,
                  const CertificateHook& certified) {
  return solve_from(initial_map(std::move(mesh), target), cfg, certified);
}

nlohmann::json solve_result_json(const SolveResult& r) {
  nlohmann::json j = r.field;
  j["energy_history"] = r.energy_history;
  j["converged"] = r.converged;
  j["outer_iters"] = r.outer_iters;
  j["restarts"] = r.restarts;
  return j;
}

GaugeResult gauge_align(const MapField& f, const MapField& ref) {
  if (f.mesh->n_r != ref.mesh->n_r || f.mesh->n_theta != ref.mesh->n_theta ||
      !(f.mesh->domain == ref.mesh->domain))
    throw MeshError("gauge alignment needs fields on the same mesh");
  const PolarMesh& m = *f.mesh;
  const auto& w = m.node_area;
  const bool continuous = f.target && f.target->is_annulus();
  const bool quarter = f.target && f.target->is_washer();
  double B = 0.0;
  for (int n = 0; n < m.num_nodes(); ++n) B += w[n] * std::norm(ref.values[n]);

  int best_shift = 0;
  double best_phase = 0.0;
  double best_res = std::numeric_limits<double>::infinity();
  const double tie = 1e-12 * (B + 1e-300);
  auto consider = [&](int shift, double phase, double residual) {
    const bool better = residual < best_res - tie;
    const bool tied = std::abs(residual - best_res) <= tie;
    if (better || (tied && std::abs(phase) < std::abs(best_phase))) {
      best_res = std::min(residual, better ? residual : best_res);
      best_shift = shift;
      best_phase = phase;
    }
  };
  for (int shift = 0; shift < m.n_theta; ++shift) {
    double A = 0.0;
    Complex D{0.0, 0.0};  // sum w g conj(ref)
    for (int n = 0; n < m.num_nodes(); ++n) {
      // g(node) = f(node rotated back by shift)
      const Complex g = f.values[m.rotated(n, -shift)];
      A += w[n] * std::norm(g);
      D += w[n] * g * std::conj(ref.values[n]);
    }
    if (continuous) {
      const double phase = std::abs(D) > 0.0 ? -std::arg(D) : 0.0;
      consider(shift, phase, A + B - 2.0 * std::abs(D));
    } else if (quarter) {
      for (int q = -1; q <= 2; ++q) {
        const double phase = q * std::numbers::pi / 2.0;
        consider(shift, phase, A + B - 2.0 * std::real(std::polar(1.0, phase) * D));
      }
    } else {
      consider(shift, 0.0, A + B - 2.0 * std::real(D));
    }
  }
  GaugeResult r;
  r.shift = best_shift;
  r.alpha = kTwoPi * best_shift / m.n_theta;
  r.phase = best_phase;
  r.aligned = rotate_source(f, best_shift);
  const Complex rot = std::polar(1.0, best_phase);
  for (auto& v : r.aligned.values) v *= rot;
  if (r.aligned.target) {
    for (Boundary b : {Boundary::inner, Boundary::outer}) {
      auto& ps = r.aligned.params(b);
      if (r.aligned.target->is_annulus()) {
        for (double& s : ps) s += best_phase;
      } else if (b == Boundary::outer) {
        for (double& s : ps) s += best_phase;
      } else {
        const double quarter_len = r.aligned.target->period(b) / 4.0;
        const int q = static_cast<int>(std::lround(best_phase / (std::numbers::pi / 2.0)));
        for (double& s : ps) s += q * quarter_len;
      }
    }
  }
  double num = 0.0;
  double den = 0.0;
  for (int n = 0; n < m.num_nodes(); ++n) {
    const double d = std::abs(r.aligned.values[n] - ref.values[n]);
    num += w[n] * d * d;
    den += w[n];
    r.linf = std::max(r.linf, d);
  }
  r.l2 = std::sqrt(num / den);
  return r;
}

}  // namespace hopfmin
