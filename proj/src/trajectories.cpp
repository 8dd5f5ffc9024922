#include "hopfmin/trajectories.hpp"

#include <cmath>
#include <fstream>

#include "hopfmin/errors.hpp"

namespace hopfmin {

namespace {

constexpr double kPhiZero = 1e-14;
constexpr int kMinLoopSteps = 10;

bool inside(const AnnulusSpec& a, Complex z) {
  const double m = std::abs(z);
  return m > a.r && m < a.R;
}

}  // namespace

Complex trajectory_direction(const QuadDifferential& q, Complex z, TrajectoryKind kind,
                             Complex previous) {
  const Complex phi = q(z);
  if (std::abs(phi) < kPhiZero) throw UndefinedDirectionError("phi vanishes at the trace point");
  Complex v = 1.0 / std::sqrt(phi);
  if (kind == TrajectoryKind::vertical) v *= Complex{0.0, 1.0};
  v /= std::abs(v);
  if (std::real(v * std::conj(previous)) < 0.0) v = -v;
  return v;
}

Trajectory trace_trajectory(const QuadDifferential& q, Complex z0, TrajectoryKind kind,
                            const TraceOptions& opt, const AnnulusSpec& domain) {
  domain.validate();
  if (!(opt.step > 0.0) || !(opt.max_len > 0.0))
    throw ConfigError("trace step and max_len must be positive");
  if (!inside(domain, z0)) throw ConfigError("trace start point lies outside the annulus");
  if (std::abs(q(z0)) < kPhiZero) throw UndefinedDirectionError("trace starts at a zero of phi");

  Trajectory tr;
  tr.kind = kind;
  Complex dir = trajectory_direction(q, z0, kind, Complex{1.0, 0.0});
  // the reference branch for initial_branch = +1 is the one with nonnegative real part
  if (dir.real() < 0.0 || (dir.real() == 0.0 && dir.imag() < 0.0)) dir = -dir;
  if (opt.initial_branch < 0) dir = -dir;
  const Complex dir0 = dir;

  tr.points.push_back(z0);
  tr.arclength.push_back(0.0);
  Complex z = z0;
  double s = 0.0;
  const double h = opt.step;
  auto field = [&](Complex p, Complex prev) { return trajectory_direction(q, p, kind, prev); };

  while (true) {
    if (s >= opt.max_len) {
      tr.terminated_reason = Termination::max_length;
      break;
    }
    Complex k1, k2, k3, k4;
    try {
      k1 = field(z, dir);
      k2 = field(z + 0.5 * h * k1, k1);
      k3 = field(z + 0.5 * h * k2, k2);
      k4 = field(z + h * k3, k3);
    } catch (const UndefinedDirectionError&) {
      tr.terminated_reason = Termination::zero_of_phi;
      break;
    }
    const Complex next = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!inside(domain, next)) {
      // bisect the step fraction to land on the boundary circle
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (inside(domain, z + mid * (next - z))) lo = mid;
        else hi = mid;
      }
      Complex b = z + hi * (next - z);
      const double radius = std::abs(b) < std::sqrt(domain.r * domain.R) ? domain.r : domain.R;
      b *= radius / std::abs(b);
      s += std::abs(b - z);
      tr.points.push_back(b);
      tr.arclength.push_back(s);
      tr.terminated_reason = Termination::boundary;
      break;
    }
    dir = field(next, k4);
    s += std::abs(next - z);
    z = next;
    tr.points.push_back(z);
    tr.arclength.push_back(s);
    const int steps = static_cast<int>(tr.points.size()) - 1;
    if (steps >= kMinLoopSteps && std::abs(z - z0) < h && std::real(dir * std::conj(dir0)) > 0.0) {
      tr.closed = true;
      tr.terminated_reason = Termination::closed_loop;
      break;
    }
  }
  return tr;
}

TrajectoryKind parse_trajectory_kind(const std::string& s) {
  if (s == "horizontal") return TrajectoryKind::horizontal;
  if (s == "vertical") return TrajectoryKind::vertical;
  throw ConfigError("trajectory kind must be horizontal or vertical, got '" + s + "'");
}

const char* to_string(TrajectoryKind k) {
  return k == TrajectoryKind::horizontal ? "horizontal" : "vertical";
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::boundary: return "boundary";
    case Termination::closed_loop: return "closed_loop";
    case Termination::zero_of_phi: return "zero_of_phi";
    case Termination::max_length: return "max_length";
  }
  return "max_length";
}

void to_json(nlohmann::json& j, const Trajectory& t) {
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t k = 0; k < t.points.size(); ++k)
    pts.push_back({t.points[k].real(), t.points[k].imag(), t.arclength[k]});
  j = {{"kind", to_string(t.kind)},
       {"closed", t.closed},
       {"terminated_reason", to_string(t.terminated_reason)},
       {"points", pts}};
}

void write_trajectory_csv(const Trajectory& t, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path);
  os.precision(17);
  os << "x,y,s\n";
  for (std::size_t k = 0; k < t.points.size(); ++k)
    os << t.points[k].real() << ',' << t.points[k].imag() << ',' << t.arclength[k] << '\n';
}

}  // namespace hopfmin
