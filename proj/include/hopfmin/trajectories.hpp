#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hopfmin/domain.hpp"
#include "hopfmin/hopf.hpp"

namespace hopfmin {

enum class TrajectoryKind { horizontal, vertical };
enum class Termination { boundary, closed_loop, zero_of_phi, max_length };

struct Trajectory {
  std::vector<Complex> points;
  std::vector<double> arclength;
  TrajectoryKind kind = TrajectoryKind::vertical;
  bool closed = false;
  Termination terminated_reason = Termination::max_length;
};

struct TraceOptions {
  double step = 1e-2;
  double max_len = 100.0;
  /// +1 or -1: which of the two square-root branches starts the trace.
  int initial_branch = 1;
};

/// Unit tangent of the trajectory family at z: phi * v^2 > 0 (horizontal) or
/// < 0 (vertical). The branch is the one closest in angle to `previous`.
[[nodiscard]] Complex trajectory_direction(const QuadDifferential& q, Complex z,
                                           TrajectoryKind kind, Complex previous);

/// Fourth-order Runge-Kutta in arclength. Stops at the annulus boundary
/// (the last point is placed on it), on return to the step ball around z0
/// after at least ten steps, where |phi| < 1e-14, or at max_len.
[[nodiscard]] Trajectory trace_trajectory(const QuadDifferential& q, Complex z0, TrajectoryKind kind,
                                          const TraceOptions& opt, const AnnulusSpec& domain);

[[nodiscard]] TrajectoryKind parse_trajectory_kind(const std::string& s);
[[nodiscard]] const char* to_string(TrajectoryKind k);
[[nodiscard]] const char* to_string(Termination t);
void to_json(nlohmann::json& j, const Trajectory& t);
/// Columns x, y, s.
void write_trajectory_csv(const Trajectory& t, const std::string& path);

}  // namespace hopfmin
