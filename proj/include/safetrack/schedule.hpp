#pragma once

#include <safetrack/types.hpp>

#include <vector>

namespace safetrack {

/// Dense multi-agent trajectory on a uniform time grid: positions and
/// velocities interpolate linearly, inputs are zero-order hold, target
/// accelerations interpolate linearly.
struct TrajectorySchedule {
  Scalar t0 = 0.0;
  Scalar dt = 0.0;
  int n_agents = 0;
  // [agent][knot]
  std::vector<std::vector<Vector>> p, v, u, a;
  Scalar predicted_cost = 0.0;

  struct Point {
    Vector p, v, u, a;
  };

  int knots() const { return n_agents == 0 ? 0 : static_cast<int>(p[0].size()); }
  Scalar end_time() const { return t0 + dt * (knots() - 1); }

  /// Clamped interpolation.
  Point at(int agent, Scalar t) const;

  /// Like at(), but raises beyond one grid step outside the stored domain.
  Point checked_at(int agent, Scalar t) const;
};

}  // namespace safetrack
