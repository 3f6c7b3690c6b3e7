#pragma once

#include "monodromy/paths.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace monodromy {

using State = std::vector<Complex>;

/// Right-hand side of dy/dt = f(z(t), z'(t), y) along a path segment.
using PathRhs = std::function<void(const Point& z, const Point& velocity, const State& y, State& dy)>;

struct IntegrationOptions {
  /// Budget for the accumulated local error estimate over the whole path,
  /// measured relative to max(1, ‖y‖_∞).
  double tol = 1e-10;
  /// Paths closer than this to the divisor are rejected outright.
  double contact_tol = 1e-10;
  double min_step = 1e-13;
  long max_steps = 5'000'000;
  /// A step may cover at most this fraction of (distance to divisor)/(speed).
  double divisor_step_fraction = 0.5;
};

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  double error_estimate = 0.0;
  double closest_approach = std::numeric_limits<double>::infinity();
};

/// Adaptive embedded Dormand-Prince 5(4) integration of a path-driven
/// ODE over every segment in order, segment parameter t ∈ [0, 1].
State integrate_along(const PiecewisePath& path, const Divisor& divisor, const PathRhs& rhs, State y0,
                      const IntegrationOptions& options, IntegrationStats* stats = nullptr);

}  // namespace monodromy
