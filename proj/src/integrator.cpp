#include "monodromy/integrator.hpp"

#include "monodromy/errors.hpp"

#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace monodromy {
namespace {

double max_abs(const State& y) {
  double m = 0.0;
  for (const auto& c : y) m = std::max(m, std::abs(c));
  return m;
}

// Largest step allowed by the distance to each divisor component.
double divisor_step_cap(const Divisor& divisor, const Point& z, const Point& v, double fraction) {
  double cap = std::numeric_limits<double>::infinity();
  for (const auto& h : divisor.components()) {
    const double rate = std::abs(h.linear(v));
    if (rate > 0.0) cap = std::min(cap, fraction * std::abs(h(z)) / rate);
  }
  return cap;
}

}  // namespace

State integrate_along(const PiecewisePath& path, const Divisor& divisor, const PathRhs& rhs, State y,
                      const IntegrationOptions& options, IntegrationStats* stats) {
  if (!(options.tol > 0.0)) throw InputError("integration tolerance must be positive");
  if (path.dim() != divisor.dim()) throw InputError("integration: path and divisor dimensions differ");

  IntegrationStats local;
  local.closest_approach = min_clearance(path, divisor);
  if (local.closest_approach < options.contact_tol) {
    std::ostringstream msg;
    msg << "path touches the divisor (closest approach " << local.closest_approach << ")";
    throw DivisorContactError(msg.str(), local.closest_approach);
  }

  boost::numeric::odeint::runge_kutta_dopri5<State> stepper;
  const double seg_tol = options.tol / static_cast<double>(path.segments().size());
  State err(y.size());
  State trial(y.size());
  State dydt(y.size());
  State trial_dydt(y.size());

  for (const auto& seg : path.segments()) {
    auto system = [&](const State& x, State& dx, double t) {
      dx.resize(x.size());
      rhs(segment_point(seg, t), segment_velocity(seg, t), x, dx);
    };
    double t = 0.0;
    double h = 1.0 / 64.0;
    system(y, dydt, 0.0);
    while (t < 1.0) {
      const Point z = segment_point(seg, t);
      const Point v = segment_velocity(seg, t);
      const double cap = divisor_step_cap(divisor, z, v, options.divisor_step_fraction);
      h = std::min({h, cap, 1.0 - t});
      if (h < options.min_step) {
        std::ostringstream msg;
        msg << "step size underflow at t=" << t << " (closest approach to divisor "
            << local.closest_approach << ")";
        throw StepUnderflowError(msg.str(), local.closest_approach);
      }
      if (local.accepted + local.rejected >= options.max_steps) {
        throw NumericalError("integration exceeded the step budget");
      }

      stepper.do_step(system, y, dydt, t, trial, trial_dydt, h, err);
      const double scale = std::max(1.0, max_abs(trial));
      const double e = max_abs(err) / scale;
      const double allowed = seg_tol * h;

      if (!std::isfinite(e)) throw NumericalError("integration produced non-finite values");
      double factor = e > 0.0 ? 0.9 * std::pow(allowed / e, 1.0 / 5.0) : 4.0;
      factor = std::clamp(factor, 0.2, 4.0);
      if (e <= allowed) {
        y.swap(trial);
        dydt.swap(trial_dydt);
        t = (1.0 - t <= h) ? 1.0 : t + h;
        local.error_estimate += e;
        ++local.accepted;
        local.closest_approach = std::min(local.closest_approach, divisor.distance(segment_point(seg, t)));
      } else {
        ++local.rejected;
      }
      h *= factor;
    }
  }
  if (stats) *stats = local;
  return y;
}

}  // namespace monodromy
