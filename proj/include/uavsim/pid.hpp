#pragma once

#include <cmath>

namespace uavsim::nav {

/// Per-axis PID gains with anti-windup and output saturation limits.
struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double integrator_limit = 10.0;  // clamp on the accumulated error integral
  double output_limit = 10.0;

  void validate() const;
};

/// Controller memory for one axis. previous_time is NaN until the first
/// call; the derivative term is zero on that call.
struct PidState {
  double integrator = 0.0;
  double previous_error = 0.0;
  double previous_time = std::numeric_limits<double>::quiet_NaN();

  void reset() { *this = PidState{}; }
};

/// One PID update. Integrates with the trapezoid-free backward rule,
/// clamps the integrator (anti-windup) and the output. Throws
/// ValidationError when time does not advance between calls.
double pid_step(const PidGains& gains, PidState& state, double error,
                double time_s);

}  // namespace uavsim::nav
