#include "uavsim/pid.hpp"

#include <algorithm>
#include <limits>

#include "uavsim/errors.hpp"

namespace uavsim::nav {

void PidGains::validate() const {
  if (kp < 0.0 || ki < 0.0 || kd < 0.0) {
    throw ValidationError("PidGains: gains must be >= 0");
  }
  if (integrator_limit <= 0.0 || output_limit <= 0.0) {
    throw ValidationError("PidGains: limits must be > 0");
  }
}

double pid_step(const PidGains& gains, PidState& state, double error,
                double time_s) {
  gains.validate();
  if (!std::isfinite(error) || !std::isfinite(time_s)) {
    throw ValidationError("pid_step: non-finite input");
  }

  double derivative = 0.0;
  if (!std::isnan(state.previous_time)) {
    const double dt = time_s - state.previous_time;
    if (dt <= 0.0) {
      throw ValidationError("pid_step: time must be strictly increasing");
    }
    state.integrator += error * dt;
    state.integrator = std::clamp(state.integrator, -gains.integrator_limit,
                                  gains.integrator_limit);
    derivative = (error - state.previous_error) / dt;
  }
  state.previous_error = error;
  state.previous_time = time_s;

  const double raw =
      gains.kp * error + gains.ki * state.integrator + gains.kd * derivative;
  return std::clamp(raw, -gains.output_limit, gains.output_limit);
}

}  // namespace uavsim::nav
