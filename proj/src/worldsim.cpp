#include "uavsim/worldsim.hpp"

#include <algorithm>
#include <cmath>

#include "uavsim/errors.hpp"

namespace uavsim::sim {

void WorldConfig::validate() const {
  if (!(timestep_s > 0.0 && timestep_s <= 0.1)) {
    throw ValidationError("WorldConfig: timestep_s must be in (0, 0.1]");
  }
  if (max_horizontal_speed_ms <= 0.0 || max_vertical_speed_ms <= 0.0) {
    throw ValidationError("WorldConfig: speed limits must be > 0");
  }
  if (velocity_time_constant_s <= 0.0) {
    throw ValidationError("WorldConfig: velocity_time_constant_s must be > 0");
  }
  if (wind.gust_std_ms < 0.0) {
    throw ValidationError("WorldConfig: gust_std_ms must be >= 0");
  }
}

UavState step(const UavState& state, const VelocityCommand& cmd,
              const WorldConfig& config, RandomStream& noise) {
  config.validate();
  const bool finite =
      std::isfinite(state.position.east_m) &&
      std::isfinite(state.position.north_m) &&
      std::isfinite(state.position.up_m) && std::isfinite(state.vel_east_ms) &&
      std::isfinite(state.vel_north_ms) && std::isfinite(state.vel_up_ms) &&
      std::isfinite(cmd.east_ms) && std::isfinite(cmd.north_ms) &&
      std::isfinite(cmd.up_ms);
  if (!finite) {
    throw ValidationError("step: non-finite state or command");
  }

  // Clamp the commanded horizontal speed (direction preserved) and the
  // vertical rate.
  double ce = cmd.east_ms;
  double cn = cmd.north_ms;
  const double h = std::hypot(ce, cn);
  if (h > config.max_horizontal_speed_ms) {
    const double k = config.max_horizontal_speed_ms / h;
    ce *= k;
    cn *= k;
  }
  const double cu = std::clamp(cmd.up_ms, -config.max_vertical_speed_ms,
                               config.max_vertical_speed_ms);

  double we = config.wind.mean_east_ms;
  double wn = config.wind.mean_north_ms;
  if (config.wind.gust_std_ms > 0.0) {
    we += config.wind.gust_std_ms * noise.gaussian();
    wn += config.wind.gust_std_ms * noise.gaussian();
  }

  const double dt = config.timestep_s;
  const double alpha = dt / config.velocity_time_constant_s;

  UavState next = state;
  next.vel_east_ms += alpha * (ce + we - state.vel_east_ms);
  next.vel_north_ms += alpha * (cn + wn - state.vel_north_ms);
  next.vel_up_ms += alpha * (cu - state.vel_up_ms);

  next.position.east_m += next.vel_east_ms * dt;
  next.position.north_m += next.vel_north_ms * dt;
  next.position.up_m += next.vel_up_ms * dt;
  if (next.position.up_m <= 0.0) {
    next.position.up_m = 0.0;
    if (next.vel_up_ms < 0.0) next.vel_up_ms = 0.0;
  }
  next.time_s += dt;
  return next;
}

VelocityCommand hover_at(const UavState& state, const geo::EnuPoint& target,
                         const nav::PidGains& gains, HoverPids& pids) {
  VelocityCommand cmd;
  cmd.east_ms = nav::pid_step(gains, pids.east,
                              target.east_m - state.position.east_m,
                              state.time_s);
  cmd.north_ms = nav::pid_step(gains, pids.north,
                               target.north_m - state.position.north_m,
                               state.time_s);
  cmd.up_ms =
      nav::pid_step(gains, pids.up, target.up_m - state.position.up_m,
                    state.time_s);
  return cmd;
}

}  // namespace uavsim::sim
