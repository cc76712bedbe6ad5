#pragma once

#include <cstdint>

#include "uavsim/geo.hpp"
#include "uavsim/pid.hpp"
#include "uavsim/random.hpp"

namespace uavsim::sim {

/// Ground-truth kinematic state of the simulated vehicle.
struct UavState {
  geo::EnuPoint position;   // up_m >= 0; ground plane is a hard floor
  double vel_east_ms = 0.0;
  double vel_north_ms = 0.0;
  double vel_up_ms = 0.0;
  double yaw_rad = 0.0;     // heading, clockwise from north
  double time_s = 0.0;
};

/// Velocity setpoint handed to the plant; stands in for the positional
/// commands the flight computer would send to the autopilot's inner loops.
struct VelocityCommand {
  double east_ms = 0.0;
  double north_ms = 0.0;
  double up_ms = 0.0;
};

struct WindModel {
  double mean_east_ms = 0.0;
  double mean_north_ms = 0.0;
  double gust_std_ms = 0.0;  // per-axis gaussian gusts, sampled per step
};

struct WorldConfig {
  double timestep_s = 0.02;               // 50 Hz
  double max_horizontal_speed_ms = 11.28; // cruise at 66.6% throttle
  double max_vertical_speed_ms = 3.0;
  double velocity_time_constant_s = 0.8;
  WindModel wind;
  std::uint64_t rng_seed = 0;             // mixed into stream derivation

  void validate() const;
};

/// Advances the plant one timestep: the velocity relaxes toward the
/// clamped command (plus wind) with a first-order lag, then the position
/// integrates. Contact with the ground zeroes vertical velocity.
/// Deterministic given (state, cmd, config, stream position).
UavState step(const UavState& state, const VelocityCommand& cmd,
              const WorldConfig& config, RandomStream& noise);

/// Position-hold PID memory, one state per axis.
struct HoverPids {
  nav::PidState east;
  nav::PidState north;
  nav::PidState up;

  void reset() {
    east.reset();
    north.reset();
    up.reset();
  }
};

/// Maps the position error to `target` through a per-axis PID into a
/// velocity command.
VelocityCommand hover_at(const UavState& state, const geo::EnuPoint& target,
                         const nav::PidGains& gains, HoverPids& pids);

}  // namespace uavsim::sim
