#include "uavsim/navigation.hpp"

#include <algorithm>
#include <cmath>

#include "uavsim/errors.hpp"

namespace uavsim::nav {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::PreflightCheck: return "preflight_check";
    case Phase::Takeoff: return "takeoff";
    case Phase::EnRoute: return "en_route";
    case Phase::VisionSearch: return "vision_search";
    case Phase::Aligning: return "aligning";
    case Phase::Releasing: return "releasing";
    case Phase::GpsFallbackDrop: return "gps_fallback_drop";
    case Phase::Landed: return "landed";
    case Phase::Aborted: return "aborted";
  }
  return "?";
}

const char* mode_name(MissionMode m) {
  return m == MissionMode::GpsOnly ? "gps_only" : "vision_assisted";
}

void MissionPlan::validate() const {
  origin.validate();
  drop_location.validate();
  for (const auto& w : waypoints) w.validate();
  if (cruise_altitude_m <= 0.5) {
    throw ValidationError("MissionPlan: cruise_altitude_m must be > 0.5");
  }
  if (waypoint_radius_m <= 0.0 || handoff_threshold_m <= 0.0 ||
      align_tolerance_px <= 0.0 || align_hold_frames < 1 ||
      search_timeout_s <= 0.0 || preflight_timeout_s <= 0.0 ||
      gps_loss_timeout_s <= 0.0 || search_speed_ms <= 0.0) {
    throw ValidationError("MissionPlan: tolerances and timeouts must be > 0");
  }
}

EnuOffset pixel_error_to_meters(double pixel_x, double pixel_y,
                                const sense::CameraModel& camera,
                                double altitude_m, double yaw_rad) {
  if (altitude_m <= 0.1) {
    throw ValidationError("pixel_error_to_meters: altitude <= 0.1 m");
  }
  const double f = camera.focal_px();
  const double x_cam = (pixel_x - camera.principal_x()) / f * altitude_m;
  const double y_cam = (pixel_y - camera.principal_y()) / f * altitude_m;
  const double c = std::cos(yaw_rad);
  const double s = std::sin(yaw_rad);
  // The body->image rotation is an involution, so the same matrix maps back.
  return {x_cam * c - y_cam * s, -x_cam * s - y_cam * c};
}

namespace {

void change_phase(MissionState& state, Phase to, double time_s,
                  std::vector<MissionEvent>& events, std::string detail = {}) {
  MissionEvent ev;
  ev.kind = MissionEvent::Kind::PhaseChange;
  ev.time_s = time_s;
  ev.from = state.phase;
  ev.to = to;
  ev.detail = std::move(detail);
  events.push_back(std::move(ev));
  state.phase = to;
  state.phase_start_time_s = time_s;
}

void emit_release(MissionState& state, double time_s,
                  std::vector<MissionEvent>& events) {
  MissionEvent ev;
  ev.kind = MissionEvent::Kind::PayloadRelease;
  ev.time_s = time_s;
  ev.from = ev.to = Phase::Releasing;
  ev.detail = "servo payload release";
  events.push_back(std::move(ev));
  state.release_emitted = true;
  state.release_time_s = time_s;
}

/// Relative expanding-square waypoints: two legs per size, sizes growing
/// by 2 m up to twice the handoff threshold.
std::vector<geo::EnuPoint> expanding_square(const geo::EnuPoint& anchor,
                                            double max_leg_m,
                                            double altitude_m) {
  std::vector<geo::EnuPoint> pts;
  double e = anchor.east_m;
  double n = anchor.north_m;
  static constexpr double kDirs[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  int dir = 0;
  for (double leg = 2.0; leg <= max_leg_m + 1e-9; leg += 2.0) {
    for (int rep = 0; rep < 2; ++rep) {
      e += kDirs[dir % 4][0] * leg;
      n += kDirs[dir % 4][1] * leg;
      pts.push_back({e, n, altitude_m});
      ++dir;
    }
  }
  return pts;
}

void enter_search(MissionState& state, const MissionPlan& plan,
                  const geo::EnuPoint& est_pos, double time_s,
                  std::vector<MissionEvent>& events) {
  change_phase(state, Phase::VisionSearch, time_s, events);
  state.search_points = expanding_square(est_pos, 2.0 * plan.handoff_threshold_m,
                                         plan.cruise_altitude_m);
  state.search_index = -1;
  state.align_hold_count = 0;
}

}  // namespace

sim::VelocityCommand mission_step(MissionState& state, const MissionPlan& plan,
                                  const MissionGains& gains,
                                  const sense::GpsFix& gps,
                                  const sense::Frame* frame,
                                  const std::optional<det::Detection>& detection,
                                  const sense::CameraModel& camera,
                                  double yaw_rad, double time_s,
                                  std::vector<MissionEvent>& events) {
  plan.validate();
  if (!state.started) {
    state.started = true;
    state.phase_start_time_s = time_s;
    state.last_valid_fix_time_s = time_s;
  }

  sim::VelocityCommand cmd;  // zero = hold
  if (state.phase == Phase::Landed || state.phase == Phase::Aborted) {
    return cmd;
  }

  const geo::EnuPoint est = gps.estimated_position;
  const geo::EnuPoint drop_enu = geo::to_enu(plan.origin, plan.drop_location);

  // The 8-satellite autonomy gate: without a valid fix the vehicle only
  // holds. On the ground that blocks takeoff; in the air a persistent
  // outage aborts the mission.
  if (!gps.valid_for_auto) {
    if (state.phase == Phase::PreflightCheck &&
        time_s - state.phase_start_time_s > plan.preflight_timeout_s) {
      state.abort_reason = "preflight: never acquired an autonomy-grade fix";
      change_phase(state, Phase::Aborted, time_s, events, state.abort_reason);
    } else if (state.phase != Phase::PreflightCheck &&
               time_s - state.last_valid_fix_time_s > plan.gps_loss_timeout_s) {
      state.abort_reason = "gps_lost";
      change_phase(state, Phase::Aborted, time_s, events, state.abort_reason);
    }
    return cmd;
  }
  state.last_valid_fix_time_s = time_s;

  auto altitude_cmd = [&](double target_alt) {
    return pid_step(gains.altitude, state.pid_up, target_alt - est.up_m,
                    time_s);
  };
  auto nav_towards = [&](const geo::EnuPoint& target, double speed_cap) {
    sim::VelocityCommand c;
    c.east_ms = pid_step(gains.nav_horizontal, state.pid_east,
                         target.east_m - est.east_m, time_s);
    c.north_ms = pid_step(gains.nav_horizontal, state.pid_north,
                          target.north_m - est.north_m, time_s);
    const double n = std::hypot(c.east_ms, c.north_ms);
    if (n > speed_cap) {
      c.east_ms *= speed_cap / n;
      c.north_ms *= speed_cap / n;
    }
    c.up_ms = altitude_cmd(plan.cruise_altitude_m);
    return c;
  };

  switch (state.phase) {
    case Phase::PreflightCheck: {
      change_phase(state, Phase::Takeoff, time_s, events,
                   "fix valid for autonomous flight");
      break;
    }
    case Phase::Takeoff: {
      cmd.up_ms = altitude_cmd(plan.cruise_altitude_m);
      if (std::abs(est.up_m - plan.cruise_altitude_m) < 0.5) {
        state.waypoint_index = 0;
        state.pid_east.reset();
        state.pid_north.reset();
        change_phase(state, Phase::EnRoute, time_s, events);
      }
      break;
    }
    case Phase::EnRoute: {
      const bool on_waypoints =
          state.waypoint_index < static_cast<int>(plan.waypoints.size());
      const geo::EnuPoint target =
          on_waypoints
              ? geo::to_enu(plan.origin, plan.waypoints[state.waypoint_index])
              : drop_enu;
      const double dist = std::hypot(target.east_m - est.east_m,
                                     target.north_m - est.north_m);
      cmd = nav_towards(target, gains.nav_horizontal.output_limit);
      if (on_waypoints) {
        if (dist < plan.waypoint_radius_m) ++state.waypoint_index;
      } else if (plan.mode == MissionMode::GpsOnly) {
        if (dist < plan.waypoint_radius_m) {
          change_phase(state, Phase::Releasing, time_s, events,
                       "inside waypoint radius of the drop coordinate");
          emit_release(state, time_s, events);
          change_phase(state, Phase::Landed, time_s, events);
          cmd = {};
        }
      } else if (dist < plan.handoff_threshold_m) {
        // control transfer to the target detection algorithm
        enter_search(state, plan, est, time_s, events);
        cmd = {};
        cmd.up_ms = altitude_cmd(plan.cruise_altitude_m);
      }
      break;
    }
    case Phase::VisionSearch: {
      if (frame && detection) {
        state.last_detection_time_s = time_s;
        state.align_hold_count = 0;
        state.last_align_cmd = {};
        state.align_east.reset();
        state.align_north.reset();
        change_phase(state, Phase::Aligning, time_s, events,
                     "target detected");
        cmd.up_ms = altitude_cmd(plan.cruise_altitude_m);
        break;
      }
      if (time_s - state.phase_start_time_s > plan.search_timeout_s) {
        state.pid_east.reset();
        state.pid_north.reset();
        change_phase(state, Phase::GpsFallbackDrop, time_s, events,
                     "search timed out; dropping on the GPS coordinate");
        cmd.up_ms = altitude_cmd(plan.cruise_altitude_m);
        break;
      }
      const double held = time_s - state.phase_start_time_s;
      constexpr double kInitialHoldS = 2.0;
      if (held < kInitialHoldS || state.search_points.empty()) {
        cmd.up_ms = altitude_cmd(plan.cruise_altitude_m);
        break;
      }
      if (state.search_index < 0) state.search_index = 0;
      if (state.search_index >= static_cast<int>(state.search_points.size())) {
        cmd.up_ms = altitude_cmd(plan.cruise_altitude_m);
        break;
      }
      const auto& pt = state.search_points[state.search_index];
      if (std::hypot(pt.east_m - est.east_m, pt.north_m - est.north_m) <
          plan.waypoint_radius_m) {
        ++state.search_index;
      }
      cmd = nav_towards(pt, plan.search_speed_ms);
      break;
    }
    case Phase::Aligning: {
      if (frame) {
        if (detection) {
          state.last_detection_time_s = time_s;
          const double ex = detection->center_x_px - camera.principal_x();
          const double ey = detection->center_y_px - camera.principal_y();
          const double pixel_err = std::hypot(ex, ey);
          const EnuOffset off = pixel_error_to_meters(
              detection->center_x_px, detection->center_y_px, camera,
              std::max(est.up_m, 0.2), yaw_rad);
          sim::VelocityCommand c;
          c.east_ms = pid_step(gains.align_horizontal, state.align_east,
                               off.east_m, time_s);
          c.north_ms = pid_step(gains.align_horizontal, state.align_north,
                                off.north_m, time_s);
          const double n = std::hypot(c.east_ms, c.north_ms);
          if (n > gains.align_horizontal.output_limit) {
            c.east_ms *= gains.align_horizontal.output_limit / n;
            c.north_ms *= gains.align_horizontal.output_limit / n;
          }
          state.last_align_cmd = c;
          if (pixel_err < plan.align_tolerance_px) {
            ++state.align_hold_count;
            if (state.align_hold_count >= plan.align_hold_frames) {
              change_phase(state, Phase::Releasing, time_s, events,
                           "alignment held for the required frames");
              emit_release(state, time_s, events);
              change_phase(state, Phase::Landed, time_s, events);
              return {};
            }
          } else {
            state.align_hold_count = 0;
          }
        } else {
          state.align_hold_count = 0;
        }
      }
      if (time_s - state.last_detection_time_s > 1.0) {
        enter_search(state, plan, est, time_s, events);
        cmd = {};
        cmd.up_ms = altitude_cmd(plan.cruise_altitude_m);
        break;
      }
      cmd = state.last_align_cmd;
      cmd.up_ms = altitude_cmd(plan.cruise_altitude_m);
      break;
    }
    case Phase::GpsFallbackDrop: {
      const double dist = std::hypot(drop_enu.east_m - est.east_m,
                                     drop_enu.north_m - est.north_m);
      if (dist < plan.waypoint_radius_m) {
        change_phase(state, Phase::Releasing, time_s, events,
                     "fallback drop on the GPS coordinate");
        emit_release(state, time_s, events);
        change_phase(state, Phase::Landed, time_s, events);
        cmd = {};
        break;
      }
      cmd = nav_towards(drop_enu, gains.nav_horizontal.output_limit);
      break;
    }
    case Phase::Releasing:
    case Phase::Landed:
    case Phase::Aborted:
      break;
  }
  return cmd;
}

}  // namespace uavsim::nav
