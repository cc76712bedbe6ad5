#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uavsim/detector.hpp"
#include "uavsim/geo.hpp"
#include "uavsim/pid.hpp"
#include "uavsim/sensors.hpp"
#include "uavsim/worldsim.hpp"

namespace uavsim::nav {

enum class MissionMode { GpsOnly, VisionAssisted };

enum class Phase {
  PreflightCheck,
  Takeoff,
  EnRoute,
  VisionSearch,
  Aligning,
  Releasing,
  GpsFallbackDrop,
  Landed,
  Aborted,
};

const char* phase_name(Phase p);
const char* mode_name(MissionMode m);

/// Full mission definition: route, drop coordinate and the thresholds of
/// the two-stage guidance method.
struct MissionPlan {
  geo::GeoPoint origin;
  std::vector<geo::GeoPoint> waypoints;
  geo::GeoPoint drop_location;
  double cruise_altitude_m = 20.0;
  double waypoint_radius_m = 2.0;
  double handoff_threshold_m = 5.0;  // GPS -> vision control transfer distance
  double align_tolerance_px = 58.0;  // 3% of a 1920-wide frame
  int align_hold_frames = 10;
  double search_timeout_s = 30.0;
  double preflight_timeout_s = 10.0;
  double gps_loss_timeout_s = 10.0;
  double search_speed_ms = 2.5;
  MissionMode mode = MissionMode::VisionAssisted;

  void validate() const;
};

/// Gains for the three control loops the mission runs.
struct MissionGains {
  PidGains nav_horizontal{0.5, 0.0, 0.0, 10.0, 11.28};
  PidGains altitude{1.0, 0.0, 0.0, 10.0, 3.0};
  PidGains align_horizontal{0.40, 0.0, 0.0, 10.0, 2.5};
};

struct MissionEvent {
  enum class Kind { PhaseChange, PayloadRelease };
  Kind kind = Kind::PhaseChange;
  double time_s = 0.0;
  Phase from = Phase::PreflightCheck;
  Phase to = Phase::PreflightCheck;
  std::string detail;
};

/// Mutable mission-progress state threaded through mission_step.
struct MissionState {
  Phase phase = Phase::PreflightCheck;
  int waypoint_index = 0;
  double phase_start_time_s = 0.0;
  double last_valid_fix_time_s = 0.0;
  double last_detection_time_s = -1e9;
  int align_hold_count = 0;
  sim::VelocityCommand last_align_cmd;
  std::vector<geo::EnuPoint> search_points;
  int search_index = -1;  // -1: initial hold at the search anchor
  bool release_emitted = false;
  std::optional<double> release_time_s;
  std::string abort_reason;
  PidState pid_east, pid_north, pid_up;
  PidState align_east, align_north;
  bool started = false;
};

/// Converts a detection's pixel offset from the principal point into the
/// target's horizontal ENU offset relative to the vehicle.
/// Throws on altitude <= 0.1 m.
struct EnuOffset {
  double east_m = 0.0;
  double north_m = 0.0;
};
EnuOffset pixel_error_to_meters(double pixel_x, double pixel_y,
                                const sense::CameraModel& camera,
                                double altitude_m, double yaw_rad);

/// One 50 Hz tick of the mission logic: reads the current GPS fix and the
/// optional camera frame/detection, advances the phase machine and emits
/// the velocity command plus any events (phase changes, payload release).
///
/// Transition sketch: PreflightCheck -[8-sat fix]-> Takeoff -> EnRoute
/// over the waypoint list; at the drop location either Releasing (GPS
/// mode, inside waypoint_radius) or VisionSearch (vision mode, inside
/// handoff_threshold). VisionSearch holds then flies an expanding square
/// until a detection (-> Aligning) or timeout (-> GpsFallbackDrop).
/// Aligning centers the detection in the frame and releases after
/// align_hold_frames consecutive in-tolerance frames; losing the target
/// for >1 s returns to VisionSearch. An invalid fix holds position, and
/// aborts the mission once it persists past gps_loss_timeout_s.
sim::VelocityCommand mission_step(MissionState& state, const MissionPlan& plan,
                                  const MissionGains& gains,
                                  const sense::GpsFix& gps,
                                  const sense::Frame* frame,
                                  const std::optional<det::Detection>& detection,
                                  const sense::CameraModel& camera,
                                  double yaw_rad, double time_s,
                                  std::vector<MissionEvent>& events);

}  // namespace uavsim::nav
