#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace uavsim::perf {

inline constexpr double kGramForceToNewton = 9.80665e-3;

/// One throttle point of a motor-propeller bench test.
struct MotorPropSample {
  double throttle = 0.0;       // fraction in [0, 1]
  double current_a = 0.0;      // per motor
  double power_w = 0.0;        // per motor
  double thrust_gf = 0.0;      // per motor
};

/// Throttle-indexed bench curve of per-motor current/power/thrust.
/// Samples must be strictly increasing in throttle with positive,
/// non-decreasing electrical and thrust values.
struct MotorPropCurve {
  std::vector<MotorPropSample> samples;

  void validate() const;
  double min_throttle() const { return samples.front().throttle; }
  double max_throttle() const { return samples.back().throttle; }

  /// Parses `throttle,current_a,power_w,thrust_gf` CSV.
  static MotorPropCurve from_csv(std::istream& in);
  static MotorPropCurve from_csv_file(const std::string& path);
};

/// Vehicle-level constants needed to turn a per-motor curve into
/// whole-UAV performance figures.
struct AirframeConfig {
  double total_mass_g = 1953.0;
  int motor_count = 4;
  double prop_diameter_m = 0.2286;   // 9 inch
  double battery_capacity_ah = 6.2;
  double avionics_current_a = 1.1;   // constant additive draw
  double avionics_power_w = 5.5;
  double air_density_kgm3 = 1.1626;

  void validate() const;
};

/// Whole-UAV performance at one throttle setting. The tilt-dependent
/// fields are present iff thrust_to_weight exceeds 1 (the vehicle can
/// only tilt while holding altitude when it has spare thrust).
struct PerformancePoint {
  double throttle = 0.0;
  double current_per_motor_a = 0.0;
  double power_per_motor_w = 0.0;
  double thrust_per_motor_gf = 0.0;
  double motor_efficiency_gf_per_w = 0.0;
  double total_current_a = 0.0;
  double total_power_w = 0.0;
  double total_thrust_gf = 0.0;
  double thrust_to_weight = 0.0;
  double flight_time_min = 0.0;
  std::optional<double> tilt_angle_deg;
  std::optional<double> takeoff_velocity_ms;
  std::optional<double> horizontal_velocity_ms;
  std::optional<double> range_km;
};

struct PerformanceTable {
  std::vector<PerformancePoint> points;
};

/// Evaluates the airframe at one throttle setting, interpolating the
/// bench curve linearly between samples. Throws OutOfRangeError when the
/// throttle falls outside the sampled domain.
PerformancePoint evaluate_at(const MotorPropCurve& curve,
                             const AirframeConfig& config, double throttle);

/// Evaluates a list of throttles into an ordered table.
PerformanceTable table_report(const MotorPropCurve& curve,
                              const AirframeConfig& config,
                              const std::vector<double>& throttles);

/// Writes the table as CSV, one labelled row per performance parameter
/// and one column per throttle. Values use 2 decimals except flight time
/// (3); fields absent at a throttle are written as "-".
void write_table_csv(const PerformanceTable& table, std::ostream& out);

}  // namespace uavsim::perf
