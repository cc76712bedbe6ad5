#include "uavsim/performance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "uavsim/errors.hpp"

namespace uavsim::perf {

void MotorPropCurve::validate() const {
  if (samples.size() < 2) {
    throw ValidationError("MotorPropCurve: need at least 2 samples");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!(s.throttle >= 0.0 && s.throttle <= 1.0)) {
      throw ValidationError("MotorPropCurve: throttle outside [0, 1]");
    }
    if (s.current_a <= 0.0 || s.power_w <= 0.0 || s.thrust_gf <= 0.0) {
      throw ValidationError("MotorPropCurve: non-positive sample value");
    }
    if (i > 0) {
      const auto& p = samples[i - 1];
      if (s.throttle <= p.throttle) {
        throw ValidationError(
            "MotorPropCurve: throttle values must be strictly increasing");
      }
      if (s.current_a < p.current_a || s.power_w < p.power_w ||
          s.thrust_gf < p.thrust_gf) {
        throw ValidationError(
            "MotorPropCurve: current/power/thrust must be non-decreasing");
      }
    }
  }
}

MotorPropCurve MotorPropCurve::from_csv(std::istream& in) {
  MotorPropCurve curve;
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("curve CSV: empty input");
  }
  // Tolerate \r\n line endings.
  auto strip = [](std::string& s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
  };
  strip(line);
  if (line != "throttle,current_a,power_w,thrust_gf") {
    throw ValidationError(
        "curve CSV: expected header 'throttle,current_a,power_w,thrust_gf'");
  }
  while (std::getline(in, line)) {
    strip(line);
    if (line.empty()) continue;
    MotorPropSample s;
    char extra = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf %c", &s.throttle,
                    &s.current_a, &s.power_w, &s.thrust_gf, &extra) != 4) {
      throw ValidationError("curve CSV: malformed row '" + line + "'");
    }
    curve.samples.push_back(s);
  }
  curve.validate();
  return curve;
}

MotorPropCurve MotorPropCurve::from_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("curve CSV: cannot open '" + path + "'");
  }
  return from_csv(in);
}

void AirframeConfig::validate() const {
  if (total_mass_g <= 0.0) {
    throw ValidationError("AirframeConfig: total_mass_g must be > 0");
  }
  if (motor_count < 1) {
    throw ValidationError("AirframeConfig: motor_count must be >= 1");
  }
  if (prop_diameter_m <= 0.0) {
    throw ValidationError("AirframeConfig: prop_diameter_m must be > 0");
  }
  if (battery_capacity_ah <= 0.0) {
    throw ValidationError("AirframeConfig: battery_capacity_ah must be > 0");
  }
  if (air_density_kgm3 < 0.8 || air_density_kgm3 > 1.4) {
    throw ValidationError("AirframeConfig: air_density_kgm3 outside [0.8, 1.4]");
  }
  if (avionics_current_a < 0.0 || avionics_power_w < 0.0) {
    throw ValidationError("AirframeConfig: negative avionics overhead");
  }
}

namespace {

MotorPropSample interpolate(const MotorPropCurve& curve, double throttle) {
  const auto& s = curve.samples;
  auto it = std::lower_bound(
      s.begin(), s.end(), throttle,
      [](const MotorPropSample& a, double t) { return a.throttle < t; });
  if (it == s.begin()) return s.front();   // throttle == front, by precondition
  if (it == s.end()) return s.back();
  if (it->throttle == throttle) return *it;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double f = (throttle - lo.throttle) / (hi.throttle - lo.throttle);
  MotorPropSample out;
  out.throttle = throttle;
  out.current_a = lo.current_a + f * (hi.current_a - lo.current_a);
  out.power_w = lo.power_w + f * (hi.power_w - lo.power_w);
  out.thrust_gf = lo.thrust_gf + f * (hi.thrust_gf - lo.thrust_gf);
  return out;
}

}  // namespace

PerformancePoint evaluate_at(const MotorPropCurve& curve,
                             const AirframeConfig& config, double throttle) {
  curve.validate();
  config.validate();
  if (throttle < curve.min_throttle() || throttle > curve.max_throttle()) {
    throw OutOfRangeError("evaluate_at: throttle " + std::to_string(throttle) +
                          " outside sampled domain [" +
                          std::to_string(curve.min_throttle()) + ", " +
                          std::to_string(curve.max_throttle()) + "]");
  }

  const MotorPropSample s = interpolate(curve, throttle);
  const double n = static_cast<double>(config.motor_count);

  PerformancePoint p;
  p.throttle = throttle;
  p.current_per_motor_a = s.current_a;
  p.power_per_motor_w = s.power_w;
  p.thrust_per_motor_gf = s.thrust_gf;
  p.motor_efficiency_gf_per_w = s.thrust_gf / s.power_w;
  p.total_current_a = n * s.current_a + config.avionics_current_a;
  p.total_power_w = n * s.power_w + config.avionics_power_w;
  p.total_thrust_gf = n * s.thrust_gf;
  p.thrust_to_weight = p.total_thrust_gf / config.total_mass_g;
  p.flight_time_min = config.battery_capacity_ah / p.total_current_a * 60.0;

  if (p.thrust_to_weight > 1.0) {
    const double tilt_rad = std::acos(config.total_mass_g / p.total_thrust_gf);
    p.tilt_angle_deg = tilt_rad * 180.0 / M_PI;

    // Momentum-theory induced velocity through the total disk area at the
    // available thrust.
    const double thrust_n = p.total_thrust_gf * kGramForceToNewton;
    const double disk_area =
        n * M_PI * (config.prop_diameter_m / 2.0) * (config.prop_diameter_m / 2.0);
    const double v_takeoff =
        std::sqrt(thrust_n / (2.0 * config.air_density_kgm3 * disk_area));
    p.takeoff_velocity_ms = v_takeoff;
    p.horizontal_velocity_ms = 2.0 * v_takeoff * std::sin(tilt_rad);
    p.range_km = *p.horizontal_velocity_ms * p.flight_time_min * 60.0 / 1000.0;
  }
  return p;
}

PerformanceTable table_report(const MotorPropCurve& curve,
                              const AirframeConfig& config,
                              const std::vector<double>& throttles) {
  PerformanceTable table;
  table.points.reserve(throttles.size());
  for (double t : throttles) {
    table.points.push_back(evaluate_at(curve, config, t));
  }
  return table;
}

namespace {

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v, int decimals) {
  return v ? fmt(*v, decimals) : std::string("-");
}

}  // namespace

void write_table_csv(const PerformanceTable& table, std::ostream& out) {
  const auto& pts = table.points;
  auto row = [&](const std::string& label, auto getter) {
    out << label;
    for (const auto& p : pts) out << ',' << getter(p);
    out << '\n';
  };

  out << "Parameter";
  for (const auto& p : pts) out << ',' << fmt(p.throttle * 100.0, 2) << '%';
  out << '\n';

  row("Current draw per Motor (A)",
      [](const PerformancePoint& p) { return fmt(p.current_per_motor_a, 2); });
  row("Power drawn per Motor (W)",
      [](const PerformancePoint& p) { return fmt(p.power_per_motor_w, 2); });
  row("Thrust per Motor (gf)",
      [](const PerformancePoint& p) { return fmt(p.thrust_per_motor_gf, 2); });
  row("Efficiency of Motor (gf/W)", [](const PerformancePoint& p) {
    return fmt(p.motor_efficiency_gf_per_w, 2);
  });
  row("Total Current draw of UAV (A)",
      [](const PerformancePoint& p) { return fmt(p.total_current_a, 2); });
  row("Total Power drawn by UAV (W)",
      [](const PerformancePoint& p) { return fmt(p.total_power_w, 2); });
  row("Total Thrust (gf)",
      [](const PerformancePoint& p) { return fmt(p.total_thrust_gf, 2); });
  row("Thrust-to-Weight Ratio",
      [](const PerformancePoint& p) { return fmt(p.thrust_to_weight, 2); });
  row("Tilt Angle (deg)",
      [](const PerformancePoint& p) { return fmt_opt(p.tilt_angle_deg, 2); });
  row("Takeoff Velocity (m/s)", [](const PerformancePoint& p) {
    return fmt_opt(p.takeoff_velocity_ms, 2);
  });
  row("Horizontal Velocity (m/s)", [](const PerformancePoint& p) {
    return fmt_opt(p.horizontal_velocity_ms, 2);
  });
  row("Flight Time (minutes)",
      [](const PerformancePoint& p) { return fmt(p.flight_time_min, 3); });
  row("Range (kilometers)",
      [](const PerformancePoint& p) { return fmt_opt(p.range_km, 2); });
}

}  // namespace uavsim::perf
