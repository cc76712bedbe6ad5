#pragma once

// Shared fixtures for the test suites: the published six-column motor
// bench data and small helpers.

#include <vector>

#include "uavsim/performance.hpp"

namespace testsup {

// Measured per-motor bench columns (throttle, A, W, gf).
inline uavsim::perf::MotorPropCurve bench_curve() {
  uavsim::perf::MotorPropCurve c;
  c.samples = {
      {0.166, 1.39, 17.0, 122.0},  {0.333, 4.26, 49.7, 278.0},
      {0.500, 7.52, 89.1, 449.0},  {0.666, 13.09, 141.0, 670.0},
      {0.833, 20.75, 222.3, 938.0}, {1.000, 30.27, 311.0, 1077.0},
  };
  return c;
}

// Published whole-UAV figures for the same columns.
struct PublishedColumn {
  double throttle;
  double total_current_a;
  double total_power_w;
  double total_thrust_gf;
  double thrust_to_weight;
  // < 0 marks cells the published table leaves blank
  double tilt_deg;
  double takeoff_ms;
  double horizontal_ms;
  double flight_time_min;
  double range_km;
};

inline std::vector<PublishedColumn> published_columns() {
  return {
      {0.166, 6.66, 73.5, 488, 0.24, -1, -1, -1, -1, -1},
      {0.333, 18.14, 204.3, 1112, 0.56, -1, -1, -1, -1, -1},
      {0.500, 31.18, 361.9, 1796, 0.91, -1, -1, -1, -1, -1},
      {0.666, 53.46, 569.5, 2680, 1.37, 43.21, 8.29, 11.28, 6.95, 4.70},
      {0.833, 84.10, 894.7, 3752, 1.92, 58.63, 9.81, 15.94, 4.42, 4.22},
      {1.000, 122.18, 1249.5, 4308, 2.21, 63.04, 10.52, 18.08, 3.044, 3.30},
  };
}

}  // namespace testsup
