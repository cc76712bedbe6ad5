#pragma once

#include <cmath>

namespace uavsim::geo {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kDegToRad = M_PI / 180.0;

/// Geodetic point; altitude is meters above the mission ground origin.
struct GeoPoint {
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  double altitude_m = 0.0;

  void validate() const;
};

/// Local East-North-Up coordinates, meters, anchored at a GeoPoint origin.
struct EnuPoint {
  double east_m = 0.0;
  double north_m = 0.0;
  double up_m = 0.0;
};

inline double horizontal_distance(const EnuPoint& a, const EnuPoint& b) {
  return std::hypot(a.east_m - b.east_m, a.north_m - b.north_m);
}

/// Equirectangular projection into the local ENU frame. Valid only for
/// separations under 1 degree in latitude and longitude; larger inputs
/// throw ValidationError.
EnuPoint to_enu(const GeoPoint& origin, const GeoPoint& p);

/// Exact inverse of to_enu within the validity window.
GeoPoint from_enu(const GeoPoint& origin, const EnuPoint& e);

}  // namespace uavsim::geo
