#include "uavsim/geo.hpp"

#include <cmath>
#include <string>

#include "uavsim/errors.hpp"

namespace uavsim::geo {

void GeoPoint::validate() const {
  if (!std::isfinite(latitude_deg) || latitude_deg < -90.0 ||
      latitude_deg > 90.0) {
    throw ValidationError("GeoPoint: latitude " +
                          std::to_string(latitude_deg) +
                          " outside [-90, 90]");
  }
  if (!std::isfinite(longitude_deg) || longitude_deg < -180.0 ||
      longitude_deg > 180.0) {
    throw ValidationError("GeoPoint: longitude " +
                          std::to_string(longitude_deg) +
                          " outside [-180, 180]");
  }
  if (!std::isfinite(altitude_m)) {
    throw ValidationError("GeoPoint: altitude not finite");
  }
}

EnuPoint to_enu(const GeoPoint& origin, const GeoPoint& p) {
  origin.validate();
  p.validate();
  const double dlat = p.latitude_deg - origin.latitude_deg;
  const double dlon = p.longitude_deg - origin.longitude_deg;
  if (std::abs(dlat) >= 1.0 || std::abs(dlon) >= 1.0) {
    throw ValidationError(
        "to_enu: separation exceeds the flat-earth validity window (1 deg)");
  }
  EnuPoint e;
  e.north_m = dlat * kDegToRad * kEarthRadiusM;
  e.east_m = dlon * kDegToRad * kEarthRadiusM *
             std::cos(origin.latitude_deg * kDegToRad);
  e.up_m = p.altitude_m - origin.altitude_m;
  return e;
}

GeoPoint from_enu(const GeoPoint& origin, const EnuPoint& e) {
  origin.validate();
  if (!std::isfinite(e.east_m) || !std::isfinite(e.north_m) ||
      !std::isfinite(e.up_m)) {
    throw ValidationError("from_enu: non-finite ENU components");
  }
  GeoPoint p;
  p.latitude_deg =
      origin.latitude_deg + e.north_m / (kDegToRad * kEarthRadiusM);
  p.longitude_deg =
      origin.longitude_deg +
      e.east_m / (kDegToRad * kEarthRadiusM *
                  std::cos(origin.latitude_deg * kDegToRad));
  p.altitude_m = origin.altitude_m + e.up_m;
  return p;
}

}  // namespace uavsim::geo
