#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "uavf/errors.hpp"

namespace uavf {

/// Spherical Earth radius used throughout. The flights this toolkit deals
/// with span a few hundred meters, where the sphere-vs-ellipsoid error is
/// far below GPS noise.
inline constexpr double kEarthRadiusM = 6371000.0;

inline constexpr double deg2rad(double d) { return d * M_PI / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / M_PI; }

/// WGS-style geographic coordinate. Altitude is meters above mean sea level
/// and optional (not every evidence source carries it).
struct GeoPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  std::optional<double> alt_m;

  bool operator==(const GeoPoint&) const = default;
};

/// Validates bounds: lat in [-90, 90], lon in (-180, 180], no NaN.
inline GeoPoint make_geopoint(double lat_deg, double lon_deg,
                              std::optional<double> alt_m = std::nullopt) {
  if (std::isnan(lat_deg) || std::isnan(lon_deg) || (alt_m && std::isnan(*alt_m))) {
    throw ValidationError("GeoPoint: NaN coordinate");
  }
  if (lat_deg < -90.0 || lat_deg > 90.0) {
    throw ValidationError("GeoPoint: latitude out of [-90, 90]: " + std::to_string(lat_deg));
  }
  if (lon_deg <= -180.0 || lon_deg > 180.0) {
    throw ValidationError("GeoPoint: longitude out of (-180, 180]: " + std::to_string(lon_deg));
  }
  return GeoPoint{lat_deg, lon_deg, alt_m};
}

/// Great-circle distance in meters (haversine).
inline double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = deg2rad(a.lat_deg);
  const double phi2 = deg2rad(b.lat_deg);
  const double dphi = deg2rad(b.lat_deg - a.lat_deg);
  const double dlam = deg2rad(b.lon_deg - a.lon_deg);
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlam / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

/// 3D separation: great-circle horizontal distance combined with the
/// altitude difference in quadrature. Missing altitude on either side
/// degrades to the horizontal distance.
inline double distance_3d_m(const GeoPoint& a, const GeoPoint& b) {
  const double horiz = haversine_m(a, b);
  if (a.alt_m && b.alt_m) {
    const double dz = *b.alt_m - *a.alt_m;
    return std::sqrt(horiz * horiz + dz * dz);
  }
  return horiz;
}

/// Displaces a point by local north/east meters on the sphere. Used to
/// georeference NED-frame samples and to build synthetic fixtures.
inline GeoPoint offset_ne_m(const GeoPoint& origin, double north_m, double east_m,
                            std::optional<double> alt_m = std::nullopt) {
  const double dlat = rad2deg(north_m / kEarthRadiusM);
  const double dlon = rad2deg(east_m / (kEarthRadiusM * std::cos(deg2rad(origin.lat_deg))));
  return GeoPoint{origin.lat_deg + dlat, origin.lon_deg + dlon,
                  alt_m ? alt_m : origin.alt_m};
}

}  // namespace uavf
