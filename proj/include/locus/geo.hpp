#pragma once

#include <compare>

namespace locus {

/// Mean Earth radius (IUGG) used for all great-circle computations.
inline constexpr double kEarthRadiusKm = 6371.0088;

using Minutes = long long;

/// WGS84 position in decimal degrees. Construction validates the ranges,
/// so every GeoPoint in the program is a valid coordinate.
class GeoPoint {
public:
    /// Throws Error(COORD_RANGE) unless -90 <= lat <= 90 and -180 <= lon <= 180.
    GeoPoint(double lat, double lon);

    double lat() const noexcept { return lat_; }
    double lon() const noexcept { return lon_; }

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;

private:
    double lat_;
    double lon_;
};

/// Circular region around a site. radius_m must be positive.
class Geofence {
public:
    Geofence(GeoPoint center, double radius_m);

    const GeoPoint& center() const noexcept { return center_; }
    double radius_m() const noexcept { return radius_m_; }

private:
    GeoPoint center_;
    double radius_m_;
};

/// Great-circle distance in kilometres (haversine on a sphere).
double haversine_distance(const GeoPoint& a, const GeoPoint& b);

/// Whole minutes needed to cover the great-circle distance at speed_kmh,
/// rounded up. Throws Error(INVALID_ARGUMENT) for non-positive speed.
Minutes travel_time(const GeoPoint& from, const GeoPoint& to, double speed_kmh);

/// Boundary-inclusive membership test.
bool within_geofence(const GeoPoint& p, const Geofence& fence);

}  // namespace locus
