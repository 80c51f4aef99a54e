#include "locus/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "locus/error.hpp"

namespace locus {

namespace {

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Distances that are an exact number of minutes away must not round up
// because of the last ulp of the trigonometry.
constexpr double kMinuteSlack = 1e-9;

}  // namespace

GeoPoint::GeoPoint(double lat, double lon) : lat_(lat), lon_(lon) {
    if (!(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0)) {
        std::ostringstream os;
        os << "coordinate out of range (lat " << lat << ", lon " << lon << ")";
        throw Error(ErrorCode::CoordRange, os.str());
    }
}

Geofence::Geofence(GeoPoint center, double radius_m) : center_(center), radius_m_(radius_m) {
    if (!(radius_m > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "geofence radius must be positive");
    }
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
    if (a == b) {
        return 0.0;
    }
    const double phi1 = deg2rad(a.lat());
    const double phi2 = deg2rad(b.lat());
    const double dphi = phi2 - phi1;
    const double dlambda = deg2rad(b.lon() - a.lon());
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    h = std::clamp(h, 0.0, 1.0);
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

Minutes travel_time(const GeoPoint& from, const GeoPoint& to, double speed_kmh) {
    if (!(speed_kmh > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "speed must be positive");
    }
    const double km = haversine_distance(from, to);
    if (km == 0.0) {
        return 0;
    }
    const double minutes = km / speed_kmh * 60.0;
    return std::max<Minutes>(1, static_cast<Minutes>(std::ceil(minutes - kMinuteSlack)));
}

bool within_geofence(const GeoPoint& p, const Geofence& fence) {
    return haversine_distance(p, fence.center()) * 1000.0 <= fence.radius_m();
}

}  // namespace locus
