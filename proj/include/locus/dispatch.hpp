#pragma once

#include <string>
#include <utility>
#include <vector>

#include "locus/scheduler.hpp"

namespace locus {

/// One warning per consecutive pair of assignments of a resource whose
/// required travel exceeds the scheduled idle gap; sorted by
/// (resource id, depart time).
std::vector<TransferDelayWarning> transfer_warnings(const Schedule& schedule, const Portfolio& portfolio);

inline constexpr double kDefaultBucketWidthM = 500.0;

/// What a field client reveals in a nearest-worker query. No coordinates.
struct BucketResponse {
    std::string client;
    long long bucket = 1;  // ceil(distance_m / width_m), at least 1
    double width_m = kDefaultBucketWidthM;

    friend bool operator==(const BucketResponse&, const BucketResponse&) = default;
};

/// Client side of the proximity query: quantizes the distance to the POI.
BucketResponse bucket_distance(const std::string& client, const GeoPoint& client_pos, const GeoPoint& poi,
                               double width_m = kDefaultBucketWidthM);

struct ProximityDecision {
    std::string chosen;
    long long bucket = 0;
    std::vector<std::pair<std::string, long long>> log;  // (client, bucket) only
};

/// Server side: minimal bucket wins, ties to the lexicographically smallest
/// client id. Throws Error(NO_RESPONSES) on empty input and
/// Error(INVALID_ARGUMENT) when the widths disagree.
ProximityDecision nearest_to_poi(const std::vector<BucketResponse>& responses);

}  // namespace locus
