#include "locus/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "locus/error.hpp"

namespace locus {

std::vector<TransferDelayWarning> transfer_warnings(const Schedule& schedule, const Portfolio& portfolio) {
    std::vector<TransferDelayWarning> out;
    for (const auto& r : portfolio.resources) {
        std::vector<const ScheduledActivity*> work;
        for (const auto& e : schedule.entries) {
            if (std::find(e.assigned.begin(), e.assigned.end(), r.id) != e.assigned.end()) {
                work.push_back(&e);
            }
        }
        std::sort(work.begin(), work.end(), [](const auto* x, const auto* y) {
            return std::tie(x->start, x->finish, x->ref) < std::tie(y->start, y->finish, y->ref);
        });

        GeoPoint pos = r.current_position();
        for (std::size_t i = 0; i < work.size(); ++i) {
            const Project* project = portfolio.find_project(work[i]->ref.project);
            const Activity* act = project ? project->find(work[i]->ref.activity) : nullptr;
            if (i > 0 && act && act->location) {
                const Minutes travel = travel_time(pos, *act->location, r.speed_kmh);
                const Minutes gap = work[i]->start - work[i - 1]->finish;
                if (travel > gap) {
                    out.push_back(TransferDelayWarning{r.id, work[i - 1]->ref, work[i]->ref, work[i - 1]->finish, gap,
                                                       travel, travel - gap});
                }
            }
            if (act && act->location) {
                pos = *act->location;
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        return std::tie(x.resource, x.depart) < std::tie(y.resource, y.depart);
    });
    return out;
}

BucketResponse bucket_distance(const std::string& client, const GeoPoint& client_pos, const GeoPoint& poi,
                               double width_m) {
    if (!(width_m > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "bucket width must be positive");
    }
    const double meters = haversine_distance(client_pos, poi) * 1000.0;
    const auto bucket = static_cast<long long>(std::ceil(meters / width_m));
    return BucketResponse{client, std::max<long long>(1, bucket), width_m};
}

ProximityDecision nearest_to_poi(const std::vector<BucketResponse>& responses) {
    if (responses.empty()) {
        throw Error(ErrorCode::NoResponses, "no client answered the proximity query");
    }
    ProximityDecision decision;
    const BucketResponse* best = nullptr;
    for (const auto& r : responses) {
        if (r.width_m != responses.front().width_m) {
            throw Error(ErrorCode::InvalidArgument, "bucket widths differ between responses");
        }
        decision.log.emplace_back(r.client, r.bucket);
        if (!best || std::tie(r.bucket, r.client) < std::tie(best->bucket, best->client)) {
            best = &r;
        }
    }
    decision.chosen = best->client;
    decision.bucket = best->bucket;
    return decision;
}

}  // namespace locus
