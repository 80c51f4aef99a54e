#pragma once

// Serial schedule-generation engine shared by schedule() and replan().

#include <map>
#include <string>

#include "locus/scheduler.hpp"

namespace locus::detail {

struct ResourceSlot {
    Minutes ready = 0;
    GeoPoint pos{0.0, 0.0};
};

struct SgsInput {
    const Portfolio* portfolio = nullptr;
    Minutes t0 = 0;       // reported schedule origin
    Minutes release = 0;  // nothing new starts before this
    std::map<ActivityRef, ScheduledActivity> fixed;  // already placed entries
    std::map<std::string, ResourceSlot> slots;       // usable resources only
};

Schedule run_sgs(const SgsInput& input);

/// Orders entries by project priority and activity position and fills in
/// makespan and travel totals.
void finalize(Schedule& schedule, const Portfolio& portfolio);

}  // namespace locus::detail
