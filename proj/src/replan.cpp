#include <algorithm>
#include <cmath>

#include "locus/error.hpp"
#include "locus/scheduler.hpp"
#include "sgs_engine.hpp"

namespace locus {

std::string alert_kind(const Alert& alert) {
    return std::visit(
        [](const auto& a) -> std::string {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, TransferDelayWarning>) {
                return "TRANSFER_DELAY";
            } else if constexpr (std::is_same_v<T, BaselineSlip>) {
                return "BASELINE_SLIP";
            } else {
                return "RESOURCE_FAILURE";
            }
        },
        alert);
}

Minutes remaining_duration(const Activity& activity) {
    const double left = static_cast<double>(activity.duration_min) * (1.0 - activity.progress);
    // 1e-9 absorbs representation error such as 10 * (1 - 0.7) = 3.0000000000000004.
    return std::max<Minutes>(0, static_cast<Minutes>(std::ceil(left - 1e-9)));
}

ReplanResult replan(const Portfolio& portfolio, const Schedule& baseline, Minutes t_now) {
    if (t_now < baseline.t0) {
        throw Error(ErrorCode::InvalidArgument, "t_now lies before the schedule origin");
    }

    detail::SgsInput input;
    input.portfolio = &portfolio;
    input.t0 = baseline.t0;
    input.release = t_now;

    for (const auto& project : portfolio.projects) {
        for (const auto& act : project.activities) {
            const ActivityRef ref{project.id, act.id};
            const ScheduledActivity* planned = baseline.find(ref);
            if (act.progress >= 1.0) {
                ScheduledActivity entry;
                if (planned) {
                    entry = *planned;
                } else {
                    entry.ref = ref;
                    entry.start = entry.finish = t_now;
                    entry.work_min = 0;
                }
                entry.state = EntryState::Done;
                input.fixed.emplace(ref, std::move(entry));
            } else if (act.progress > 0.0 && planned) {
                ScheduledActivity entry;
                entry.ref = ref;
                entry.state = EntryState::InProgress;
                entry.work_min = remaining_duration(act);
                entry.start = t_now;
                entry.finish = t_now + entry.work_min;
                entry.assigned = planned->assigned;
                input.fixed.emplace(ref, std::move(entry));
            }
        }
    }

    // Where each usable resource is and when it is free again.
    for (const auto& r : portfolio.resources) {
        if (r.status != ResourceStatus::Available) {
            continue;
        }
        detail::ResourceSlot slot{t_now, r.current_position()};
        const ScheduledActivity* last = nullptr;
        for (const auto& [ref, entry] : input.fixed) {
            if (std::find(entry.assigned.begin(), entry.assigned.end(), r.id) != entry.assigned.end() &&
                (!last || entry.finish > last->finish)) {
                last = &entry;
            }
        }
        if (last) {
            slot.ready = std::max(t_now, last->finish);
            const Activity* act = portfolio.find_project(last->ref.project)->find(last->ref.activity);
            const bool fix_is_newer = r.position_at && *r.position_at >= last->finish;
            if (act->location && (last->state == EntryState::InProgress || !fix_is_newer)) {
                slot.pos = *act->location;
            }
        }
        input.slots.emplace(r.id, slot);
    }

    ReplanResult result;
    result.schedule = detail::run_sgs(input);

    for (const auto& project : portfolio.projects) {
        const bool in_baseline = std::any_of(baseline.entries.begin(), baseline.entries.end(),
                                             [&](const auto& e) { return e.ref.project == project.id; });
        if (!in_baseline) {
            continue;
        }
        const Minutes before = baseline.project_finish(project.id);
        const Minutes after = result.schedule.project_finish(project.id);
        if (after > before) {
            result.alerts.emplace_back(BaselineSlip{project.id, before, after, after - before});
        }
    }

    for (const auto& r : portfolio.resources) {
        if (r.status != ResourceStatus::Failed) {
            continue;
        }
        ResourceFailure failure{r.id, {}, true};
        for (const auto& e : baseline.entries) {
            const Activity* act = portfolio.find_project(e.ref.project)
                                      ? portfolio.find_project(e.ref.project)->find(e.ref.activity)
                                      : nullptr;
            const bool unfinished = act && act->progress < 1.0;
            if (unfinished && std::find(e.assigned.begin(), e.assigned.end(), r.id) != e.assigned.end()) {
                failure.affected.push_back(e.ref);
            }
        }
        if (!failure.affected.empty()) {
            result.alerts.emplace_back(std::move(failure));
        }
    }
    return result;
}

}  // namespace locus
