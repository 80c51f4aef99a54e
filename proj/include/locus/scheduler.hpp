#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "locus/model.hpp"

namespace locus {

// ---------------------------------------------------------------------------
// Critical path

struct CpmTimes {
    Minutes es = 0;
    Minutes ef = 0;
    Minutes ls = 0;
    Minutes lf = 0;
    Minutes slack = 0;
    bool critical = false;
};

/// Precedence-only analysis of one project, relative to time 0.
/// Travel, resources and commitments are ignored.
struct CpmResult {
    std::vector<std::string> ids;  // activity ids, same order as the project
    std::vector<CpmTimes> times;   // parallel to ids
    Minutes makespan = 0;

    const CpmTimes& at(const std::string& activity_id) const;
};

/// Forward/backward pass. Throws Error(CYCLE) for cyclic precedence.
CpmResult cpm(const Project& project);

/// Largest CPM makespan over all projects of the portfolio.
Minutes cpm_makespan(const Portfolio& portfolio);

// ---------------------------------------------------------------------------
// Schedules

struct TravelLeg {
    std::string resource;
    GeoPoint from;
    GeoPoint to;
    Minutes depart = 0;
    Minutes arrive = 0;

    friend bool operator==(const TravelLeg&, const TravelLeg&) = default;
};

enum class EntryState { Planned, InProgress, Done };

struct ScheduledActivity {
    ActivityRef ref;
    Minutes start = 0;
    Minutes finish = 0;
    Minutes work_min = 0;  // remaining duration covered by [start, finish)
    EntryState state = EntryState::Planned;
    std::vector<std::string> assigned;  // resource ids, sorted
    std::vector<TravelLeg> travel;      // legs that bring assigned resources here

    Minutes travel_min() const;

    friend bool operator==(const ScheduledActivity&, const ScheduledActivity&) = default;
};

struct Schedule {
    Minutes t0 = 0;
    std::vector<ScheduledActivity> entries;  // project order, then activity order
    Minutes makespan = 0;                    // max finish - t0
    Minutes total_travel_min = 0;

    const ScheduledActivity* find(const ActivityRef& ref) const;
    Minutes project_finish(const std::string& project_id) const;
    std::vector<TravelLeg> travel_legs() const;

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// Serial schedule-generation scheme over the whole portfolio starting at t0.
/// Picks eligible activities by (CPM slack, earliest achievable start,
/// project priority, activity id) and assigns, per demanded type, the
/// available resource closest in travel time. Throws Error(UNSATISFIABLE)
/// when a demand exceeds the non-failed pool, Error(CYCLE) on cyclic input.
Schedule schedule(const Portfolio& portfolio, Minutes t0);

struct BruteForceCaps {
    std::size_t max_activities = 8;
    std::size_t max_resources = 3;
};

/// Exact minimum makespan over every precedence-respecting ordering and every
/// resource-assignment choice, under the same timing rules as schedule().
/// Throws Error(CAP_EXCEEDED) for instances larger than caps.
Minutes brute_force_optimum(const Portfolio& portfolio, Minutes t0, BruteForceCaps caps = {});

// ---------------------------------------------------------------------------
// Alerts and re-planning

struct TransferDelayWarning {
    std::string resource;
    ActivityRef from_activity;
    ActivityRef to_activity;
    Minutes depart = 0;  // finish of from_activity
    Minutes gap_min = 0;
    Minutes travel_min = 0;
    Minutes shortfall_min = 0;

    friend bool operator==(const TransferDelayWarning&, const TransferDelayWarning&) = default;
};

struct BaselineSlip {
    std::string project;
    Minutes baseline_finish = 0;
    Minutes new_finish = 0;
    Minutes slip_min = 0;

    friend bool operator==(const BaselineSlip&, const BaselineSlip&) = default;
};

/// A failed resource that the baseline had assigned to unfinished work.
struct ResourceFailure {
    std::string resource;
    std::vector<ActivityRef> affected;
    bool replan_possible = true;

    friend bool operator==(const ResourceFailure&, const ResourceFailure&) = default;
};

using Alert = std::variant<TransferDelayWarning, BaselineSlip, ResourceFailure>;

std::string alert_kind(const Alert& alert);

/// One-line human rendering, e.g. "TRANSFER_DELAY R1 A/A3 -> B/B1 gap=30 travel=120 shortfall=90".
std::string describe_alert(const Alert& alert);

struct ReplanResult {
    Schedule schedule;
    std::vector<Alert> alerts;  // BASELINE_SLIP and RESOURCE_FAILURE
};

/// Rebuilds the schedule at t_now from the activities' current progress.
/// Completed activities keep their baseline interval, in-progress ones keep
/// resources and site and finish after their remaining work, everything else
/// is rescheduled from t_now without failed resources.
ReplanResult replan(const Portfolio& portfolio, const Schedule& baseline, Minutes t_now);

/// ceil(duration * (1 - progress)).
Minutes remaining_duration(const Activity& activity);

// ---------------------------------------------------------------------------
// Cost

/// Amounts in integer cents.
struct ActivityCost {
    ActivityRef ref;
    std::int64_t labor = 0;
    std::int64_t travel = 0;
    std::int64_t fixed = 0;

    std::int64_t total() const { return labor + travel + fixed; }
};

struct ProjectCost {
    std::string project;
    std::int64_t labor = 0;
    std::int64_t travel = 0;
    std::int64_t fixed = 0;

    std::int64_t total() const { return labor + travel + fixed; }
};

struct CostReport {
    std::vector<ActivityCost> activities;
    std::vector<ProjectCost> projects;
    std::int64_t labor = 0;
    std::int64_t travel = 0;
    std::int64_t fixed = 0;

    std::int64_t total() const { return labor + travel + fixed; }
};

CostReport cost_rollup(const Schedule& schedule, const Portfolio& portfolio);

/// "1234.50" style rendering of a cent amount.
std::string format_cents(std::int64_t cents);

// ---------------------------------------------------------------------------
// Export

/// activity_id,start,finish,resources,travel_min
std::string schedule_csv(const Schedule& schedule);

/// Fixed-width ASCII Gantt; critical activities carry a '*' marker.
std::string gantt_text(const Schedule& schedule, const Portfolio& portfolio, int width = 60);

}  // namespace locus
