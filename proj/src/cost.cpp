#include <cmath>
#include <cstdlib>

#include "locus/scheduler.hpp"

namespace locus {

namespace {

std::int64_t to_cents(double amount) { return static_cast<std::int64_t>(std::llround(amount * 100.0)); }

// rate (cents per hour) * minutes / 60, rounded half up.
std::int64_t prorate(std::int64_t rate_cents_per_h, Minutes minutes) {
    return (rate_cents_per_h * minutes + 30) / 60;
}

}  // namespace

std::string format_cents(std::int64_t cents) {
    const bool negative = cents < 0;
    const std::int64_t abs = negative ? -cents : cents;
    std::string frac = std::to_string(abs % 100);
    if (frac.size() < 2) {
        frac.insert(0, "0");
    }
    return (negative ? "-" : "") + std::to_string(abs / 100) + "." + frac;
}

CostReport cost_rollup(const Schedule& schedule, const Portfolio& portfolio) {
    CostReport report;
    for (const auto& project : portfolio.projects) {
        ProjectCost pc;
        pc.project = project.id;
        for (const auto& act : project.activities) {
            const ScheduledActivity* entry = schedule.find({project.id, act.id});
            ActivityCost ac;
            ac.ref = {project.id, act.id};
            ac.fixed = to_cents(act.fixed_cost);
            if (entry) {
                for (const auto& rid : entry->assigned) {
                    const Resource* r = portfolio.find_resource(rid);
                    if (r) {
                        ac.labor += prorate(to_cents(r->rate_per_h), act.duration_min);
                    }
                }
                for (const auto& leg : entry->travel) {
                    const Resource* r = portfolio.find_resource(leg.resource);
                    if (r) {
                        ac.travel += prorate(to_cents(r->rate_per_h), leg.arrive - leg.depart);
                    }
                }
            }
            pc.labor += ac.labor;
            pc.travel += ac.travel;
            pc.fixed += ac.fixed;
            report.activities.push_back(ac);
        }
        report.labor += pc.labor;
        report.travel += pc.travel;
        report.fixed += pc.fixed;
        report.projects.push_back(pc);
    }
    return report;
}

}  // namespace locus
