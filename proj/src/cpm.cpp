#include "locus/scheduler.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "locus/error.hpp"

namespace locus {

const CpmTimes& CpmResult::at(const std::string& activity_id) const {
    auto it = std::find(ids.begin(), ids.end(), activity_id);
    if (it == ids.end()) {
        throw Error(ErrorCode::UnknownActivity, activity_id);
    }
    return times[static_cast<std::size_t>(it - ids.begin())];
}

CpmResult cpm(const Project& project) {
    const auto order = topological_order(project);
    const std::size_t n = project.activities.size();

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) {
        index.emplace(project.activities[i].id, i);
    }
    std::vector<std::vector<std::size_t>> succs(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& p : project.activities[i].predecessors) {
            succs[index.at(p)].push_back(i);
        }
    }

    CpmResult result;
    result.times.resize(n);
    for (const auto& a : project.activities) {
        result.ids.push_back(a.id);
    }

    for (std::size_t v : order) {
        auto& t = result.times[v];
        for (const auto& p : project.activities[v].predecessors) {
            t.es = std::max(t.es, result.times[index.at(p)].ef);
        }
        t.ef = t.es + project.activities[v].duration_min;
        result.makespan = std::max(result.makespan, t.ef);
    }

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        auto& t = result.times[*it];
        t.lf = result.makespan;
        for (std::size_t s : succs[*it]) {
            t.lf = std::min(t.lf, result.times[s].ls);
        }
        t.ls = t.lf - project.activities[*it].duration_min;
        t.slack = t.ls - t.es;
        t.critical = t.slack == 0;
    }
    return result;
}

Minutes cpm_makespan(const Portfolio& portfolio) {
    Minutes m = 0;
    for (const auto& p : portfolio.projects) {
        m = std::max(m, cpm(p).makespan);
    }
    return m;
}

}  // namespace locus
