#include <algorithm>
#include <limits>
#include <tuple>

#include "locus/error.hpp"
#include "locus/scheduler.hpp"
#include "sgs_engine.hpp"

namespace locus {

Minutes ScheduledActivity::travel_min() const {
    Minutes total = 0;
    for (const auto& leg : travel) {
        total += leg.arrive - leg.depart;
    }
    return total;
}

const ScheduledActivity* Schedule::find(const ActivityRef& ref) const {
    auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.ref == ref; });
    return it == entries.end() ? nullptr : &*it;
}

Minutes Schedule::project_finish(const std::string& project_id) const {
    Minutes finish = t0;
    for (const auto& e : entries) {
        if (e.ref.project == project_id) {
            finish = std::max(finish, e.finish);
        }
    }
    return finish;
}

std::vector<TravelLeg> Schedule::travel_legs() const {
    std::vector<TravelLeg> legs;
    for (const auto& e : entries) {
        legs.insert(legs.end(), e.travel.begin(), e.travel.end());
    }
    return legs;
}

namespace detail {

namespace {

struct Node {
    std::size_t project = 0;
    std::size_t activity = 0;
    ActivityRef ref;
    const Activity* data = nullptr;
    Minutes slack = 0;
    std::vector<std::size_t> preds;  // node indices still to be scheduled
    Minutes fixed_pred_finish = std::numeric_limits<Minutes>::min();
    bool done = false;
};

struct Candidate {
    const Resource* resource;
    Minutes ready;
    Minutes travel;
};

struct Plan {
    Minutes start = 0;
    std::vector<Candidate> chosen;
};

}  // namespace

void finalize(Schedule& schedule, const Portfolio& portfolio) {
    std::map<ActivityRef, std::pair<std::size_t, std::size_t>> rank;
    for (std::size_t p = 0; p < portfolio.projects.size(); ++p) {
        const auto& project = portfolio.projects[p];
        for (std::size_t a = 0; a < project.activities.size(); ++a) {
            rank[{project.id, project.activities[a].id}] = {p, a};
        }
    }
    std::sort(schedule.entries.begin(), schedule.entries.end(),
              [&](const auto& x, const auto& y) { return rank.at(x.ref) < rank.at(y.ref); });
    Minutes last = schedule.t0;
    schedule.total_travel_min = 0;
    for (const auto& e : schedule.entries) {
        last = std::max(last, e.finish);
        schedule.total_travel_min += e.travel_min();
    }
    schedule.makespan = last - schedule.t0;
}

Schedule run_sgs(const SgsInput& input) {
    const Portfolio& portfolio = *input.portfolio;

    std::vector<Node> nodes;
    std::map<ActivityRef, std::size_t> node_of;
    for (std::size_t p = 0; p < portfolio.projects.size(); ++p) {
        const auto& project = portfolio.projects[p];
        const CpmResult analysis = cpm(project);
        for (std::size_t a = 0; a < project.activities.size(); ++a) {
            ActivityRef ref{project.id, project.activities[a].id};
            if (input.fixed.contains(ref)) {
                continue;
            }
            Node node;
            node.project = p;
            node.activity = a;
            node.ref = ref;
            node.data = &project.activities[a];
            node.slack = analysis.times[a].slack;
            node_of.emplace(ref, nodes.size());
            nodes.push_back(std::move(node));
        }
    }
    for (auto& node : nodes) {
        for (const auto& pred : node.data->predecessors) {
            ActivityRef ref{node.ref.project, pred};
            if (auto it = input.fixed.find(ref); it != input.fixed.end()) {
                node.fixed_pred_finish = std::max(node.fixed_pred_finish, it->second.finish);
            } else {
                node.preds.push_back(node_of.at(ref));
            }
        }
    }

    std::map<std::string, std::vector<const Resource*>> by_type;
    for (const auto& r : portfolio.resources) {
        if (input.slots.contains(r.id)) {
            by_type[r.rtype].push_back(&r);
        }
    }

    std::map<std::string, ResourceSlot> slots = input.slots;
    std::vector<Minutes> finish_of(nodes.size(), 0);

    auto plan_for = [&](const Node& node) {
        const Activity& act = *node.data;
        Minutes need = std::max(input.release, node.fixed_pred_finish);
        for (std::size_t p : node.preds) {
            need = std::max(need, finish_of[p]);
        }
        if (act.committed_start) {
            need = std::max(need, *act.committed_start);
        }
        Plan plan;
        plan.start = need;
        for (const auto& [rtype, count] : act.demands) {
            auto it = by_type.find(rtype);
            const std::size_t have = it == by_type.end() ? 0 : it->second.size();
            if (have < static_cast<std::size_t>(count)) {
                throw Error(ErrorCode::Unsatisfiable, node.ref.str() + " needs " + std::to_string(count) + " x " +
                                                          rtype + ", usable pool has " + std::to_string(have));
            }
            std::vector<Candidate> cands;
            for (const Resource* r : it->second) {
                const auto& slot = slots.at(r->id);
                const Minutes travel = act.location ? travel_time(slot.pos, *act.location, r->speed_kmh) : 0;
                cands.push_back({r, slot.ready, travel});
            }
            // Resources free by the time the activity could start are preferred,
            // nearest first; otherwise the one that can arrive soonest.
            std::sort(cands.begin(), cands.end(), [&](const Candidate& x, const Candidate& y) {
                const bool ax = x.ready <= need;
                const bool ay = y.ready <= need;
                const auto kx = std::make_tuple(!ax, ax ? 0 : x.ready + x.travel, x.travel, std::cref(x.resource->id));
                const auto ky = std::make_tuple(!ay, ay ? 0 : y.ready + y.travel, y.travel, std::cref(y.resource->id));
                return kx < ky;
            });
            for (int k = 0; k < count; ++k) {
                const auto& c = cands[static_cast<std::size_t>(k)];
                plan.chosen.push_back(c);
                const Minutes ready_at = act.committed_start ? c.ready : c.ready + c.travel;
                plan.start = std::max(plan.start, ready_at);
            }
        }
        return plan;
    };

    Schedule out;
    out.t0 = input.t0;
    for (const auto& [ref, entry] : input.fixed) {
        out.entries.push_back(entry);
    }

    for (std::size_t step = 0; step < nodes.size(); ++step) {
        std::size_t best = nodes.size();
        Plan best_plan;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const Node& node = nodes[i];
            if (node.done || std::any_of(node.preds.begin(), node.preds.end(),
                                         [&](std::size_t p) { return !nodes[p].done; })) {
                continue;
            }
            Plan plan = plan_for(node);
            if (best == nodes.size()) {
                best = i;
                best_plan = std::move(plan);
                continue;
            }
            const Node& b = nodes[best];
            const auto key = std::make_tuple(node.slack, plan.start, node.project, std::cref(node.ref.activity));
            const auto best_key = std::make_tuple(b.slack, best_plan.start, b.project, std::cref(b.ref.activity));
            if (key < best_key) {
                best = i;
                best_plan = std::move(plan);
            }
        }
        if (best == nodes.size()) {
            throw Error(ErrorCode::Cycle, "no eligible activity left; precedence graph is cyclic");
        }

        Node& node = nodes[best];
        const Activity& act = *node.data;
        ScheduledActivity entry;
        entry.ref = node.ref;
        entry.start = best_plan.start;
        entry.work_min = act.duration_min;
        entry.finish = entry.start + entry.work_min;
        entry.state = EntryState::Planned;
        for (const auto& c : best_plan.chosen) {
            entry.assigned.push_back(c.resource->id);
            auto& slot = slots.at(c.resource->id);
            if (c.travel > 0) {
                entry.travel.push_back(TravelLeg{c.resource->id, slot.pos, *act.location, c.ready, c.ready + c.travel});
            }
            slot.ready = entry.finish;
            if (act.location) {
                slot.pos = *act.location;
            }
        }
        std::sort(entry.assigned.begin(), entry.assigned.end());
        std::sort(entry.travel.begin(), entry.travel.end(),
                  [](const TravelLeg& x, const TravelLeg& y) { return x.resource < y.resource; });
        finish_of[best] = entry.finish;
        node.done = true;
        out.entries.push_back(std::move(entry));
    }

    finalize(out, portfolio);
    return out;
}

}  // namespace detail

Schedule schedule(const Portfolio& portfolio, Minutes t0) {
    detail::SgsInput input;
    input.portfolio = &portfolio;
    input.t0 = t0;
    input.release = t0;
    for (const auto& r : portfolio.resources) {
        if (r.status == ResourceStatus::Available) {
            input.slots.emplace(r.id, detail::ResourceSlot{t0, r.current_position()});
        }
    }
    return detail::run_sgs(input);
}

}  // namespace locus
