#include "locus/model.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "locus/error.hpp"

namespace locus {

const Activity* Project::find(const std::string& activity_id) const {
    auto it = std::find_if(activities.begin(), activities.end(),
                           [&](const Activity& a) { return a.id == activity_id; });
    return it == activities.end() ? nullptr : &*it;
}

Activity* Project::find(const std::string& activity_id) {
    return const_cast<Activity*>(std::as_const(*this).find(activity_id));
}

bool Project::visible_to(const std::string& actor) const {
    return actor == owner || visibility.contains(actor);
}

const Project* Portfolio::find_project(const std::string& id) const {
    auto it = std::find_if(projects.begin(), projects.end(), [&](const Project& p) { return p.id == id; });
    return it == projects.end() ? nullptr : &*it;
}

Project* Portfolio::find_project(const std::string& id) {
    return const_cast<Project*>(std::as_const(*this).find_project(id));
}

const Resource* Portfolio::find_resource(const std::string& id) const {
    auto it = std::find_if(resources.begin(), resources.end(), [&](const Resource& r) { return r.id == id; });
    return it == resources.end() ? nullptr : &*it;
}

Resource* Portfolio::find_resource(const std::string& id) {
    return const_cast<Resource*>(std::as_const(*this).find_resource(id));
}

namespace {

// Predecessor edges as indices; unresolved ids are dropped (reported elsewhere).
std::vector<std::vector<std::size_t>> predecessor_indices(const Project& project) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < project.activities.size(); ++i) {
        index.emplace(project.activities[i].id, i);
    }
    std::vector<std::vector<std::size_t>> preds(project.activities.size());
    for (std::size_t i = 0; i < project.activities.size(); ++i) {
        for (const auto& p : project.activities[i].predecessors) {
            if (auto it = index.find(p); it != index.end()) {
                preds[i].push_back(it->second);
            }
        }
    }
    return preds;
}

// Strongly connected components that contain a cycle (size > 1 or self-loop).
std::vector<std::vector<std::size_t>> cyclic_components(const std::vector<std::vector<std::size_t>>& preds) {
    const std::size_t n = preds.size();
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> out;
    int counter = 0;

    std::function<void(std::size_t)> strongconnect = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (std::size_t w : preds[v]) {
            if (index[w] < 0) {
                strongconnect(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::size_t> comp;
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp.push_back(w);
            } while (w != v);
            const bool self_loop = std::find(preds[v].begin(), preds[v].end(), v) != preds[v].end();
            if (comp.size() > 1 || self_loop) {
                std::sort(comp.begin(), comp.end());
                out.push_back(std::move(comp));
            }
        }
    };
    for (std::size_t v = 0; v < n; ++v) {
        if (index[v] < 0) {
            strongconnect(v);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string fmt_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

std::vector<std::size_t> topological_order(const Project& project) {
    const std::size_t n = project.activities.size();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) {
        index.emplace(project.activities[i].id, i);
    }
    std::vector<std::vector<std::size_t>> succs(n);
    std::vector<std::size_t> indegree(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& p : project.activities[i].predecessors) {
            auto it = index.find(p);
            if (it == index.end()) {
                throw Error(ErrorCode::UnknownActivity, project.id + "/" + p);
            }
            succs[it->second].push_back(i);
            ++indegree[i];
        }
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) {
            ready.push(i);
        }
    }
    std::vector<std::size_t> order;
    order.reserve(n);
    while (!ready.empty()) {
        const std::size_t v = ready.top();
        ready.pop();
        order.push_back(v);
        for (std::size_t s : succs[v]) {
            if (--indegree[s] == 0) {
                ready.push(s);
            }
        }
    }
    if (order.size() != n) {
        throw Error(ErrorCode::Cycle, "precedence cycle in project " + project.id);
    }
    return order;
}

std::vector<ValidationFinding> validate(const Portfolio& portfolio) {
    std::vector<ValidationFinding> findings;
    auto add = [&](std::string code, std::string entity, std::string message) {
        findings.push_back({std::move(code), std::move(entity), std::move(message)});
    };

    std::map<std::string, int> pool;  // available units per resource type
    std::set<std::string> resource_ids;
    for (const auto& r : portfolio.resources) {
        if (!resource_ids.insert(r.id).second) {
            add("DUPLICATE_ID", r.id, "resource id is not unique");
        }
        if (!(r.speed_kmh > 0.0)) {
            add("SPEED_RANGE", r.id, "speed_kmh must be positive, got " + fmt_num(r.speed_kmh));
        }
        if (!(r.rate_per_h >= 0.0)) {
            add("RATE_RANGE", r.id, "rate_per_h must be non-negative, got " + fmt_num(r.rate_per_h));
        }
        if (r.status == ResourceStatus::Available) {
            ++pool[r.rtype];
        } else {
            pool.try_emplace(r.rtype, 0);
        }
    }

    std::set<std::string> project_ids;
    std::string epoch;
    for (const auto& project : portfolio.projects) {
        if (!project_ids.insert(project.id).second) {
            add("DUPLICATE_ID", project.id, "project id is not unique");
        }
        if (!project.epoch.empty()) {
            if (epoch.empty()) {
                epoch = project.epoch;
            } else if (epoch != project.epoch) {
                add("EPOCH_MISMATCH", project.id, "epoch " + project.epoch + " differs from " + epoch);
            }
        }

        std::set<std::string> activity_ids;
        for (const auto& a : project.activities) {
            const std::string qid = project.id + "/" + a.id;
            if (!activity_ids.insert(a.id).second) {
                add("DUPLICATE_ID", qid, "activity id is not unique within project");
            }
        }
        for (const auto& a : project.activities) {
            const std::string qid = project.id + "/" + a.id;
            if (a.duration_min < 1) {
                add("DURATION_RANGE", qid, "duration_min must be >= 1, got " + std::to_string(a.duration_min));
            }
            if (!(a.progress >= 0.0 && a.progress <= 1.0)) {
                add("PROGRESS_RANGE", qid, "progress must lie in [0,1], got " + fmt_num(a.progress));
            }
            if (!(a.fixed_cost >= 0.0)) {
                add("COST_RANGE", qid, "fixed_cost must be non-negative");
            }
            for (const auto& p : a.predecessors) {
                if (!activity_ids.contains(p)) {
                    add("UNKNOWN_PREDECESSOR", qid, "predecessor " + p + " does not exist");
                }
            }
            for (const auto& [rtype, count] : a.demands) {
                if (count < 1) {
                    add("DEMAND_RANGE", qid, "demand for " + rtype + " must be >= 1");
                    continue;
                }
                auto it = pool.find(rtype);
                const int have = it == pool.end() ? 0 : it->second;
                if (have < count) {
                    add("UNSATISFIABLE_DEMAND", qid,
                        "needs " + std::to_string(count) + " x " + rtype + ", pool has " + std::to_string(have));
                }
            }
        }

        for (const auto& comp : cyclic_components(predecessor_indices(project))) {
            std::string ids;
            for (std::size_t i : comp) {
                if (!ids.empty()) {
                    ids += ",";
                }
                ids += project.activities[i].id;
            }
            add("CYCLE", project.id + "/" + project.activities[comp.front()].id, "precedence cycle through " + ids);
        }
    }
    return findings;
}

}  // namespace locus
