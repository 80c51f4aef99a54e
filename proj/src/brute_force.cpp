#include <algorithm>
#include <functional>
#include <limits>
#include <map>

#include "locus/error.hpp"
#include "locus/scheduler.hpp"

namespace locus {

namespace {

struct BfNode {
    const Activity* act = nullptr;
    std::vector<std::size_t> preds;
    std::vector<std::vector<std::size_t>> choices;  // alternative resource sets (pool indices)
};

struct BfResource {
    const Resource* res;
    Minutes ready;
    GeoPoint pos;
};

// All k-subsets of items, each sorted.
void combinations(const std::vector<std::size_t>& items, std::size_t k, std::size_t from,
                  std::vector<std::size_t>& current, std::vector<std::vector<std::size_t>>& out) {
    if (current.size() == k) {
        out.push_back(current);
        return;
    }
    for (std::size_t i = from; i < items.size(); ++i) {
        current.push_back(items[i]);
        combinations(items, k, i + 1, current, out);
        current.pop_back();
    }
}

}  // namespace

Minutes brute_force_optimum(const Portfolio& portfolio, Minutes t0, BruteForceCaps caps) {
    std::vector<BfResource> pool;
    for (const auto& r : portfolio.resources) {
        if (r.status == ResourceStatus::Available) {
            pool.push_back({&r, t0, r.current_position()});
        }
    }
    std::size_t activity_count = 0;
    for (const auto& p : portfolio.projects) {
        activity_count += p.activities.size();
    }
    if (activity_count > caps.max_activities || pool.size() > caps.max_resources) {
        throw Error(ErrorCode::CapExceeded, std::to_string(activity_count) + " activities, " +
                                                std::to_string(pool.size()) + " resources exceed the oracle caps");
    }

    std::vector<BfNode> nodes;
    for (const auto& project : portfolio.projects) {
        topological_order(project);  // rejects cycles and dangling ids
        const std::size_t base = nodes.size();
        for (const auto& a : project.activities) {
            BfNode node;
            node.act = &a;
            for (const auto& pred : a.predecessors) {
                for (std::size_t j = 0; j < project.activities.size(); ++j) {
                    if (project.activities[j].id == pred) {
                        node.preds.push_back(base + j);
                    }
                }
            }
            // Cartesian product over demanded types of k-subsets of that type.
            std::vector<std::vector<std::size_t>> partial{{}};
            for (const auto& [rtype, count] : a.demands) {
                std::vector<std::size_t> of_type;
                for (std::size_t i = 0; i < pool.size(); ++i) {
                    if (pool[i].res->rtype == rtype) {
                        of_type.push_back(i);
                    }
                }
                if (of_type.size() < static_cast<std::size_t>(count)) {
                    throw Error(ErrorCode::Unsatisfiable, project.id + "/" + a.id + " needs " +
                                                              std::to_string(count) + " x " + rtype);
                }
                std::vector<std::vector<std::size_t>> subsets;
                std::vector<std::size_t> current;
                combinations(of_type, static_cast<std::size_t>(count), 0, current, subsets);
                std::vector<std::vector<std::size_t>> next;
                for (const auto& head : partial) {
                    for (const auto& s : subsets) {
                        auto merged = head;
                        merged.insert(merged.end(), s.begin(), s.end());
                        next.push_back(std::move(merged));
                    }
                }
                partial = std::move(next);
            }
            node.choices = std::move(partial);
            nodes.push_back(std::move(node));
        }
    }

    const std::size_t n = nodes.size();
    std::vector<bool> placed(n, false);
    std::vector<Minutes> finish(n, 0);
    Minutes best = std::numeric_limits<Minutes>::max();

    // Precedence-only lower bound on the final finish given what is placed.
    auto lower_bound = [&](Minutes current) {
        std::vector<Minutes> head(n, 0);
        std::vector<bool> known(n, false);
        std::function<Minutes(std::size_t)> earliest = [&](std::size_t v) -> Minutes {
            if (known[v]) {
                return head[v];
            }
            Minutes h = t0;
            if (nodes[v].act->committed_start) {
                h = std::max(h, *nodes[v].act->committed_start);
            }
            for (std::size_t p : nodes[v].preds) {
                h = std::max(h, placed[p] ? finish[p] : earliest(p) + nodes[p].act->duration_min);
            }
            known[v] = true;
            head[v] = h;
            return h;
        };
        Minutes lb = current;
        for (std::size_t v = 0; v < n; ++v) {
            if (!placed[v]) {
                lb = std::max(lb, earliest(v) + nodes[v].act->duration_min);
            }
        }
        return lb;
    };

    std::function<void(std::size_t, Minutes)> search = [&](std::size_t depth, Minutes current) {
        if (depth == n) {
            best = std::min(best, current);
            return;
        }
        if (lower_bound(current) >= best) {
            return;
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (placed[v] || std::any_of(nodes[v].preds.begin(), nodes[v].preds.end(),
                                         [&](std::size_t p) { return !placed[p]; })) {
                continue;
            }
            const Activity& act = *nodes[v].act;
            Minutes need = t0;
            for (std::size_t p : nodes[v].preds) {
                need = std::max(need, finish[p]);
            }
            if (act.committed_start) {
                need = std::max(need, *act.committed_start);
            }
            for (const auto& choice : nodes[v].choices) {
                Minutes start = need;
                for (std::size_t r : choice) {
                    const auto& slot = pool[r];
                    const Minutes travel = act.location ? travel_time(slot.pos, *act.location, slot.res->speed_kmh) : 0;
                    start = std::max(start, act.committed_start ? slot.ready : slot.ready + travel);
                }
                const Minutes end = start + act.duration_min;

                std::vector<BfResource> saved;
                for (std::size_t r : choice) {
                    saved.push_back(pool[r]);
                    pool[r].ready = end;
                    if (act.location) {
                        pool[r].pos = *act.location;
                    }
                }
                placed[v] = true;
                finish[v] = end;
                search(depth + 1, std::max(current, end));
                placed[v] = false;
                for (std::size_t i = 0; i < choice.size(); ++i) {
                    pool[choice[i]] = saved[i];
                }
            }
        }
    };

    search(0, t0);
    return best - t0;
}

}  // namespace locus
