#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "locus/geo.hpp"

namespace locus {

/// Unit of work. Activity ids are unique within their project.
struct Activity {
    std::string id;
    std::string name;
    Minutes duration_min = 1;
    std::optional<GeoPoint> location;  // absent: location-free desk work
    std::vector<std::string> predecessors;  // finish-to-start
    std::map<std::string, int> demands;     // resource type -> count
    double fixed_cost = 0.0;
    double progress = 0.0;
    std::optional<Minutes> baseline_start;
    std::optional<Minutes> baseline_finish;
    // Planner commitment: the activity starts at this time once predecessors
    // and assigned resources are free, without reserving time for transport.
    std::optional<Minutes> committed_start;

    friend bool operator==(const Activity&, const Activity&) = default;
};

enum class ResourceStatus { Available, Failed };

struct Resource {
    std::string id;
    std::string rtype;
    GeoPoint home{0.0, 0.0};
    std::optional<GeoPoint> position;       // latest known; falls back to home
    std::optional<Minutes> position_at;     // plan-clock time of the position fix
    double speed_kmh = 50.0;
    double rate_per_h = 0.0;
    ResourceStatus status = ResourceStatus::Available;

    const GeoPoint& current_position() const { return position ? *position : home; }

    friend bool operator==(const Resource&, const Resource&) = default;
};

struct Project {
    std::string id;
    std::string name;
    std::string epoch;  // ISO-8601 UTC, e.g. 2026-03-02T06:00:00Z
    std::vector<Activity> activities;
    std::string owner;
    std::set<std::string> visibility;

    const Activity* find(const std::string& activity_id) const;
    Activity* find(const std::string& activity_id);

    /// True if actor owns the project or is listed in its visibility set.
    bool visible_to(const std::string& actor) const;

    friend bool operator==(const Project&, const Project&) = default;
};

/// Projects in planning-priority order plus the shared resource pool.
struct Portfolio {
    std::vector<Project> projects;
    std::vector<Resource> resources;

    const Project* find_project(const std::string& id) const;
    Project* find_project(const std::string& id);
    const Resource* find_resource(const std::string& id) const;
    Resource* find_resource(const std::string& id);

    friend bool operator==(const Portfolio&, const Portfolio&) = default;
};

/// Project-qualified activity identifier.
struct ActivityRef {
    std::string project;
    std::string activity;

    std::string str() const { return project + "/" + activity; }

    friend auto operator<=>(const ActivityRef&, const ActivityRef&) = default;
    friend bool operator==(const ActivityRef&, const ActivityRef&) = default;
};

struct ValidationFinding {
    std::string code;    // CYCLE, UNSATISFIABLE_DEMAND, ...
    std::string entity;  // qualified id of the offending entity
    std::string message;

    friend bool operator==(const ValidationFinding&, const ValidationFinding&) = default;
};

/// Every invariant violation of the portfolio; empty means valid.
std::vector<ValidationFinding> validate(const Portfolio& portfolio);

/// Activity indices of a project in precedence order, ties broken by
/// position in the activity list. Throws Error(CYCLE) on cyclic input and
/// Error(UNKNOWN_ACTIVITY) on dangling predecessor ids.
std::vector<std::size_t> topological_order(const Project& project);

}  // namespace locus
