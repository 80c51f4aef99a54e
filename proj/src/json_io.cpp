#include "locus/json_io.hpp"

#include <initializer_list>

#include "locus/error.hpp"

namespace locus {

namespace {

void require_object(const Json& doc, std::string_view what) {
    if (!doc.is_object()) {
        throw Error(ErrorCode::ParseError, std::string(what) + " must be a JSON object");
    }
}

void check_fields(const Json& doc, std::initializer_list<std::string_view> known, std::string_view what,
                  const ParseOptions& options) {
    if (!options.strict) {
        return;
    }
    for (const auto& [key, value] : doc.items()) {
        bool ok = false;
        for (auto k : known) {
            ok = ok || key == k;
        }
        if (!ok) {
            throw Error(ErrorCode::UnknownField, std::string(what) + " has unknown field '" + key + "'");
        }
    }
}

template <typename T>
T get(const Json& doc, const char* key, std::string_view what) {
    auto it = doc.find(key);
    if (it == doc.end()) {
        throw Error(ErrorCode::ParseError, std::string(what) + " is missing '" + key + "'");
    }
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::ParseError, std::string(what) + " field '" + key + "' has the wrong type");
    }
}

template <typename T>
T get_or(const Json& doc, const char* key, T fallback, std::string_view what) {
    if (!doc.contains(key) || doc.at(key).is_null()) {
        return fallback;
    }
    return get<T>(doc, key, what);
}

template <typename T>
std::optional<T> get_opt(const Json& doc, const char* key, std::string_view what) {
    if (!doc.contains(key) || doc.at(key).is_null()) {
        return std::nullopt;
    }
    return get<T>(doc, key, what);
}

std::optional<GeoPoint> geopoint_opt(const Json& doc, const char* key) {
    if (!doc.contains(key) || doc.at(key).is_null()) {
        return std::nullopt;
    }
    return geopoint_from_json(doc.at(key));
}

Activity activity_from_json(const Json& doc, const ParseOptions& options) {
    require_object(doc, "activity");
    check_fields(doc,
                 {"id", "name", "duration_min", "location", "predecessors", "demands", "fixed_cost", "progress",
                  "baseline_start", "baseline_finish", "committed_start"},
                 "activity", options);
    Activity a;
    a.id = get<std::string>(doc, "id", "activity");
    const std::string what = "activity " + a.id;
    a.name = get_or<std::string>(doc, "name", a.id, what);
    a.duration_min = get<Minutes>(doc, "duration_min", what);
    a.location = geopoint_opt(doc, "location");
    a.predecessors = get_or<std::vector<std::string>>(doc, "predecessors", {}, what);
    a.demands = get_or<std::map<std::string, int>>(doc, "demands", {}, what);
    a.fixed_cost = get_or<double>(doc, "fixed_cost", 0.0, what);
    a.progress = get_or<double>(doc, "progress", 0.0, what);
    a.baseline_start = get_opt<Minutes>(doc, "baseline_start", what);
    a.baseline_finish = get_opt<Minutes>(doc, "baseline_finish", what);
    a.committed_start = get_opt<Minutes>(doc, "committed_start", what);
    return a;
}

ResourceStatus status_from_string(const std::string& s) {
    if (s == "available") {
        return ResourceStatus::Available;
    }
    if (s == "failed") {
        return ResourceStatus::Failed;
    }
    throw Error(ErrorCode::ParseError, "unknown resource status '" + s + "'");
}

EntryState entry_state_from_string(const std::string& s) {
    if (s == "planned") return EntryState::Planned;
    if (s == "in_progress") return EntryState::InProgress;
    if (s == "done") return EntryState::Done;
    throw Error(ErrorCode::ParseError, "unknown entry state '" + s + "'");
}

Json ref_json(const ActivityRef& ref) { return Json{{"project", ref.project}, {"activity", ref.activity}}; }

}  // namespace

std::string_view to_string(EntryState state) {
    switch (state) {
        case EntryState::Planned: return "planned";
        case EntryState::InProgress: return "in_progress";
        case EntryState::Done: return "done";
    }
    return "planned";
}

std::string_view to_string(ResourceStatus status) {
    return status == ResourceStatus::Failed ? "failed" : "available";
}

GeoPoint geopoint_from_json(const Json& doc) {
    require_object(doc, "coordinate");
    for (const char* key : {"lat", "lon"}) {
        if (!doc.contains(key) || !doc.at(key).is_number()) {
            throw Error(ErrorCode::ParseError, std::string("coordinate needs numeric '") + key + "'");
        }
    }
    return GeoPoint(doc.at("lat").get<double>(), doc.at("lon").get<double>());
}

Resource resource_from_json(const Json& doc, ParseOptions options) {
    require_object(doc, "resource");
    check_fields(doc, {"id", "rtype", "home", "position", "position_at", "speed_kmh", "rate_per_h", "status"},
                 "resource", options);
    Resource r;
    r.id = get<std::string>(doc, "id", "resource");
    const std::string what = "resource " + r.id;
    r.rtype = get<std::string>(doc, "rtype", what);
    if (!doc.contains("home")) {
        throw Error(ErrorCode::ParseError, what + " is missing 'home'");
    }
    r.home = geopoint_from_json(doc.at("home"));
    r.position = geopoint_opt(doc, "position");
    r.position_at = get_opt<Minutes>(doc, "position_at", what);
    r.speed_kmh = get_or<double>(doc, "speed_kmh", 50.0, what);
    r.rate_per_h = get_or<double>(doc, "rate_per_h", 0.0, what);
    r.status = status_from_string(get_or<std::string>(doc, "status", "available", what));
    return r;
}

Project project_from_json(const Json& doc, ParseOptions options) {
    require_object(doc, "project");
    check_fields(doc, {"id", "name", "epoch", "activities", "owner", "visibility"}, "project", options);
    Project p;
    p.id = get<std::string>(doc, "id", "project");
    const std::string what = "project " + p.id;
    p.name = get_or<std::string>(doc, "name", p.id, what);
    p.epoch = get_or<std::string>(doc, "epoch", "", what);
    p.owner = get_or<std::string>(doc, "owner", "", what);
    p.visibility = get_or<std::set<std::string>>(doc, "visibility", {}, what);
    if (doc.contains("activities")) {
        if (!doc.at("activities").is_array()) {
            throw Error(ErrorCode::ParseError, what + " 'activities' must be an array");
        }
        for (const auto& a : doc.at("activities")) {
            p.activities.push_back(activity_from_json(a, options));
        }
    }
    return p;
}

Portfolio portfolio_from_json(const Json& doc, ParseOptions options) {
    require_object(doc, "portfolio");
    check_fields(doc, {"projects", "resources"}, "portfolio", options);
    Portfolio portfolio;
    for (const char* key : {"projects", "resources"}) {
        if (doc.contains(key) && !doc.at(key).is_array()) {
            throw Error(ErrorCode::ParseError, std::string("'") + key + "' must be an array");
        }
    }
    if (doc.contains("projects")) {
        for (const auto& p : doc.at("projects")) {
            portfolio.projects.push_back(project_from_json(p, options));
        }
    }
    if (doc.contains("resources")) {
        for (const auto& r : doc.at("resources")) {
            portfolio.resources.push_back(resource_from_json(r, options));
        }
    }
    return portfolio;
}

Portfolio parse_portfolio(std::string_view bytes, ParseOptions options) {
    Json doc;
    try {
        doc = Json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    return portfolio_from_json(doc, options);
}

Json to_json(const GeoPoint& p) { return Json{{"lat", p.lat()}, {"lon", p.lon()}}; }

Json to_json(const Activity& a) {
    Json j{{"id", a.id},
           {"name", a.name},
           {"duration_min", a.duration_min},
           {"predecessors", a.predecessors},
           {"demands", a.demands},
           {"fixed_cost", a.fixed_cost},
           {"progress", a.progress}};
    if (a.location) j["location"] = to_json(*a.location);
    if (a.baseline_start) j["baseline_start"] = *a.baseline_start;
    if (a.baseline_finish) j["baseline_finish"] = *a.baseline_finish;
    if (a.committed_start) j["committed_start"] = *a.committed_start;
    return j;
}

Json to_json(const Resource& r) {
    Json j{{"id", r.id},
           {"rtype", r.rtype},
           {"home", to_json(r.home)},
           {"speed_kmh", r.speed_kmh},
           {"rate_per_h", r.rate_per_h},
           {"status", to_string(r.status)}};
    if (r.position) j["position"] = to_json(*r.position);
    if (r.position_at) j["position_at"] = *r.position_at;
    return j;
}

Json to_json(const Project& p) {
    Json acts = Json::array();
    for (const auto& a : p.activities) {
        acts.push_back(to_json(a));
    }
    return Json{{"id", p.id},       {"name", p.name},   {"epoch", p.epoch},
                {"owner", p.owner}, {"visibility", p.visibility}, {"activities", std::move(acts)}};
}

Json to_json(const Portfolio& p) {
    Json projects = Json::array();
    for (const auto& project : p.projects) {
        projects.push_back(to_json(project));
    }
    Json resources = Json::array();
    for (const auto& r : p.resources) {
        resources.push_back(to_json(r));
    }
    return Json{{"projects", std::move(projects)}, {"resources", std::move(resources)}};
}

std::string serialize_portfolio(const Portfolio& p) { return to_json(p).dump(2); }

Json to_json(const ValidationFinding& f) {
    return Json{{"code", f.code}, {"entity", f.entity}, {"message", f.message}};
}

Json to_json(const CpmResult& r) {
    Json acts = Json::array();
    for (std::size_t i = 0; i < r.ids.size(); ++i) {
        const auto& t = r.times[i];
        acts.push_back(Json{{"id", r.ids[i]},
                            {"es", t.es},
                            {"ef", t.ef},
                            {"ls", t.ls},
                            {"lf", t.lf},
                            {"slack", t.slack},
                            {"critical", t.critical}});
    }
    return Json{{"makespan", r.makespan}, {"activities", std::move(acts)}};
}

Json to_json(const TravelLeg& leg) {
    return Json{{"resource", leg.resource},
                {"from", to_json(leg.from)},
                {"to", to_json(leg.to)},
                {"depart", leg.depart},
                {"arrive", leg.arrive}};
}

Json to_json(const Schedule& s) {
    Json entries = Json::array();
    for (const auto& e : s.entries) {
        Json legs = Json::array();
        for (const auto& leg : e.travel) {
            legs.push_back(to_json(leg));
        }
        entries.push_back(Json{{"project", e.ref.project},
                               {"activity", e.ref.activity},
                               {"start", e.start},
                               {"finish", e.finish},
                               {"work_min", e.work_min},
                               {"state", to_string(e.state)},
                               {"assigned", e.assigned},
                               {"travel_legs", std::move(legs)}});
    }
    return Json{{"t0", s.t0},
                {"makespan", s.makespan},
                {"total_travel_min", s.total_travel_min},
                {"activities", std::move(entries)}};
}

Schedule schedule_from_json(const Json& doc) {
    require_object(doc, "schedule");
    Schedule s;
    s.t0 = get<Minutes>(doc, "t0", "schedule");
    s.makespan = get<Minutes>(doc, "makespan", "schedule");
    s.total_travel_min = get<Minutes>(doc, "total_travel_min", "schedule");
    for (const auto& e : doc.at("activities")) {
        ScheduledActivity entry;
        entry.ref = {get<std::string>(e, "project", "entry"), get<std::string>(e, "activity", "entry")};
        entry.start = get<Minutes>(e, "start", "entry");
        entry.finish = get<Minutes>(e, "finish", "entry");
        entry.work_min = get<Minutes>(e, "work_min", "entry");
        entry.state = entry_state_from_string(get<std::string>(e, "state", "entry"));
        entry.assigned = get<std::vector<std::string>>(e, "assigned", "entry");
        for (const auto& leg : e.at("travel_legs")) {
            entry.travel.push_back(TravelLeg{get<std::string>(leg, "resource", "leg"),
                                             geopoint_from_json(leg.at("from")), geopoint_from_json(leg.at("to")),
                                             get<Minutes>(leg, "depart", "leg"), get<Minutes>(leg, "arrive", "leg")});
        }
        s.entries.push_back(std::move(entry));
    }
    return s;
}

Json to_json(const CostReport& c) {
    Json acts = Json::array();
    for (const auto& a : c.activities) {
        acts.push_back(Json{{"project", a.ref.project},
                            {"activity", a.ref.activity},
                            {"labor", format_cents(a.labor)},
                            {"travel", format_cents(a.travel)},
                            {"fixed", format_cents(a.fixed)},
                            {"total", format_cents(a.total())}});
    }
    Json projects = Json::array();
    for (const auto& p : c.projects) {
        projects.push_back(Json{{"project", p.project},
                                {"labor", format_cents(p.labor)},
                                {"travel", format_cents(p.travel)},
                                {"fixed", format_cents(p.fixed)},
                                {"total", format_cents(p.total())}});
    }
    return Json{{"activities", std::move(acts)},
                {"projects", std::move(projects)},
                {"labor", format_cents(c.labor)},
                {"travel", format_cents(c.travel)},
                {"fixed", format_cents(c.fixed)},
                {"total", format_cents(c.total())}};
}

Json to_json(const Alert& a) {
    return std::visit(
        [](const auto& alert) -> Json {
            using T = std::decay_t<decltype(alert)>;
            if constexpr (std::is_same_v<T, TransferDelayWarning>) {
                return Json{{"kind", "TRANSFER_DELAY"},
                            {"resource", alert.resource},
                            {"from_activity", ref_json(alert.from_activity)},
                            {"to_activity", ref_json(alert.to_activity)},
                            {"depart", alert.depart},
                            {"gap_min", alert.gap_min},
                            {"travel_min", alert.travel_min},
                            {"shortfall_min", alert.shortfall_min}};
            } else if constexpr (std::is_same_v<T, BaselineSlip>) {
                return Json{{"kind", "BASELINE_SLIP"},
                            {"project", alert.project},
                            {"baseline_finish", alert.baseline_finish},
                            {"new_finish", alert.new_finish},
                            {"slip_min", alert.slip_min}};
            } else {
                Json affected = Json::array();
                for (const auto& ref : alert.affected) {
                    affected.push_back(ref_json(ref));
                }
                return Json{{"kind", "RESOURCE_FAILURE"},
                            {"resource", alert.resource},
                            {"affected", std::move(affected)},
                            {"replan_possible", alert.replan_possible}};
            }
        },
        a);
}

Alert alert_from_json(const Json& doc) {
    require_object(doc, "alert");
    const auto kind = get<std::string>(doc, "kind", "alert");
    auto ref = [](const Json& j) {
        return ActivityRef{get<std::string>(j, "project", "ref"), get<std::string>(j, "activity", "ref")};
    };
    if (kind == "TRANSFER_DELAY") {
        return TransferDelayWarning{get<std::string>(doc, "resource", "alert"), ref(doc.at("from_activity")),
                                    ref(doc.at("to_activity")),           get<Minutes>(doc, "depart", "alert"),
                                    get<Minutes>(doc, "gap_min", "alert"), get<Minutes>(doc, "travel_min", "alert"),
                                    get<Minutes>(doc, "shortfall_min", "alert")};
    }
    if (kind == "BASELINE_SLIP") {
        return BaselineSlip{get<std::string>(doc, "project", "alert"), get<Minutes>(doc, "baseline_finish", "alert"),
                            get<Minutes>(doc, "new_finish", "alert"), get<Minutes>(doc, "slip_min", "alert")};
    }
    if (kind == "RESOURCE_FAILURE") {
        ResourceFailure f;
        f.resource = get<std::string>(doc, "resource", "alert");
        for (const auto& r : doc.at("affected")) {
            f.affected.push_back(ref(r));
        }
        f.replan_possible = get<bool>(doc, "replan_possible", "alert");
        return f;
    }
    throw Error(ErrorCode::ParseError, "unknown alert kind '" + kind + "'");
}

Json to_json(const BucketResponse& r) {
    return Json{{"client", r.client}, {"bucket", r.bucket}, {"width_m", r.width_m}};
}

BucketResponse bucket_response_from_json(const Json& doc) {
    require_object(doc, "bucket response");
    BucketResponse r;
    r.client = get_or<std::string>(doc, "client", "", "bucket response");
    r.bucket = get<long long>(doc, "bucket", "bucket response");
    r.width_m = get_or<double>(doc, "width_m", kDefaultBucketWidthM, "bucket response");
    return r;
}

}  // namespace locus
