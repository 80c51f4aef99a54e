#include "locus/server/state.hpp"

#include <algorithm>
#include <cstdio>

#include "locus/error.hpp"

namespace locus::server {

std::vector<const Project*> ServerState::scope_of(const std::string& client) const {
    std::vector<const Project*> out;
    for (const auto& p : portfolio.projects) {
        if (p.visible_to(client)) {
            out.push_back(&p);
        }
    }
    return out;
}

namespace {

template <typename T>
T field(const Json& payload, const char* key) {
    auto it = payload.find(key);
    if (it == payload.end()) {
        throw Error(ErrorCode::InvalidEvent, std::string("payload is missing '") + key + "'");
    }
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::InvalidEvent, std::string("payload field '") + key + "' has the wrong type");
    }
}

template <typename T>
std::optional<T> field_opt(const Json& payload, const char* key) {
    if (!payload.contains(key) || payload.at(key).is_null()) {
        return std::nullopt;
    }
    return field<T>(payload, key);
}

bool owns_any_project(const ServerState& s, const std::string& actor) {
    return std::any_of(s.portfolio.projects.begin(), s.portfolio.projects.end(),
                       [&](const Project& p) { return p.owner == actor; });
}

const ClientSession* session_of(const ServerState& s, const std::string& client) {
    auto it = s.sessions.find(client);
    return it == s.sessions.end() ? nullptr : &it->second;
}

Project& project_in_scope(ServerState& s, const std::string& project_id, const std::string& actor, bool check) {
    Project* p = s.portfolio.find_project(project_id);
    if (!p) {
        throw Error(ErrorCode::UnknownEntity, "project " + project_id);
    }
    if (check && !p->visible_to(actor)) {
        throw Error(ErrorCode::ScopeViolation, actor + " has no access to project " + project_id);
    }
    return *p;
}

Resource& resource_by_id(ServerState& s, const std::string& id) {
    Resource* r = s.portfolio.find_resource(id);
    if (!r) {
        throw Error(ErrorCode::UnknownEntity, "resource " + id);
    }
    return *r;
}

void advance_clock(ServerState& s, const Json& payload) {
    if (auto t = field_opt<Minutes>(payload, "t")) {
        s.now = std::max(s.now, *t);
    }
}

// Re-plans the current schedule from the baseline and the latest progress.
void refresh_plan(ServerState& s) {
    s.alerts.clear();
    if (!s.baseline) {
        s.current.reset();
        return;
    }
    const Minutes t_now = std::max(s.now, s.baseline->t0);
    try {
        ReplanResult r = replan(s.portfolio, *s.baseline, t_now);
        s.current = std::move(r.schedule);
        s.alerts = std::move(r.alerts);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::Unsatisfiable) {
            throw;
        }
        // Keep the last feasible plan; report what the failures broke.
        for (const auto& r : s.portfolio.resources) {
            if (r.status != ResourceStatus::Failed) {
                continue;
            }
            ResourceFailure failure{r.id, {}, false};
            for (const auto& entry : s.baseline->entries) {
                const Project* p = s.portfolio.find_project(entry.ref.project);
                const Activity* a = p ? p->find(entry.ref.activity) : nullptr;
                if (a && a->progress < 1.0 &&
                    std::find(entry.assigned.begin(), entry.assigned.end(), r.id) != entry.assigned.end()) {
                    failure.affected.push_back(entry.ref);
                }
            }
            s.alerts.emplace_back(std::move(failure));
        }
    }
    if (s.current) {
        for (auto& w : transfer_warnings(*s.current, s.portfolio)) {
            s.alerts.emplace_back(std::move(w));
        }
    }
}

void merge_plan(ServerState& s, const Event& e, bool authoritative) {
    const Json& payload = e.payload;
    if (payload.contains("resources")) {
        if (!payload.at("resources").is_array()) {
            throw Error(ErrorCode::InvalidEvent, "'resources' must be an array");
        }
        for (const auto& doc : payload.at("resources")) {
            Resource r = resource_from_json(doc);
            if (Resource* existing = s.portfolio.find_resource(r.id)) {
                *existing = std::move(r);
            } else {
                s.portfolio.resources.push_back(std::move(r));
            }
        }
    }
    if (payload.contains("projects")) {
        if (!payload.at("projects").is_array()) {
            throw Error(ErrorCode::InvalidEvent, "'projects' must be an array");
        }
        for (const auto& doc : payload.at("projects")) {
            Project p = project_from_json(doc);
            if (Project* existing = s.portfolio.find_project(p.id)) {
                if (authoritative && existing->owner != e.actor) {
                    throw Error(ErrorCode::ScopeViolation, e.actor + " does not own project " + p.id);
                }
                // Progress never goes backwards, not even through a re-plan.
                for (auto& a : p.activities) {
                    if (const Activity* old = existing->find(a.id)) {
                        a.progress = std::max(a.progress, old->progress);
                    }
                }
                *existing = std::move(p);
            } else {
                s.portfolio.projects.push_back(std::move(p));
            }
        }
    }
    if (auto t0 = field_opt<Minutes>(payload, "t0")) {
        s.t0 = *t0;
    }
}

void apply_plan_upsert(ServerState& s, const Event& e, bool authoritative) {
    merge_plan(s, e, authoritative);
    if (!authoritative) {
        return;
    }
    const auto findings = validate(s.portfolio);
    if (!findings.empty()) {
        throw Error(ErrorCode::InvalidPlan, findings.front().code + " " + findings.front().entity + ": " +
                                                findings.front().message);
    }
    try {
        s.baseline = schedule(s.portfolio, s.t0);
    } catch (const Error& err) {
        throw Error(ErrorCode::InvalidPlan, err.what());
    }
    refresh_plan(s);
}

void apply_progress(ServerState& s, const Event& e, bool authoritative) {
    const auto project_id = field<std::string>(e.payload, "project");
    const auto activity_id = field<std::string>(e.payload, "activity");
    const auto progress = field<double>(e.payload, "progress");
    if (!(progress >= 0.0 && progress <= 1.0)) {
        throw Error(ErrorCode::InvalidEvent, "progress must lie in [0,1]");
    }
    Project& project = project_in_scope(s, project_id, e.actor, authoritative);
    Activity* act = project.find(activity_id);
    if (!act) {
        throw Error(ErrorCode::UnknownActivity, project_id + "/" + activity_id);
    }
    if (progress < act->progress) {
        throw Error(ErrorCode::ProgressRegression, project_id + "/" + activity_id + " is already at " +
                                                       std::to_string(act->progress));
    }
    act->progress = progress;
    advance_clock(s, e.payload);
    if (authoritative) {
        refresh_plan(s);
    }
}

void apply_position(ServerState& s, const Event& e, bool authoritative) {
    const auto resource_id = field<std::string>(e.payload, "resource");
    if (!e.payload.contains("position")) {
        throw Error(ErrorCode::InvalidEvent, "payload is missing 'position'");
    }
    const GeoPoint pos = geopoint_from_json(e.payload.at("position"));
    if (authoritative) {
        resource_by_id(s, resource_id);
        const ClientSession* session = session_of(s, e.actor);
        if (!session || session->resource != resource_id) {
            throw Error(ErrorCode::ScopeViolation, e.actor + " is not bound to resource " + resource_id);
        }
    }
    advance_clock(s, e.payload);
    s.reported_positions.insert_or_assign(resource_id, pos);
    if (Resource* r = s.portfolio.find_resource(resource_id)) {
        r->position = pos;
        r->position_at = field_opt<Minutes>(e.payload, "t").value_or(s.now);
    }
}

void apply_status(ServerState& s, const Event& e, bool authoritative) {
    const auto resource_id = field<std::string>(e.payload, "resource");
    const auto status_name = field<std::string>(e.payload, "status");
    if (status_name != "failed" && status_name != "available") {
        throw Error(ErrorCode::InvalidEvent, "status must be 'failed' or 'available'");
    }
    if (authoritative) {
        resource_by_id(s, resource_id);
        const ClientSession* session = session_of(s, e.actor);
        const bool bound = session && session->resource == resource_id;
        if (!bound && !owns_any_project(s, e.actor)) {
            throw Error(ErrorCode::ScopeViolation, e.actor + " may not change resource " + resource_id);
        }
    }
    advance_clock(s, e.payload);
    if (Resource* r = s.portfolio.find_resource(resource_id)) {
        r->status = status_name == "failed" ? ResourceStatus::Failed : ResourceStatus::Available;
    }
    if (authoritative) {
        refresh_plan(s);
    }
}

void apply_message(ServerState& s, const Event& e, const ApplyOptions& options) {
    const bool authoritative = options.mode == ApplyMode::Authoritative;
    Message m;
    m.id = field_opt<std::string>(e.payload, "id").value_or("m" + std::to_string(e.seq));
    m.text = field<std::string>(e.payload, "text");
    m.activity = {field<std::string>(e.payload, "project"), field<std::string>(e.payload, "activity")};
    m.author = e.actor;
    m.created_seq = e.seq;
    m.radius_m = field_opt<double>(e.payload, "radius_m").value_or(kDefaultGeofenceRadiusM);
    if (!(m.radius_m > 0.0)) {
        throw Error(ErrorCode::InvalidEvent, "radius_m must be positive");
    }
    if (!authoritative) {
        m.recipients = {options.viewer};
        s.messages.push_back(std::move(m));
        return;
    }
    if (m.text.empty()) {
        throw Error(ErrorCode::InvalidEvent, "message text is empty");
    }
    const Project& project = project_in_scope(s, m.activity.project, e.actor, true);
    const Activity* act = project.find(m.activity.activity);
    if (!act) {
        throw Error(ErrorCode::UnknownActivity, m.activity.str());
    }
    std::map<std::string, std::optional<GeoPoint>> latest;
    for (const auto& [client, session] : s.sessions) {
        if (!project.visible_to(client)) {
            continue;
        }
        std::optional<GeoPoint> pos;
        if (session.resource) {
            if (auto it = s.reported_positions.find(*session.resource); it != s.reported_positions.end()) {
                pos = it->second;
            }
        }
        latest.emplace(client, pos);
    }
    const auto recipients = distribute_message(act->location, m.radius_m, latest);
    m.recipients.assign(recipients.begin(), recipients.end());
    s.messages.push_back(std::move(m));
}

void apply_query(ServerState& s, const Event& e, bool authoritative) {
    ProximityQuery q;
    q.id = field_opt<std::string>(e.payload, "query_id").value_or("q" + std::to_string(e.seq));
    q.poi = {field<std::string>(e.payload, "project"), field<std::string>(e.payload, "activity")};
    q.width_m = field_opt<double>(e.payload, "width_m").value_or(kDefaultBucketWidthM);
    q.issuer = e.actor;
    q.seq = e.seq;
    if (authoritative) {
        if (!(q.width_m > 0.0)) {
            throw Error(ErrorCode::InvalidEvent, "width_m must be positive");
        }
        if (s.queries.contains(q.id)) {
            throw Error(ErrorCode::InvalidEvent, "duplicate query id " + q.id);
        }
        const Project& project = project_in_scope(s, q.poi.project, e.actor, true);
        const Activity* act = project.find(q.poi.activity);
        if (!act) {
            throw Error(ErrorCode::UnknownActivity, q.poi.str());
        }
        if (!act->location) {
            throw Error(ErrorCode::InvalidEvent, q.poi.str() + " has no location to measure against");
        }
        for (const auto& [client, session] : s.sessions) {
            if (session.resource) {
                q.eligible.push_back(client);
            }
        }
    }
    s.queries.insert_or_assign(q.id, std::move(q));
}

void apply_response(ServerState& s, const Event& e, bool authoritative) {
    for (const auto& [key, value] : e.payload.items()) {
        if (key != "query_id" && key != "bucket" && key != "width_m") {
            throw Error(ErrorCode::InvalidEvent, "proximity responses carry only query_id, bucket and width_m");
        }
    }
    const auto query_id = field<std::string>(e.payload, "query_id");
    BucketResponse r;
    r.client = e.actor;
    r.bucket = field<long long>(e.payload, "bucket");
    r.width_m = field<double>(e.payload, "width_m");
    auto it = s.queries.find(query_id);
    if (it == s.queries.end()) {
        if (!authoritative) {
            return;
        }
        throw Error(ErrorCode::UnknownEntity, "proximity query " + query_id);
    }
    ProximityQuery& q = it->second;
    if (authoritative) {
        if (r.bucket < 1) {
            throw Error(ErrorCode::InvalidEvent, "bucket must be >= 1");
        }
        if (r.width_m != q.width_m) {
            throw Error(ErrorCode::InvalidEvent, "bucket width does not match the query");
        }
        if (std::find(q.eligible.begin(), q.eligible.end(), e.actor) == q.eligible.end()) {
            throw Error(ErrorCode::ScopeViolation, e.actor + " was not asked in " + query_id);
        }
        if (std::any_of(q.responses.begin(), q.responses.end(),
                        [&](const BucketResponse& x) { return x.client == e.actor; })) {
            throw Error(ErrorCode::InvalidEvent, e.actor + " already answered " + query_id);
        }
    }
    q.responses.push_back(std::move(r));
}

void apply_session(ServerState& s, const Event& e, bool authoritative) {
    ClientSession session{e.actor, field_opt<std::string>(e.payload, "resource")};
    if (authoritative && session.resource) {
        resource_by_id(s, *session.resource);
        for (const auto& [client, other] : s.sessions) {
            if (client != e.actor && other.resource == session.resource) {
                throw Error(ErrorCode::ScopeViolation, "resource " + *session.resource + " is bound to " + client);
            }
        }
    }
    s.sessions.insert_or_assign(e.actor, std::move(session));
}

}  // namespace

ServerState apply_event(ServerState state, const Event& event, const ApplyOptions& options) {
    const bool authoritative = options.mode == ApplyMode::Authoritative;
    if (authoritative && event.seq <= state.last_seq) {
        throw Error(ErrorCode::InvalidEvent, "seq " + std::to_string(event.seq) + " is not after " +
                                                 std::to_string(state.last_seq));
    }
    switch (event.kind) {
        case EventKind::PlanUpsert: apply_plan_upsert(state, event, authoritative); break;
        case EventKind::ProgressReport: apply_progress(state, event, authoritative); break;
        case EventKind::PositionUpdate: apply_position(state, event, authoritative); break;
        case EventKind::StatusChange: apply_status(state, event, authoritative); break;
        case EventKind::MessagePost: apply_message(state, event, options); break;
        case EventKind::ProximityQuery: apply_query(state, event, authoritative); break;
        case EventKind::ProximityResponse: apply_response(state, event, authoritative); break;
        case EventKind::SessionOpen: apply_session(state, event, authoritative); break;
    }
    state.last_seq = std::max(state.last_seq, event.seq);
    return state;
}

std::set<std::string> distribute_message(const std::optional<GeoPoint>& site, double radius_m,
                                         const std::map<std::string, std::optional<GeoPoint>>& latest_positions) {
    std::set<std::string> out;
    if (!site) {
        for (const auto& [client, pos] : latest_positions) {
            out.insert(client);
        }
        return out;
    }
    const Geofence fence(*site, radius_m);
    for (const auto& [client, pos] : latest_positions) {
        if (pos && within_geofence(*pos, fence)) {
            out.insert(client);
        }
    }
    return out;
}

std::vector<Event> sync_pull(const ServerState& state, std::span<const Event> log, const std::string& client,
                             std::uint64_t since_seq) {
    const ClientSession* session = session_of(state, client);
    if (!session) {
        throw Error(ErrorCode::UnknownSession, client);
    }
    auto in_scope = [&](const std::string& project_id) {
        const Project* p = state.portfolio.find_project(project_id);
        return p && p->visible_to(client);
    };
    auto own_resource = [&](const std::string& resource_id) { return session->resource == resource_id; };

    std::vector<Event> out;
    for (const Event& e : log) {
        if (e.seq <= since_seq) {
            continue;
        }
        const Json& p = e.payload;
        switch (e.kind) {
            case EventKind::PlanUpsert: {
                Event copy = e;
                Json projects = Json::array();
                for (const auto& doc : p.value("projects", Json::array())) {
                    if (in_scope(doc.value("id", std::string{}))) {
                        projects.push_back(doc);
                    }
                }
                Json resources = Json::array();
                for (const auto& doc : p.value("resources", Json::array())) {
                    if (!session->resource || own_resource(doc.value("id", std::string{}))) {
                        resources.push_back(doc);
                    }
                }
                if (projects.empty() && resources.empty()) {
                    break;
                }
                copy.payload = Json::object();
                copy.payload["projects"] = std::move(projects);
                copy.payload["resources"] = std::move(resources);
                if (p.contains("t0")) {
                    copy.payload["t0"] = p.at("t0");
                }
                out.push_back(std::move(copy));
                break;
            }
            case EventKind::ProgressReport:
                if (in_scope(p.value("project", std::string{}))) {
                    out.push_back(e);
                }
                break;
            case EventKind::PositionUpdate:
                if (own_resource(p.value("resource", std::string{}))) {
                    out.push_back(e);
                }
                break;
            case EventKind::StatusChange:
                if (!session->resource || own_resource(p.value("resource", std::string{}))) {
                    out.push_back(e);
                }
                break;
            case EventKind::MessagePost: {
                auto it = std::find_if(state.messages.begin(), state.messages.end(),
                                       [&](const Message& m) { return m.created_seq == e.seq; });
                if (it != state.messages.end() &&
                    std::binary_search(it->recipients.begin(), it->recipients.end(), client)) {
                    out.push_back(e);
                }
                break;
            }
            case EventKind::ProximityQuery: {
                auto it = std::find_if(state.queries.begin(), state.queries.end(),
                                       [&](const auto& kv) { return kv.second.seq == e.seq; });
                if (it == state.queries.end()) {
                    break;
                }
                const ProximityQuery& q = it->second;
                const bool asked = std::find(q.eligible.begin(), q.eligible.end(), client) != q.eligible.end();
                if (!asked && q.issuer != client) {
                    break;
                }
                // Responders need the POI; it is project data, attached on delivery only.
                Event copy = e;
                copy.payload["query_id"] = q.id;
                copy.payload["width_m"] = q.width_m;
                if (const Project* proj = state.portfolio.find_project(q.poi.project)) {
                    if (const Activity* act = proj->find(q.poi.activity); act && act->location) {
                        copy.payload["poi"] = to_json(*act->location);
                    }
                }
                out.push_back(std::move(copy));
                break;
            }
            case EventKind::ProximityResponse: {
                auto it = state.queries.find(p.value("query_id", std::string{}));
                if (e.actor == client || (it != state.queries.end() && it->second.issuer == client)) {
                    out.push_back(e);
                }
                break;
            }
            case EventKind::SessionOpen:
                if (e.actor == client) {
                    out.push_back(e);
                }
                break;
        }
    }
    return out;
}

Json client_view(const ServerState& state, const std::string& client) {
    Json projects = Json::array();
    for (const Project* p : state.scope_of(client)) {
        projects.push_back(to_json(*p));
    }
    std::sort(projects.begin(), projects.end(),
              [](const Json& a, const Json& b) { return a.at("id").get<std::string>() < b.at("id").get<std::string>(); });
    Json position = nullptr;
    if (auto it = state.sessions.find(client); it != state.sessions.end() && it->second.resource) {
        if (auto pos = state.reported_positions.find(*it->second.resource); pos != state.reported_positions.end()) {
            position = to_json(pos->second);
        }
    }
    Json messages = Json::array();
    for (const auto& m : state.messages) {
        if (std::find(m.recipients.begin(), m.recipients.end(), client) != m.recipients.end()) {
            messages.push_back(Json{{"id", m.id},
                                    {"text", m.text},
                                    {"project", m.activity.project},
                                    {"activity", m.activity.activity}});
        }
    }
    return Json{{"projects", std::move(projects)}, {"position", std::move(position)}, {"messages", std::move(messages)}};
}

Json state_to_json(const ServerState& s) {
    Json alerts = Json::array();
    for (const auto& a : s.alerts) {
        alerts.push_back(to_json(a));
    }
    Json sessions = Json::array();
    for (const auto& [id, session] : s.sessions) {
        Json j{{"client", session.client}};
        j["resource"] = session.resource ? Json(*session.resource) : Json(nullptr);
        sessions.push_back(std::move(j));
    }
    Json positions = Json::object();
    for (const auto& [id, pos] : s.reported_positions) {
        positions[id] = to_json(pos);
    }
    Json messages = Json::array();
    for (const auto& m : s.messages) {
        messages.push_back(Json{{"id", m.id},
                                {"text", m.text},
                                {"project", m.activity.project},
                                {"activity", m.activity.activity},
                                {"author", m.author},
                                {"created_seq", m.created_seq},
                                {"radius_m", m.radius_m},
                                {"recipients", m.recipients}});
    }
    Json queries = Json::array();
    for (const auto& [id, q] : s.queries) {
        Json responses = Json::array();
        for (const auto& r : q.responses) {
            responses.push_back(to_json(r));
        }
        queries.push_back(Json{{"id", q.id},
                               {"project", q.poi.project},
                               {"activity", q.poi.activity},
                               {"width_m", q.width_m},
                               {"issuer", q.issuer},
                               {"seq", q.seq},
                               {"eligible", q.eligible},
                               {"responses", std::move(responses)}});
    }
    return Json{{"portfolio", to_json(s.portfolio)},
                {"t0", s.t0},
                {"now", s.now},
                {"baseline", s.baseline ? to_json(*s.baseline) : Json(nullptr)},
                {"current", s.current ? to_json(*s.current) : Json(nullptr)},
                {"alerts", std::move(alerts)},
                {"sessions", std::move(sessions)},
                {"reported_positions", std::move(positions)},
                {"messages", std::move(messages)},
                {"queries", std::move(queries)},
                {"last_seq", s.last_seq}};
}

ServerState state_from_json(const Json& doc) {
    ServerState s;
    s.portfolio = portfolio_from_json(doc.at("portfolio"));
    s.t0 = doc.at("t0").get<Minutes>();
    s.now = doc.at("now").get<Minutes>();
    if (!doc.at("baseline").is_null()) {
        s.baseline = schedule_from_json(doc.at("baseline"));
    }
    if (!doc.at("current").is_null()) {
        s.current = schedule_from_json(doc.at("current"));
    }
    for (const auto& a : doc.at("alerts")) {
        s.alerts.push_back(alert_from_json(a));
    }
    for (const auto& j : doc.at("sessions")) {
        ClientSession session{j.at("client").get<std::string>(), std::nullopt};
        if (!j.at("resource").is_null()) {
            session.resource = j.at("resource").get<std::string>();
        }
        s.sessions.emplace(session.client, std::move(session));
    }
    for (const auto& [id, pos] : doc.at("reported_positions").items()) {
        s.reported_positions.emplace(id, geopoint_from_json(pos));
    }
    for (const auto& j : doc.at("messages")) {
        Message m;
        m.id = j.at("id").get<std::string>();
        m.text = j.at("text").get<std::string>();
        m.activity = {j.at("project").get<std::string>(), j.at("activity").get<std::string>()};
        m.author = j.at("author").get<std::string>();
        m.created_seq = j.at("created_seq").get<std::uint64_t>();
        m.radius_m = j.at("radius_m").get<double>();
        m.recipients = j.at("recipients").get<std::vector<std::string>>();
        s.messages.push_back(std::move(m));
    }
    for (const auto& j : doc.at("queries")) {
        ProximityQuery q;
        q.id = j.at("id").get<std::string>();
        q.poi = {j.at("project").get<std::string>(), j.at("activity").get<std::string>()};
        q.width_m = j.at("width_m").get<double>();
        q.issuer = j.at("issuer").get<std::string>();
        q.seq = j.at("seq").get<std::uint64_t>();
        q.eligible = j.at("eligible").get<std::vector<std::string>>();
        for (const auto& r : j.at("responses")) {
            q.responses.push_back(bucket_response_from_json(r));
        }
        s.queries.emplace(q.id, std::move(q));
    }
    s.last_seq = doc.at("last_seq").get<std::uint64_t>();
    return s;
}

namespace {

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

std::string state_hash(const ServerState& state) { return fnv1a_hex(state_to_json(state).dump()); }

std::string snapshot(const ServerState& state) {
    Json body = state_to_json(state);
    const std::string hash = fnv1a_hex(body.dump());
    return Json{{"format", 1}, {"hash", hash}, {"state", std::move(body)}}.dump();
}

ServerState restore(std::string_view bytes) {
    try {
        const Json doc = Json::parse(bytes);
        const Json& body = doc.at("state");
        if (fnv1a_hex(body.dump()) != doc.at("hash").get<std::string>()) {
            throw Error(ErrorCode::CorruptSnapshot, "snapshot hash mismatch");
        }
        ServerState s = state_from_json(body);
        if (state_hash(s) != doc.at("hash").get<std::string>()) {
            throw Error(ErrorCode::CorruptSnapshot, "restored state does not reproduce the snapshot hash");
        }
        return s;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CorruptSnapshot) {
            throw;
        }
        throw Error(ErrorCode::CorruptSnapshot, e.what());
    } catch (const std::exception& e) {
        throw Error(ErrorCode::CorruptSnapshot, e.what());
    }
}

}  // namespace locus::server
