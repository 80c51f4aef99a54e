#include "locus/server/http_api.hpp"

#include <httplib.h>

#include "locus/error.hpp"

namespace locus::server {

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownEntity:
        case ErrorCode::UnknownActivity:
        case ErrorCode::UnknownSession:
        case ErrorCode::NoResponses:
            return 404;
        case ErrorCode::ScopeViolation:
            return 403;
        case ErrorCode::ProgressRegression:
            return 409;
        case ErrorCode::Io:
        case ErrorCode::CorruptSnapshot:
            return 500;
        default:
            return 400;
    }
}

namespace {

void reply(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, ErrorCode code, const std::string& detail) {
    reply(res, http_status(code), Json{{"error", {{"code", to_string(code)}, {"detail", detail}}}});
}

Json parse_body(const httplib::Request& req) {
    try {
        Json body = Json::parse(req.body);
        if (!body.is_object()) {
            throw Error(ErrorCode::ParseError, "request body must be a JSON object");
        }
        return body;
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

// Runs a handler and maps exceptions onto the error envelope.
template <typename F>
httplib::Server::Handler guarded(F&& f) {
    return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const Error& e) {
            reply_error(res, e.code(), e.detail());
        } catch (const nlohmann::json::exception& e) {
            reply_error(res, ErrorCode::ParseError, e.what());
        } catch (const std::exception& e) {
            reply(res, 500, Json{{"error", {{"code", "INTERNAL"}, {"detail", e.what()}}}});
        }
    };
}

std::string required(const Json& body, const char* key) {
    if (!body.contains(key) || !body.at(key).is_string()) {
        throw Error(ErrorCode::InvalidEvent, std::string("request needs string field '") + key + "'");
    }
    return body.at(key).get<std::string>();
}

}  // namespace

HttpApi::HttpApi(Server& server, std::optional<std::filesystem::path> static_dir)
    : server_(server), http_(std::make_unique<httplib::Server>()) {
    if (static_dir && std::filesystem::is_directory(*static_dir)) {
        http_->set_mount_point("/", static_dir->string());
    }
    install_routes();
}

HttpApi::~HttpApi() { stop(); }

bool HttpApi::bind(const std::string& host, int port) {
    if (port == 0) {
        port_ = http_->bind_to_any_port(host);
        return port_ > 0;
    }
    if (!http_->bind_to_port(host, port)) {
        return false;
    }
    port_ = port;
    return true;
}

void HttpApi::serve() { http_->listen_after_bind(); }

void HttpApi::stop() {
    if (http_) {
        http_->stop();
    }
}

void HttpApi::install_routes() {
    http_->Post("/api/events", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const Json body = parse_body(req);
        const auto kind_name = required(body, "kind");
        const auto kind = event_kind_from_string(kind_name);
        if (!kind) {
            throw Error(ErrorCode::InvalidEvent, "unknown event kind '" + kind_name + "'");
        }
        const Event e = server_.submit(required(body, "actor"), *kind, body.value("payload", Json::object()));
        reply(res, 201, to_json(e));
    }));

    http_->Get("/api/events", guarded([this](const httplib::Request& req, httplib::Response& res) {
        if (!req.has_param("client")) {
            throw Error(ErrorCode::UnknownSession, "missing ?client=");
        }
        std::uint64_t since = 0;
        if (req.has_param("since")) {
            try {
                since = std::stoull(req.get_param_value("since"));
            } catch (const std::exception&) {
                throw Error(ErrorCode::InvalidArgument, "since must be a sequence number");
            }
        }
        Json events = Json::array();
        for (const auto& e : server_.pull(req.get_param_value("client"), since)) {
            events.push_back(to_json(e));
        }
        reply(res, 200, Json{{"events", std::move(events)}});
    }));

    http_->Post("/api/messages", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const Json body = parse_body(req);
        Json payload{{"project", required(body, "project")},
                     {"activity", required(body, "activity")},
                     {"text", body.value("text", std::string{})}};
        if (body.contains("radius_m")) {
            payload["radius_m"] = body.at("radius_m");
        }
        const Event e = server_.submit(required(body, "actor"), EventKind::MessagePost, std::move(payload));
        const ServerState s = server_.state();
        std::vector<std::string> recipients;
        for (const auto& m : s.messages) {
            if (m.created_seq == e.seq) {
                recipients = m.recipients;
            }
        }
        reply(res, 201, Json{{"id", e.payload.at("id")},
                             {"seq", e.seq},
                             {"recipients", recipients},
                             {"recipient_count", recipients.size()}});
    }));

    http_->Post("/api/proximity", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const Json body = parse_body(req);
        const ActivityRef poi{required(body, "project"), required(body, "activity")};
        const double width = body.value("width_m", kDefaultBucketWidthM);
        std::optional<std::chrono::milliseconds> window;
        if (body.contains("window_ms")) {
            window = std::chrono::milliseconds(body.at("window_ms").get<long long>());
        }
        const auto outcome = server_.run_proximity_query(required(body, "actor"), poi, width, window);
        reply(res, 200, Json{{"query_id", outcome.query_id},
                             {"chosen", outcome.decision.chosen},
                             {"bucket", outcome.decision.bucket},
                             {"width_m", width}});
    }));

    http_->Get("/api/schedule/current", guarded([this](const httplib::Request&, httplib::Response& res) {
        const ServerState s = server_.state();
        if (!s.current) {
            reply(res, 200, Json{{"schedule", nullptr}, {"baseline", nullptr}, {"critical", Json::array()}});
            return;
        }
        Json schedule = to_json(*s.current);
        Json critical = Json::array();
        std::map<std::string, CpmResult> analysis;
        for (const auto& p : s.portfolio.projects) {
            analysis.emplace(p.id, cpm(p));
        }
        for (auto& entry : schedule.at("activities")) {
            const auto project = entry.at("project").get<std::string>();
            const auto activity = entry.at("activity").get<std::string>();
            const bool is_critical = analysis.at(project).at(activity).critical;
            entry["critical"] = is_critical;
            if (is_critical) {
                critical.push_back(Json{{"project", project}, {"activity", activity}});
            }
        }
        reply(res, 200, Json{{"t_now", std::max(s.now, s.current->t0)},
                             {"schedule", std::move(schedule)},
                             {"baseline", s.baseline ? to_json(*s.baseline) : Json(nullptr)},
                             {"critical", std::move(critical)}});
    }));

    http_->Get("/api/alerts", guarded([this](const httplib::Request&, httplib::Response& res) {
        Json alerts = Json::array();
        for (const auto& a : server_.state().alerts) {
            alerts.push_back(to_json(a));
        }
        reply(res, 200, Json{{"alerts", std::move(alerts)}});
    }));

    http_->Get("/api/portfolio", guarded([this](const httplib::Request&, httplib::Response& res) {
        reply(res, 200, to_json(server_.state().portfolio));
    }));

    http_->Post("/api/portfolio", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const Json body = parse_body(req);
        Portfolio parsed = portfolio_from_json(body, ParseOptions{.strict = true});
        Json payload = to_json(parsed);
        if (req.has_param("t0")) {
            payload["t0"] = std::stoll(req.get_param_value("t0"));
        }
        const std::string actor = req.has_param("actor") ? req.get_param_value("actor") : "planner";
        const Event e = server_.submit(actor, EventKind::PlanUpsert, std::move(payload));
        reply(res, 201, Json{{"seq", e.seq}});
    }));

    http_->Get("/api/state", guarded([this](const httplib::Request&, httplib::Response& res) {
        const ServerState s = server_.state();
        reply(res, 200, Json{{"hash", state_hash(s)}, {"last_seq", s.last_seq}, {"now", s.now}});
    }));
}

}  // namespace locus::server
