#include "simulate.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "locus/dispatch.hpp"
#include "locus/error.hpp"
#include "locus/json_io.hpp"

namespace locus::cli {

namespace {

struct SimClient {
    std::string id;
    std::optional<std::string> resource;
};

struct SimStep {
    Minutes t = 0;
    std::string client;
    std::string action;  // move-to | report-progress | find-nearest | respond-proximity | resource-status
    Json body;
};

struct SimScript {
    std::vector<SimClient> clients;
    std::vector<SimStep> steps;
};

struct StepFailure {
    int exit_code;
    std::string message;
};

SimScript parse_script(const Json& doc) {
    SimScript script;
    for (const auto& c : doc.value("clients", Json::array())) {
        SimClient client{c.at("id").get<std::string>(), std::nullopt};
        if (c.contains("resource") && !c.at("resource").is_null()) {
            client.resource = c.at("resource").get<std::string>();
        }
        script.clients.push_back(std::move(client));
    }
    std::map<std::string, Minutes> last_t;
    for (const auto& s : doc.value("steps", Json::array())) {
        SimStep step{s.value("t", Minutes{0}), s.at("client").get<std::string>(), s.at("action").get<std::string>(), s};
        auto [it, fresh] = last_t.try_emplace(step.client, step.t);
        if (!fresh && step.t < it->second) {
            throw Error(ErrorCode::InvalidArgument, "timestamps of client " + step.client + " go backwards");
        }
        it->second = step.t;
        script.steps.push_back(std::move(step));
    }
    std::stable_sort(script.steps.begin(), script.steps.end(),
                     [](const SimStep& a, const SimStep& b) { return a.t < b.t; });
    return script;
}

class Simulator {
public:
    Simulator(const std::string& url, std::ostream& out) : http_(url), out_(out) {
        http_.set_read_timeout(std::chrono::seconds(60));
    }

    void add_client(const SimClient& c) { clients_.emplace(c.id, c); }

    void run(const SimStep& step) {
        if (step.action != "respond-proximity") {
            finish_pending_query();
        }
        ensure_session(step.client);
        if (step.action == "move-to") {
            const GeoPoint pos = geopoint_from_json(step.body.at("position"));
            positions_.insert_or_assign(step.client, pos);
            const auto& client = clients_.at(step.client);
            if (!client.resource) {
                throw StepFailure{2, step.client + " has no bound resource to move"};
            }
            push(step.client, "POSITION_UPDATE",
                 Json{{"resource", *client.resource}, {"position", to_json(pos)}, {"t", step.t}});
            out_ << "t=" << step.t << ' ' << step.client << " at " << pos.lat() << ',' << pos.lon() << '\n';
        } else if (step.action == "report-progress") {
            push(step.client, "PROGRESS_REPORT",
                 Json{{"project", step.body.at("project")},
                      {"activity", step.body.at("activity")},
                      {"progress", step.body.at("progress")},
                      {"t", step.t}});
            out_ << "t=" << step.t << ' ' << step.client << " progress " << step.body.at("project").get<std::string>()
                 << '/' << step.body.at("activity").get<std::string>() << ' '
                 << step.body.at("progress").get<double>() << '\n';
        } else if (step.action == "resource-status") {
            push(step.client, "RESOURCE_STATUS",
                 Json{{"resource", step.body.at("resource")}, {"status", step.body.at("status")}, {"t", step.t}});
            out_ << "t=" << step.t << ' ' << step.client << " marks " << step.body.at("resource").get<std::string>()
                 << ' ' << step.body.at("status").get<std::string>() << '\n';
        } else if (step.action == "find-nearest") {
            start_query(step);
        } else if (step.action == "respond-proximity") {
            respond(step);
        } else {
            throw StepFailure{2, "unknown action '" + step.action + "'"};
        }
    }

    void finish_pending_query() {
        if (!pending_) {
            return;
        }
        auto res = pending_->get();
        pending_.reset();
        if (!res) {
            throw StepFailure{2, "proximity request failed: " + httplib::to_string(res.error())};
        }
        const Json body = Json::parse(res->body);
        if (res->status != 200) {
            throw StepFailure{1, "proximity: " + body["error"]["code"].get<std::string>() + ' ' +
                                     body["error"]["detail"].get<std::string>()};
        }
        out_ << "nearest to " << pending_poi_ << ": " << body.at("chosen").get<std::string>() << " (bucket "
             << body.at("bucket").get<long long>() << ")\n";
    }

    Json alerts() {
        auto res = http_.Get("/api/alerts");
        if (!res || res->status != 200) {
            throw StepFailure{2, "cannot fetch alerts"};
        }
        return Json::parse(res->body).at("alerts");
    }

private:
    void ensure_session(const std::string& client) {
        if (opened_.contains(client)) {
            return;
        }
        Json payload = Json::object();
        if (auto it = clients_.find(client); it != clients_.end() && it->second.resource) {
            payload["resource"] = *it->second.resource;
        }
        push(client, "SESSION_OPEN", payload);
        opened_.insert(client);
    }

    Json push(const std::string& actor, const std::string& kind, const Json& payload) {
        const Json body{{"kind", kind}, {"actor", actor}, {"payload", payload}};
        auto res = http_.Post("/api/events", body.dump(), "application/json");
        if (!res) {
            throw StepFailure{2, "server unreachable: " + httplib::to_string(res.error())};
        }
        Json reply = Json::parse(res->body);
        if (res->status != 201) {
            throw StepFailure{1, actor + ": " + reply["error"]["code"].get<std::string>() + ' ' +
                                     reply["error"]["detail"].get<std::string>()};
        }
        return reply;
    }

    void start_query(const SimStep& step) {
        Json body{{"actor", step.client},
                  {"project", step.body.at("project")},
                  {"activity", step.body.at("activity")},
                  {"width_m", step.body.value("width_m", kDefaultBucketWidthM)},
                  {"window_ms", step.body.value("window_ms", 2000)}};
        pending_poi_ = step.body.at("project").get<std::string>() + "/" + step.body.at("activity").get<std::string>();
        const std::string host = http_.host();
        const int port = http_.port();
        pending_ = std::async(std::launch::async, [host, port, payload = body.dump()] {
            httplib::Client client(host, port);
            client.set_read_timeout(std::chrono::seconds(60));
            return client.Post("/api/proximity", payload, "application/json");
        });
    }

    void respond(const SimStep& step) {
        auto pos = positions_.find(step.client);
        if (pos == positions_.end()) {
            throw StepFailure{2, step.client + " cannot answer a proximity query before its first move-to"};
        }
        // The query is broadcast asynchronously; wait for it to show up.
        for (int attempt = 0; attempt < 200; ++attempt) {
            auto res = http_.Get("/api/events?client=" + step.client + "&since=0");
            if (!res || res->status != 200) {
                throw StepFailure{2, "sync pull failed for " + step.client};
            }
            const Json reply = Json::parse(res->body);
            for (const auto& e : reply.at("events")) {
                if (e.at("kind") != "PROXIMITY_QUERY") {
                    continue;
                }
                const auto id = e.at("payload").at("query_id").get<std::string>();
                if (answered_[step.client].contains(id)) {
                    continue;
                }
                const GeoPoint poi = geopoint_from_json(e.at("payload").at("poi"));
                const double width = e.at("payload").at("width_m").get<double>();
                const BucketResponse r = bucket_distance(step.client, pos->second, poi, width);
                push(step.client, "PROXIMITY_RESPONSE", Json{{"query_id", id}, {"bucket", r.bucket}, {"width_m", width}});
                answered_[step.client].insert(id);
                out_ << "t=" << step.t << ' ' << step.client << " answers " << id << " with bucket " << r.bucket << '\n';
                return;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        throw StepFailure{1, step.client + " saw no open proximity query"};
    }

    httplib::Client http_;
    std::ostream& out_;
    std::map<std::string, SimClient> clients_;
    std::set<std::string> opened_;
    std::map<std::string, GeoPoint> positions_;
    std::map<std::string, std::set<std::string>> answered_;
    std::optional<std::future<httplib::Result>> pending_;
    std::string pending_poi_;
};

}  // namespace

int run_simulation(const std::string& script_path, const std::string& server_url, std::ostream& out,
                   std::ostream& err) {
    std::ifstream in(script_path);
    if (!in) {
        err << "IO_ERROR " << script_path << " cannot be read\n";
        return 2;
    }
    SimScript script;
    try {
        script = parse_script(Json::parse(in));
    } catch (const std::exception& e) {
        err << "invalid script: " << e.what() << '\n';
        return 2;
    }

    Simulator sim(server_url, out);
    for (const auto& c : script.clients) {
        sim.add_client(c);
    }
    try {
        for (const auto& step : script.steps) {
            sim.run(step);
        }
        sim.finish_pending_query();
        const Json alerts = sim.alerts();
        out << "alerts: " << alerts.size() << '\n';
        for (const auto& a : alerts) {
            out << "  " << describe_alert(alert_from_json(a)) << '\n';
        }
    } catch (const StepFailure& f) {
        err << f.message << '\n';
        return f.exit_code;
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace locus::cli
