#include "locus/server/event.hpp"

#include <array>
#include <chrono>
#include <ctime>
#include <utility>

#include "locus/error.hpp"

namespace locus::server {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 8> kNames{{
    {EventKind::PlanUpsert, "PLAN_UPSERT"},
    {EventKind::ProgressReport, "PROGRESS_REPORT"},
    {EventKind::PositionUpdate, "POSITION_UPDATE"},
    {EventKind::StatusChange, "RESOURCE_STATUS"},
    {EventKind::MessagePost, "MESSAGE_POST"},
    {EventKind::ProximityQuery, "PROXIMITY_QUERY"},
    {EventKind::ProximityResponse, "PROXIMITY_RESPONSE"},
    {EventKind::SessionOpen, "SESSION_OPEN"},
}};

}  // namespace

std::string_view to_string(EventKind kind) {
    for (const auto& [k, name] : kNames) {
        if (k == kind) {
            return name;
        }
    }
    return "UNKNOWN";
}

std::optional<EventKind> event_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kNames) {
        if (n == name) {
            return k;
        }
    }
    return std::nullopt;
}

Json to_json(const Event& e) {
    return Json{{"seq", e.seq},
                {"kind", to_string(e.kind)},
                {"actor", e.actor},
                {"payload", e.payload},
                {"server_time", e.server_time}};
}

Event event_from_json(const Json& doc) {
    if (!doc.is_object()) {
        throw Error(ErrorCode::InvalidEvent, "event must be a JSON object");
    }
    Event e;
    try {
        e.seq = doc.value("seq", std::uint64_t{0});
        const auto kind_name = doc.at("kind").get<std::string>();
        auto kind = event_kind_from_string(kind_name);
        if (!kind) {
            throw Error(ErrorCode::InvalidEvent, "unknown event kind '" + kind_name + "'");
        }
        e.kind = *kind;
        e.actor = doc.at("actor").get<std::string>();
        e.payload = doc.value("payload", Json::object());
        e.server_time = doc.value("server_time", std::string{});
    } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::InvalidEvent, ex.what());
    }
    if (e.actor.empty()) {
        throw Error(ErrorCode::InvalidEvent, "event needs an actor");
    }
    if (!e.payload.is_object()) {
        throw Error(ErrorCode::InvalidEvent, "payload must be an object");
    }
    return e;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace locus::server
