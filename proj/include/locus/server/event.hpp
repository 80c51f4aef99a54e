#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "locus/json_io.hpp"

namespace locus::server {

enum class EventKind {
    PlanUpsert,
    ProgressReport,
    PositionUpdate,
    StatusChange,  // RESOURCE_STATUS on the wire
    MessagePost,
    ProximityQuery,
    ProximityResponse,
    SessionOpen,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view name);

/// Append-only sync record. seq is assigned by the server on acceptance.
struct Event {
    std::uint64_t seq = 0;
    EventKind kind = EventKind::PlanUpsert;
    std::string actor;
    Json payload = Json::object();
    std::string server_time;  // UTC, ISO-8601

    friend bool operator==(const Event&, const Event&) = default;
};

Json to_json(const Event& e);

/// Throws Error(INVALID_EVENT) on malformed input.
Event event_from_json(const Json& doc);

/// Current UTC time as 2026-10-15T09:29:00Z.
std::string utc_now();

}  // namespace locus::server
