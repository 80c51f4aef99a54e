#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "locus/dispatch.hpp"
#include "locus/model.hpp"
#include "locus/scheduler.hpp"
#include "locus/server/event.hpp"

namespace locus::server {

inline constexpr double kDefaultGeofenceRadiusM = 500.0;

/// A connected client. The client id doubles as its actor id; its project
/// scope is every project whose owner or visibility names that actor.
struct ClientSession {
    std::string client;
    std::optional<std::string> resource;

    friend bool operator==(const ClientSession&, const ClientSession&) = default;
};

struct Message {
    std::string id;
    std::string text;
    ActivityRef activity;
    std::string author;
    std::uint64_t created_seq = 0;
    double radius_m = kDefaultGeofenceRadiusM;
    std::vector<std::string> recipients;  // sorted

    friend bool operator==(const Message&, const Message&) = default;
};

struct ProximityQuery {
    std::string id;
    ActivityRef poi;
    double width_m = kDefaultBucketWidthM;
    std::string issuer;
    std::uint64_t seq = 0;
    std::vector<std::string> eligible;  // clients with a bound resource at query time
    std::vector<BucketResponse> responses;

    friend bool operator==(const ProximityQuery&, const ProximityQuery&) = default;
};

/// Everything the server knows; a pure fold of the accepted event log.
struct ServerState {
    Portfolio portfolio;
    Minutes t0 = 0;
    Minutes now = 0;  // plan clock, latest time reported by any client
    std::optional<Schedule> baseline;
    std::optional<Schedule> current;
    std::vector<Alert> alerts;
    std::map<std::string, ClientSession> sessions;
    std::map<std::string, GeoPoint> reported_positions;  // resource id -> latest fix
    std::vector<Message> messages;
    std::map<std::string, ProximityQuery> queries;
    std::uint64_t last_seq = 0;

    /// Projects visible to the client, in portfolio order.
    std::vector<const Project*> scope_of(const std::string& client) const;
};

enum class ApplyMode {
    Authoritative,  // server: full checks, scheduling
    Replica,        // client-side fold of pulled events, no re-planning
};

struct ApplyOptions {
    ApplyMode mode = ApplyMode::Authoritative;
    std::string viewer;  // replica owner
};

/// Deterministic transition. Throws Error(PROGRESS_REGRESSION),
/// Error(UNKNOWN_ENTITY), Error(UNKNOWN_ACTIVITY), Error(SCOPE_VIOLATION),
/// Error(INVALID_EVENT) or Error(INVALID_PLAN); the input state is untouched
/// in every error case.
ServerState apply_event(ServerState state, const Event& event, const ApplyOptions& options = {});

/// Scoped clients that receive a message about an activity. Located
/// activities reach clients whose latest position lies inside the fence;
/// clients without a reported position are skipped. Location-free activities
/// reach every scoped client.
std::set<std::string> distribute_message(const std::optional<GeoPoint>& site, double radius_m,
                                         const std::map<std::string, std::optional<GeoPoint>>& latest_positions);

/// Events after since_seq that the client may see, in seq order, redacted
/// to its scope. Throws Error(UNKNOWN_SESSION).
std::vector<Event> sync_pull(const ServerState& state, std::span<const Event> log, const std::string& client,
                             std::uint64_t since_seq);

/// The slice of state a client is entitled to: scoped projects, its own
/// reported position and the messages delivered to it.
Json client_view(const ServerState& state, const std::string& client);

Json state_to_json(const ServerState& state);
ServerState state_from_json(const Json& doc);

/// FNV-1a 64 over the canonical JSON form, as 16 hex digits.
std::string state_hash(const ServerState& state);

/// Self-verifying snapshot document.
std::string snapshot(const ServerState& state);
/// Throws Error(CORRUPT_SNAPSHOT) if the document is unreadable or its hash
/// does not match.
ServerState restore(std::string_view bytes);

}  // namespace locus::server
