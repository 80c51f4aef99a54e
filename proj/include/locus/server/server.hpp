#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "locus/server/event.hpp"
#include "locus/server/state.hpp"
#include "locus/server/store.hpp"

namespace locus::server {

struct ServerOptions {
    std::optional<std::filesystem::path> data_dir;  // no persistence when empty
    std::size_t snapshot_every = 100;               // events between snapshots
    std::chrono::milliseconds proximity_window{10000};
};

struct ProximityOutcome {
    std::string query_id;
    ProximityDecision decision;
};

/// The central project server. Any number of threads may read; every
/// mutation goes through submit(), which serializes on one writer lock,
/// assigns the next seq and persists the event before it becomes visible.
class Server {
public:
    explicit Server(ServerOptions options = {});
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Validates, sequences, persists and applies one event. Throws the
    /// apply_event errors; rejected events leave no trace.
    Event submit(const std::string& actor, EventKind kind, Json payload);

    std::vector<Event> pull(const std::string& client, std::uint64_t since_seq) const;

    ServerState state() const;
    std::string hash() const;
    std::vector<Event> log() const;
    std::size_t replay_rejections() const { return replay_rejections_; }

    /// Broadcasts a PROXIMITY_QUERY and waits until every bound client has
    /// answered or the window closes, then picks the nearest by bucket.
    ProximityOutcome run_proximity_query(const std::string& actor, const ActivityRef& poi, double width_m,
                                         std::optional<std::chrono::milliseconds> window = std::nullopt);

    std::string open_proximity_query(const std::string& actor, const ActivityRef& poi, double width_m);
    ProximityOutcome await_proximity(const std::string& query_id, std::chrono::milliseconds window);

    std::vector<Json> decisions() const;

    void write_snapshot();

private:
    ServerOptions options_;
    std::unique_ptr<EventStore> store_;
    mutable std::shared_mutex mutex_;
    std::condition_variable_any changed_;
    ServerState state_;
    std::vector<Event> log_;
    std::vector<Json> decisions_;
    std::uint64_t next_seq_ = 1;
    std::size_t since_snapshot_ = 0;
    std::size_t replay_rejections_ = 0;
};

}  // namespace locus::server
