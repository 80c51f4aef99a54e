#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <vector>

#include "locus/server/event.hpp"
#include "locus/server/state.hpp"

namespace locus::server {

/// JSON-Lines event log plus a periodic snapshot in one directory.
///
///   <dir>/events.jsonl     one accepted event per line, flushed per append
///   <dir>/snapshot.json    written to a temp file, then renamed
///   <dir>/decisions.jsonl  proximity decisions, (client, bucket) pairs only
class EventStore {
public:
    explicit EventStore(std::filesystem::path dir);

    /// All complete events in the log. A torn final line (crash mid-write)
    /// is dropped; any other unreadable line throws Error(IO_ERROR).
    std::vector<Event> load() const;

    void append(const Event& event);
    void append_decision(const Json& decision);

    void write_snapshot(const ServerState& state) const;

    /// nullopt if no snapshot exists; throws Error(CORRUPT_SNAPSHOT).
    std::optional<ServerState> read_snapshot() const;

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path log_path() const { return dir_ / "events.jsonl"; }
    std::filesystem::path snapshot_path() const { return dir_ / "snapshot.json"; }
    std::filesystem::path decisions_path() const { return dir_ / "decisions.jsonl"; }

private:
    void drop_torn_tail() const;

    std::filesystem::path dir_;
    std::ofstream log_;
    std::ofstream decisions_;
};

}  // namespace locus::server
