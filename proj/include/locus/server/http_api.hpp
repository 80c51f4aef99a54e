#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "locus/error.hpp"
#include "locus/server/server.hpp"

namespace httplib {
class Server;
}

namespace locus::server {

/// HTTP + JSON front end of Server.
///
///   POST /api/events            push an event (server assigns seq)
///   GET  /api/events?client=&since=   sync pull
///   POST /api/messages          geofenced message
///   POST /api/proximity         nearest-worker query
///   GET  /api/schedule/current  current schedule with critical flags
///   GET  /api/alerts
///   GET  /api/portfolio
///   POST /api/portfolio         planner upsert (?actor=, ?t0=)
///   GET  /api/state             hash, last seq, plan clock
///
/// Errors are {"error": {"code": ..., "detail": ...}}.
class HttpApi {
public:
    explicit HttpApi(Server& server, std::optional<std::filesystem::path> static_dir = std::nullopt);
    ~HttpApi();

    /// false if the port cannot be bound. port 0 picks a free one.
    bool bind(const std::string& host, int port);
    int port() const { return port_; }

    /// Blocks until stop().
    void serve();
    void stop();

private:
    void install_routes();

    Server& server_;
    std::unique_ptr<httplib::Server> http_;
    int port_ = 0;
};

/// HTTP status for an error code.
int http_status(ErrorCode code);

}  // namespace locus::server
