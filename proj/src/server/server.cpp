#include "locus/server/server.hpp"

#include <algorithm>
#include <iostream>

#include "locus/error.hpp"

namespace locus::server {

Server::Server(ServerOptions options) : options_(std::move(options)) {
    if (!options_.data_dir) {
        return;
    }
    store_ = std::make_unique<EventStore>(*options_.data_dir);
    try {
        if (auto snap = store_->read_snapshot()) {
            state_ = std::move(*snap);
        }
    } catch (const Error& e) {
        std::cerr << "locus: ignoring snapshot (" << e.what() << "), replaying the full log\n";
        state_ = ServerState{};
    }
    for (Event& e : store_->load()) {
        next_seq_ = std::max(next_seq_, e.seq + 1);
        if (e.seq <= state_.last_seq) {
            log_.push_back(std::move(e));
            continue;
        }
        try {
            state_ = apply_event(state_, e);
            log_.push_back(std::move(e));
        } catch (const Error& err) {
            // Stays in the file, but is neither applied nor served, and its
            // seq is never handed out again.
            ++replay_rejections_;
            std::cerr << "locus: replay rejected seq " << e.seq << ": " << err.what() << "\n";
        }
    }
}

Server::~Server() = default;

Event Server::submit(const std::string& actor, EventKind kind, Json payload) {
    std::unique_lock lock(mutex_);
    Event e;
    e.seq = std::max(next_seq_, state_.last_seq + 1);
    e.kind = kind;
    e.actor = actor;
    e.payload = payload.is_null() ? Json::object() : std::move(payload);
    e.server_time = utc_now();
    if (kind == EventKind::ProximityQuery && !e.payload.contains("query_id")) {
        e.payload["query_id"] = "q" + std::to_string(e.seq);
    }
    if (kind == EventKind::MessagePost && !e.payload.contains("id")) {
        e.payload["id"] = "m" + std::to_string(e.seq);
    }
    if (actor.empty()) {
        throw Error(ErrorCode::InvalidEvent, "event needs an actor");
    }

    ServerState next = apply_event(state_, e);
    if (store_) {
        store_->append(e);
    }
    state_ = std::move(next);
    next_seq_ = e.seq + 1;
    log_.push_back(e);
    if (store_ && ++since_snapshot_ >= options_.snapshot_every) {
        store_->write_snapshot(state_);
        since_snapshot_ = 0;
    }
    lock.unlock();
    changed_.notify_all();
    return e;
}

std::vector<Event> Server::pull(const std::string& client, std::uint64_t since_seq) const {
    std::shared_lock lock(mutex_);
    return sync_pull(state_, log_, client, since_seq);
}

ServerState Server::state() const {
    std::shared_lock lock(mutex_);
    return state_;
}

std::string Server::hash() const {
    std::shared_lock lock(mutex_);
    return state_hash(state_);
}

std::vector<Event> Server::log() const {
    std::shared_lock lock(mutex_);
    return log_;
}

std::vector<Json> Server::decisions() const {
    std::shared_lock lock(mutex_);
    return decisions_;
}

void Server::write_snapshot() {
    std::unique_lock lock(mutex_);
    if (store_) {
        store_->write_snapshot(state_);
        since_snapshot_ = 0;
    }
}

std::string Server::open_proximity_query(const std::string& actor, const ActivityRef& poi, double width_m) {
    const Event e = submit(actor, EventKind::ProximityQuery,
                           Json{{"project", poi.project}, {"activity", poi.activity}, {"width_m", width_m}});
    return e.payload.at("query_id").get<std::string>();
}

ProximityOutcome Server::await_proximity(const std::string& query_id, std::chrono::milliseconds window) {
    std::unique_lock lock(mutex_);
    auto complete = [&] {
        auto it = state_.queries.find(query_id);
        return it == state_.queries.end() || it->second.responses.size() >= it->second.eligible.size();
    };
    changed_.wait_for(lock, window, complete);
    auto it = state_.queries.find(query_id);
    if (it == state_.queries.end()) {
        throw Error(ErrorCode::UnknownEntity, "proximity query " + query_id);
    }
    ProximityOutcome outcome{query_id, nearest_to_poi(it->second.responses)};
    Json pairs = Json::array();
    for (const auto& [client, bucket] : outcome.decision.log) {
        pairs.push_back(Json{{"client", client}, {"bucket", bucket}});
    }
    Json decision{{"query_id", query_id},
                  {"chosen", outcome.decision.chosen},
                  {"bucket", outcome.decision.bucket},
                  {"responses", std::move(pairs)}};
    if (store_) {
        store_->append_decision(decision);
    }
    decisions_.push_back(std::move(decision));
    return outcome;
}

ProximityOutcome Server::run_proximity_query(const std::string& actor, const ActivityRef& poi, double width_m,
                                             std::optional<std::chrono::milliseconds> window) {
    const std::string id = open_proximity_query(actor, poi, width_m);
    return await_proximity(id, window.value_or(options_.proximity_window));
}

}  // namespace locus::server
