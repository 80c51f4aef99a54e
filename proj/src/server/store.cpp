#include "locus/server/store.hpp"

#include <iterator>
#include <sstream>

#include "locus/error.hpp"

namespace locus::server {

namespace fs = std::filesystem;

EventStore::EventStore(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) {
        throw Error(ErrorCode::Io, "cannot create data dir " + dir_.string() + ": " + ec.message());
    }
    drop_torn_tail();
    log_.open(log_path(), std::ios::app);
    decisions_.open(decisions_path(), std::ios::app);
    if (!log_ || !decisions_) {
        throw Error(ErrorCode::Io, "cannot open log files in " + dir_.string());
    }
}

void EventStore::drop_torn_tail() const {
    if (!fs::exists(log_path())) {
        return;
    }
    std::ifstream in(log_path(), std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.empty() || bytes.back() == '\n') {
        return;
    }
    // A crash mid-append leaves a line without its newline; appending after
    // it would bury the fragment in the middle of the log.
    const auto keep = bytes.find_last_of('\n');
    fs::resize_file(log_path(), keep == std::string::npos ? 0 : keep + 1);
}

std::vector<Event> EventStore::load() const {
    std::ifstream in(log_path());
    std::vector<Event> events;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const bool last = in.peek() == std::char_traits<char>::eof();
        try {
            events.push_back(event_from_json(Json::parse(line)));
        } catch (const std::exception& e) {
            if (last) {
                break;
            }
            throw Error(ErrorCode::Io, log_path().string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return events;
}

void EventStore::append(const Event& event) {
    log_ << to_json(event).dump() << '\n';
    log_.flush();
    if (!log_) {
        throw Error(ErrorCode::Io, "write to " + log_path().string() + " failed");
    }
}

void EventStore::append_decision(const Json& decision) {
    decisions_ << decision.dump() << '\n';
    decisions_.flush();
}

void EventStore::write_snapshot(const ServerState& state) const {
    const fs::path tmp = dir_ / "snapshot.json.tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << snapshot(state);
        out.flush();
        if (!out) {
            throw Error(ErrorCode::Io, "cannot write " + tmp.string());
        }
    }
    fs::rename(tmp, snapshot_path());
}

std::optional<ServerState> EventStore::read_snapshot() const {
    if (!fs::exists(snapshot_path())) {
        return std::nullopt;
    }
    std::ifstream in(snapshot_path());
    std::stringstream buf;
    buf << in.rdbuf();
    return restore(buf.str());
}

}  // namespace locus::server
