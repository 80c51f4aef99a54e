#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "locus/error.hpp"
#include "locus/server/server.hpp"
#include "locus/server/store.hpp"
#include "support/workload.hpp"

using namespace locus;
using namespace locus::server;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("locus-test-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

Event sample(std::uint64_t seq) {
    return Event{seq, EventKind::SessionOpen, "c" + std::to_string(seq), Json::object(), "2026-03-02T06:00:00Z"};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("events append and load back in order") {
    TempDir dir;
    {
        EventStore store(dir.path);
        for (std::uint64_t i = 1; i <= 5; ++i) store.append(sample(i));
    }
    EventStore store(dir.path);
    const auto events = store.load();
    REQUIRE(events.size() == 5);
    for (std::uint64_t i = 0; i < 5; ++i) CHECK(events[i] == sample(i + 1));
}

TEST_CASE("a torn final line is dropped and later appends stay readable") {
    TempDir dir;
    {
        EventStore store(dir.path);
        store.append(sample(1));
        store.append(sample(2));
    }
    {
        std::ofstream out(dir.path / "events.jsonl", std::ios::app);
        out << R"({"seq":3,"kind":"SESS)";
    }
    {
        EventStore store(dir.path);
        CHECK(store.load().size() == 2);
        store.append(sample(3));
    }
    EventStore store(dir.path);
    const auto events = store.load();
    REQUIRE(events.size() == 3);
    CHECK(events[2] == sample(3));
}

TEST_CASE("garbage in the middle of the log is an error") {
    TempDir dir;
    {
        std::ofstream out(dir.path / "events.jsonl");
        out << to_json(sample(1)).dump() << "\nnot json\n" << to_json(sample(3)).dump() << "\n";
    }
    EventStore store(dir.path);
    CHECK_THROWS_AS(store.load(), Error);
}

TEST_CASE("snapshot files are replaced atomically and verified") {
    TempDir dir;
    EventStore store(dir.path);
    CHECK_FALSE(store.read_snapshot().has_value());
    ServerState st;
    st.now = 12;
    store.write_snapshot(st);
    CHECK_FALSE(fs::exists(dir.path / "snapshot.json.tmp"));
    REQUIRE(store.read_snapshot().has_value());
    CHECK(state_hash(*store.read_snapshot()) == state_hash(st));

    const std::string bytes = slurp(store.snapshot_path());
    {
        std::ofstream out(store.snapshot_path(), std::ios::trunc);
        out << bytes.substr(0, bytes.size() / 3);
    }
    try {
        store.read_snapshot();
        FAIL("truncated snapshot accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CorruptSnapshot);
    }
}

TEST_CASE("restart restores the same state from snapshot plus log") {
    TempDir dir;
    std::string before;
    std::size_t log_size = 0;
    {
        Server s(ServerOptions{dir.path, 37});
        workload::setup(s);
        workload::Driver driver(41);
        driver.run(s, 250);
        before = s.hash();
        log_size = s.log().size();
    }
    CHECK(fs::exists(dir.path / "snapshot.json"));
    Server again(ServerOptions{dir.path, 37});
    CHECK(again.hash() == before);
    CHECK(again.log().size() == log_size);
    CHECK(again.replay_rejections() == 0);

    // Without the snapshot the full log gives the same answer.
    fs::remove(dir.path / "snapshot.json");
    Server cold(ServerOptions{dir.path, 1000});
    CHECK(cold.hash() == before);

    // A damaged snapshot is ignored in favour of the log.
    {
        std::ofstream out(dir.path / "snapshot.json", std::ios::trunc);
        out << "{\"format\":1,";
    }
    Server damaged(ServerOptions{dir.path, 1000});
    CHECK(damaged.hash() == before);
}

TEST_CASE("a regressing progress event in the log is rejected on replay") {
    TempDir dir;
    std::string hash;
    std::uint64_t next = 0;
    {
        Server s(ServerOptions{dir.path, 100000});
        workload::setup(s);
        s.submit("planner", EventKind::ProgressReport, Json{{"project", "A"}, {"activity", "A1"}, {"progress", 0.8}});
        hash = s.hash();
        next = s.state().last_seq + 1;
    }
    {
        // Written behind the server's back, as a buggy or hostile writer would.
        std::ofstream out(dir.path / "events.jsonl", std::ios::app);
        Event bad{next, EventKind::ProgressReport, "planner",
                  Json{{"project", "A"}, {"activity", "A1"}, {"progress", 0.3}}, "2026-03-02T07:00:00Z"};
        out << to_json(bad).dump() << "\n";
    }
    Server s(ServerOptions{dir.path, 100000});
    CHECK(s.replay_rejections() == 1);
    CHECK(s.hash() == hash);
    CHECK(s.state().portfolio.find_project("A")->find("A1")->progress == 0.8);
}
