// Acceptance suite: one line per criterion, nonzero exit if any fails.
//
// Every check compares library output with an independent test-side oracle
// (tests/support) rather than with numbers produced by the library itself.

#include <algorithm>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "locus/dispatch.hpp"
#include "locus/error.hpp"
#include "locus/geo.hpp"
#include "locus/json_io.hpp"
#include "locus/scheduler.hpp"
#include "locus/server/server.hpp"
#include "locus/server/state.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/verifier.hpp"
#include "support/workload.hpp"

using namespace locus;
using namespace locus::server;
namespace fs = std::filesystem;

namespace {

/// Collects failed expectations of one criterion; keeps the first few messages.
class Outcome {
public:
    void expect(bool condition, const std::string& what) {
        ++checks_;
        if (!condition) {
            ++failures_;
            if (messages_.size() < 8) messages_.push_back(what);
        }
    }
    void note(std::string text) { summary_ = std::move(text); }

    bool ok() const { return failures_ == 0 && checks_ > 0; }
    int checks() const { return checks_; }
    int failures() const { return failures_; }
    const std::string& summary() const { return summary_; }
    const std::vector<std::string>& messages() const { return messages_; }

private:
    int checks_ = 0;
    int failures_ = 0;
    std::string summary_;
    std::vector<std::string> messages_;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_seconds(double s) {
    std::ostringstream os;
    os.precision(3);
    os << std::fixed << s << " s";
    return os.str();
}

std::string ref_str(const ActivityRef& r) { return r.project + "/" + r.activity; }

bool mentions_coordinates(const Json& j) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (k == "lat" || k == "lon" || k == "position" || k == "poi" || k == "location" ||
                mentions_coordinates(v)) {
                return true;
            }
        }
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (mentions_coordinates(v)) return true;
        }
    }
    return false;
}

std::vector<BaselineSlip> slips(const ReplanResult& r) {
    std::vector<BaselineSlip> out;
    for (const auto& a : r.alerts) {
        if (const auto* s = std::get_if<BaselineSlip>(&a)) out.push_back(*s);
    }
    return out;
}

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("locus-acceptance-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

// ---------------------------------------------------------------------------

void cpm_matches_path_enumeration(Outcome& out) {
    const auto start = Clock::now();
    gen::Rng rng(1001);
    for (int i = 0; i < 200; ++i) {
        const Project p = gen::random_dag(rng, gen::uniform(rng, 1, 10), 1, 100);
        const CpmResult r = cpm(p);
        const oracle::PathTimes truth = oracle::longest_paths(p);
        const auto lf = oracle::latest_finishes(p, truth.makespan);
        out.expect(r.makespan == truth.makespan, "dag " + std::to_string(i) + ": makespan");
        for (const auto& a : p.activities) {
            const auto& t = r.at(a.id);
            out.expect(t.es == truth.es.at(a.id), "dag " + std::to_string(i) + " " + a.id + ": es");
            out.expect(t.ef == truth.ef.at(a.id), "dag " + std::to_string(i) + " " + a.id + ": ef");
            out.expect(t.lf == lf.at(a.id), "dag " + std::to_string(i) + " " + a.id + ": lf");
        }
    }
    const double elapsed = seconds_since(start);
    out.expect(elapsed < 5.0, "runtime " + fmt_seconds(elapsed) + " exceeds 5 s");
    out.note("200 DAGs in " + fmt_seconds(elapsed));
}

void zero_travel_reduces_to_cpm(Outcome& out) {
    gen::Rng rng(2002);
    int activities = 0;
    for (int i = 0; i < 100; ++i) {
        const Portfolio pf = gen::abundant_colocated(rng);
        const Minutes t0 = gen::uniform(rng, 0, 500);
        const Schedule s = schedule(pf, t0);
        out.expect(verify::schedule_problems(s, pf).empty(), "instance " + std::to_string(i) + ": infeasible");
        out.expect(s.total_travel_min == 0, "instance " + std::to_string(i) + ": travel");
        for (const auto& p : pf.projects) {
            const oracle::PathTimes truth = oracle::longest_paths(p);
            for (const auto& a : p.activities) {
                const auto* e = s.find({p.id, a.id});
                ++activities;
                out.expect(e && e->start == t0 + truth.es.at(a.id),
                           "instance " + std::to_string(i) + " " + p.id + "/" + a.id + ": start != es");
            }
        }
    }
    out.note("100 instances, " + std::to_string(activities) + " activities");
}

void oracle_bounds(Outcome& out) {
    const auto start = Clock::now();
    gen::Rng rng(3003);
    int strict_gap = 0;
    for (int i = 0; i < 100; ++i) {
        const Portfolio pf = gen::small_instance(rng, 6, 3);
        const Schedule s = schedule(pf, 0);
        const Minutes lower = cpm_makespan(pf);
        const Minutes best = brute_force_optimum(pf, 0);
        const std::string tag = "instance " + std::to_string(i);
        out.expect(lower <= best, tag + ": cpm " + std::to_string(lower) + " > optimum " + std::to_string(best));
        out.expect(best <= s.makespan,
                   tag + ": optimum " + std::to_string(best) + " > schedule " + std::to_string(s.makespan));
        for (const auto& problem : verify::schedule_problems(s, pf)) {
            out.expect(false, tag + ": " + problem);
        }
        if (best < s.makespan) ++strict_gap;
    }
    const double elapsed = seconds_since(start);
    out.expect(elapsed < 60.0, "runtime " + fmt_seconds(elapsed) + " exceeds 60 s");
    out.note("100 instances in " + fmt_seconds(elapsed) + ", heuristic above optimum on " + std::to_string(strict_gap));
}

void construction_transfer_warning(Outcome& out) {
    const Portfolio pf = fixtures::load("construction.json");
    const Schedule s = schedule(pf, 0);
    const auto warnings = transfer_warnings(s, pf);
    out.expect(warnings.size() == 1, "expected one warning, got " + std::to_string(warnings.size()));
    if (warnings.size() != 1) return;
    const auto& w = warnings.front();

    const auto& from_site = *pf.find_project(w.from_activity.project)->find(w.from_activity.activity)->location;
    const auto& to_site = *pf.find_project(w.to_activity.project)->find(w.to_activity.activity)->location;
    const Resource& r = *pf.find_resource(w.resource);
    const double km = oracle::distance_km(from_site, to_site);
    const auto expected_travel = static_cast<Minutes>(std::ceil(km / r.speed_kmh * 60.0));
    const auto* from = s.find(w.from_activity);
    const auto* to = s.find(w.to_activity);

    out.expect(w.resource == "R1", "warning is for " + w.resource);
    out.expect(km > 99.0 && km < 101.0, "sites are " + std::to_string(km) + " km apart");
    out.expect(w.travel_min == expected_travel && w.travel_min == 120, "travel " + std::to_string(w.travel_min));
    out.expect(from && to && w.gap_min == to->start - from->finish && w.gap_min == 30, "gap " + std::to_string(w.gap_min));
    out.expect(w.shortfall_min == expected_travel - 30 && w.shortfall_min == 90,
               "shortfall " + std::to_string(w.shortfall_min));
    std::ostringstream os;
    os.precision(2);
    os << std::fixed << describe_alert(w) << " (sites " << km << " km apart)";
    out.note(os.str());
}

void geofence_delivery(Outcome& out) {
    gen::Rng rng(5005);
    const GeoPoint centre(48.7758, 9.1829);
    int boundary_cases = 0;
    int delivered = 0;
    for (int i = 0; i < 500; ++i) {
        const GeoPoint site = gen::random_point_near(rng, centre, 300.0);
        const double radius_m = gen::uniform_real(rng, 10.0, 5000.0);
        std::map<std::string, std::optional<GeoPoint>> latest;
        std::map<std::string, GeoPoint> known;
        const int n = gen::uniform(rng, 1, 12);
        for (int k = 0; k < n; ++k) {
            const std::string id = "c" + std::to_string(k);
            if (gen::coin(rng, 0.1)) {
                latest.emplace(id, std::nullopt);
                continue;
            }
            const GeoPoint p = gen::random_point_near(rng, site, 2.0 * radius_m / 1000.0);
            latest.emplace(id, p);
            known.emplace(id, p);
        }
        double radius = radius_m;
        std::string on_edge;
        if (i % 3 == 0 && !known.empty()) {
            // Put the fence edge exactly through one client.
            on_edge = known.begin()->first;
            radius = haversine_distance(known.begin()->second, site) * 1000.0;
            ++boundary_cases;
        }
        const auto got = distribute_message(site, radius, latest);
        // The two distance formulas agree far below a micrometre; the slack only
        // absorbs rounding for the client placed on the edge.
        const auto expected = oracle::within(site, radius + 1e-6, known);
        out.expect(got == expected, "case " + std::to_string(i) + ": recipients differ from the distance predicate");
        if (!on_edge.empty()) {
            out.expect(got.contains(on_edge), "case " + std::to_string(i) + ": client on the boundary left out");
        }
        delivered += static_cast<int>(got.size());

        // Messages about location-free activities reach every scoped client.
        if (i % 50 == 0) {
            std::set<std::string> all;
            for (const auto& [id, _] : latest) all.insert(id);
            out.expect(distribute_message(std::nullopt, radius, latest) == all, "location-free message");
        }
    }
    out.note("500 cases, " + std::to_string(boundary_cases) + " with a client on the edge, " +
             std::to_string(delivered) + " deliveries");
}

void proximity_privacy_and_correctness(Outcome& out) {
    // Pure decision rule against plaintext distances.
    gen::Rng rng(6006);
    const GeoPoint centre(48.7758, 9.1829);
    int separated = 0;
    int cases = 0;
    while (separated < 500 && cases < 5000) {
        ++cases;
        const GeoPoint poi = gen::random_point_near(rng, centre, 100.0);
        const double width = gen::uniform_real(rng, 50.0, 1000.0);
        const int n = gen::uniform(rng, 1, 6);
        std::vector<BucketResponse> responses;
        std::vector<std::pair<double, std::string>> truth;
        for (int k = 0; k < n; ++k) {
            const std::string id = "c" + std::to_string(k);
            const GeoPoint pos = gen::random_point_near(rng, poi, 20.0);
            responses.push_back(bucket_distance(id, pos, poi, width));
            truth.emplace_back(oracle::distance_km(pos, poi) * 1000.0, id);
        }
        std::sort(truth.begin(), truth.end());
        const auto decision = nearest_to_poi(responses);
        const double chosen_m =
            std::find_if(truth.begin(), truth.end(), [&](const auto& t) { return t.second == decision.chosen; })->first;
        out.expect(chosen_m <= truth.front().first + width, "case " + std::to_string(cases) + ": chosen too far");
        bool apart = true;
        for (std::size_t k = 1; k < truth.size(); ++k) {
            apart = apart && truth[k].first - truth[k - 1].first > width;
        }
        if (apart) {
            ++separated;
            out.expect(decision.chosen == truth.front().second,
                       "case " + std::to_string(cases) + ": chose " + decision.chosen + ", nearest is " +
                           truth.front().second);
        }
    }
    out.expect(separated == 500, "only " + std::to_string(separated) + " separated cases generated");

    // End to end through the server, then scan everything it stored or served.
    TempDir dir;
    int served = 0;
    {
        Server s(ServerOptions{dir.path, 50});
        workload::setup(s);
        const std::vector<std::string> responders{"crew-w1", "drv-r1", "mix-m1"};
        const Portfolio pf = s.state().portfolio;
        for (int q = 0; q < 60; ++q) {
            const auto& project = pf.projects[q % pf.projects.size()];
            const auto& activity = project.activities[gen::uniform(rng, 0, int(project.activities.size()) - 1)];
            const GeoPoint site = *activity.location;
            const double width = gen::uniform_real(rng, 100.0, 800.0);
            const auto id = s.open_proximity_query("planner", {project.id, activity.id}, width);
            std::vector<std::pair<double, std::string>> truth;
            for (const auto& client : responders) {
                const GeoPoint pos = gen::random_point_near(rng, site, 15.0);
                const auto b = bucket_distance(client, pos, site, width);
                s.submit(client, EventKind::ProximityResponse,
                         Json{{"query_id", id}, {"bucket", b.bucket}, {"width_m", width}});
                truth.emplace_back(oracle::distance_km(pos, site) * 1000.0, client);
            }
            std::sort(truth.begin(), truth.end());
            const auto outcome = s.await_proximity(id, std::chrono::seconds(5));
            const double chosen_m = std::find_if(truth.begin(), truth.end(), [&](const auto& t) {
                                        return t.second == outcome.decision.chosen;
                                    })->first;
            out.expect(chosen_m <= truth.front().first + width, "server query " + std::to_string(q) + ": too far");
            if (truth[1].first - truth[0].first > width && truth[2].first - truth[1].first > width) {
                out.expect(outcome.decision.chosen == truth.front().second,
                           "server query " + std::to_string(q) + ": not the nearest");
            }
            ++served;
        }
        for (const auto& e : s.log()) {
            if (e.kind == EventKind::ProximityQuery || e.kind == EventKind::ProximityResponse) {
                out.expect(!mentions_coordinates(to_json(e)), "stored proximity event " + std::to_string(e.seq));
            }
        }
        for (const auto& d : s.decisions()) {
            out.expect(!mentions_coordinates(d), "stored decision carries coordinates");
        }
        for (const auto& client : responders) {
            for (const auto& e : s.pull(client, 0)) {
                if (e.kind == EventKind::ProximityResponse) {
                    out.expect(!mentions_coordinates(to_json(e)), "served response " + std::to_string(e.seq));
                }
            }
        }
    }
    // What reached the disk, line by line.
    for (const char* file : {"events.jsonl", "decisions.jsonl"}) {
        std::ifstream in(dir.path / file);
        std::string line;
        while (std::getline(in, line)) {
            const Json j = Json::parse(line);
            const std::string kind = j.value("kind", "");
            if (kind == "PROXIMITY_QUERY" || kind == "PROXIMITY_RESPONSE" || std::string(file) == "decisions.jsonl") {
                out.expect(!mentions_coordinates(j), std::string(file) + ": coordinates on disk");
            }
        }
    }
    out.note(std::to_string(separated) + " separated of " + std::to_string(cases) + " cases, " +
             std::to_string(served) + " server queries, no coordinates stored");
}

void replay_determinism(Outcome& out) {
    TempDir dir;
    int pipe_fd[2];
    if (pipe(pipe_fd) != 0) {
        out.expect(false, "pipe failed");
        return;
    }
    // The writer runs in a child process that is killed outright, so nothing
    // gets a chance to flush or snapshot on the way down.
    const pid_t child = fork();
    if (child == 0) {
        close(pipe_fd[0]);
        Server s(ServerOptions{dir.path, 64});
        workload::setup(s);
        workload::Driver driver(7007);
        const auto stats = driver.run(s, 1000);
        const std::string report = s.hash() + " " + std::to_string(stats.accepted) + " " +
                                   std::to_string(stats.regressions_rejected) + " " +
                                   std::to_string(s.state().last_seq) + "\n";
        (void)!write(pipe_fd[1], report.data(), report.size());
        close(pipe_fd[1]);
        kill(getpid(), SIGKILL);
        _exit(3);
    }
    close(pipe_fd[1]);
    std::string report;
    char buf[256];
    ssize_t n = 0;
    while ((n = read(pipe_fd[0], buf, sizeof buf)) > 0) report.append(buf, static_cast<std::size_t>(n));
    close(pipe_fd[0]);
    int status = 0;
    waitpid(child, &status, 0);
    out.expect(WIFSIGNALED(status) && WTERMSIG(status) == SIGKILL, "writer was not killed by SIGKILL");

    std::istringstream is(report);
    std::string before;
    int accepted = 0;
    int live_regressions = 0;
    std::uint64_t last_seq = 0;
    is >> before >> accepted >> live_regressions >> last_seq;
    out.expect(!before.empty() && accepted == 1000, "writer accepted " + std::to_string(accepted) + " events");
    out.expect(live_regressions > 0, "workload produced no regression attempts");

    std::string restored;
    {
        Server again(ServerOptions{dir.path, 64});
        restored = again.hash();
        out.expect(restored == before, "restored hash " + restored + " != " + before);
        out.expect(again.state().last_seq == last_seq, "last seq differs after restart");
        out.expect(again.replay_rejections() == 0, "clean log had rejections on replay");

        // Live: lowering progress is refused and leaves the state alone.
        const auto& pf = again.state().portfolio;
        std::optional<std::pair<ActivityRef, double>> started;
        for (const auto& p : pf.projects) {
            for (const auto& a : p.activities) {
                if (a.progress > 0 && !started) started = {{p.id, a.id}, a.progress};
            }
        }
        out.expect(started.has_value(), "workload left no progress to regress");
        if (!started) return;
        bool refused = false;
        try {
            again.submit("planner", EventKind::ProgressReport,
                         Json{{"project", started->first.project},
                              {"activity", started->first.activity},
                              {"progress", started->second / 2}});
        } catch (const Error& e) {
            refused = e.code() == ErrorCode::ProgressRegression;
        }
        out.expect(refused, "live regression accepted");
        out.expect(again.hash() == restored, "rejected regression changed the state");

        // Replay: the same regression written straight into the log.
        std::ofstream log(dir.path / "events.jsonl", std::ios::app);
        const Event bad{again.state().last_seq + 1, EventKind::ProgressReport, "planner",
                        Json{{"project", started->first.project},
                             {"activity", started->first.activity},
                             {"progress", started->second / 2}},
                        "2026-03-02T12:00:00Z"};
        log << to_json(bad).dump() << "\n";
    }
    Server third(ServerOptions{dir.path, 64});
    out.expect(third.replay_rejections() == 1, "injected regression was not rejected on replay");
    out.expect(third.hash() == restored, "injected regression changed the replayed state");
    out.note("1000 events, hash " + before + " after SIGKILL, " + std::to_string(live_regressions) +
             " live regressions refused");
}

void replan_fixed_point_and_slip(Outcome& out) {
    // Fixed point: nothing reported, replanned at the origin.
    for (const char* name : {"construction.json", "event.json"}) {
        const Portfolio pf = fixtures::load(name);
        for (Minutes t0 : {Minutes{0}, Minutes{45}}) {
            const Schedule base = schedule(pf, t0);
            const ReplanResult r = replan(pf, base, t0);
            out.expect(r.schedule == base, std::string(name) + ": replan differs from baseline");
            out.expect(to_json(r.schedule).dump() == to_json(base).dump(), std::string(name) + ": serialization differs");
            out.expect(r.alerts.empty(), std::string(name) + ": alerts at the fixed point");
        }
    }
    gen::Rng rng(8008);
    for (int i = 0; i < 100; ++i) {
        const Portfolio pf = gen::small_instance(rng, 8, 4);
        const Schedule base = schedule(pf, 10);
        const ReplanResult r = replan(pf, base, 10);
        out.expect(r.schedule == base && r.alerts.empty(), "random instance " + std::to_string(i) + ": not a fixed point");
    }

    // Slip: A1 done, A2 (critical) still at 0% when it was due to finish.
    const Portfolio fixture = fixtures::load("construction.json");
    Portfolio a_only = fixture;
    a_only.projects = {*fixture.find_project("A")};
    const Schedule base = schedule(a_only, 0);
    const auto* a2 = base.find({"A", "A2"});
    const Minutes a2_duration = a_only.find_project("A")->find("A2")->duration_min;
    out.expect(cpm(a_only.projects[0]).at("A2").critical, "A2 is not critical");
    a_only.find_project("A")->find("A1")->progress = 1.0;
    const ReplanResult r = replan(a_only, base, a2->finish);
    const auto s = slips(r);
    out.expect(r.alerts.size() == 1 && s.size() == 1, "expected exactly one alert");
    if (s.size() != 1) return;
    out.expect(s[0].project == "A", "slip reported for " + s[0].project);
    out.expect(s[0].slip_min == a2_duration, "slip " + std::to_string(s[0].slip_min) + " != duration " +
                                                 std::to_string(a2_duration));
    out.expect(verify::schedule_problems(r.schedule, a_only).empty(), "replanned schedule infeasible");

    // Exhaustive optimum over what is left of the project, started at t_now.
    Portfolio rest = a_only;
    auto& acts = rest.projects[0].activities;
    acts.erase(acts.begin());
    acts[0].predecessors.clear();
    const Minutes optimum_finish = a2->finish + brute_force_optimum(rest, 0);
    out.expect(optimum_finish == s[0].new_finish, "brute force finish " + std::to_string(optimum_finish) +
                                                      " != replanned " + std::to_string(s[0].new_finish));

    // Whole fixture: A slips by the same amount.
    Portfolio full = fixture;
    const Schedule full_base = schedule(full, 0);
    full.find_project("A")->find("A1")->progress = 1.0;
    const auto full_slips = slips(replan(full, full_base, a2->finish));
    const auto a_slip = std::find_if(full_slips.begin(), full_slips.end(), [](const auto& x) { return x.project == "A"; });
    out.expect(a_slip != full_slips.end() && a_slip->slip_min == a2_duration, "full fixture: A slip");
    out.note("slip " + std::to_string(s[0].slip_min) + " min, finish " + std::to_string(s[0].new_finish) +
             " matches the exhaustive optimum");
}

struct Criterion {
    int number;
    const char* name;
    std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "cpm equals longest-path enumeration", cpm_matches_path_enumeration},
        {2, "zero-travel schedules start at cpm es", zero_travel_reduces_to_cpm},
        {3, "cpm <= optimum <= schedule, schedules feasible", oracle_bounds},
        {4, "construction fixture transfer warning", construction_transfer_warning},
        {5, "geofence delivery equals distance predicate", geofence_delivery},
        {6, "proximity privacy and nearest choice", proximity_privacy_and_correctness},
        {7, "replay determinism after kill", replay_determinism},
        {8, "replan fixed point and baseline slip", replan_fixed_point_and_slip},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome out;
        const auto start = Clock::now();
        try {
            c.run(out);
        } catch (const std::exception& e) {
            out.expect(false, std::string("exception: ") + e.what());
        }
        const bool ok = out.ok();
        failed += ok ? 0 : 1;
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << c.number << ' ' << c.name << " - " << out.checks() << " checks, "
                  << fmt_seconds(seconds_since(start));
        if (!out.summary().empty()) std::cout << " - " << out.summary();
        std::cout << '\n';
        for (const auto& m : out.messages()) {
            std::cout << "       " << m << '\n';
        }
        if (out.failures() > static_cast<int>(out.messages().size())) {
            std::cout << "       ... " << out.failures() - out.messages().size() << " more\n";
        }
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
