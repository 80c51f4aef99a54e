#include <doctest.h>

#include "locus/dispatch.hpp"
#include "locus/error.hpp"
#include "locus/json_io.hpp"
#include "locus/scheduler.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/verifier.hpp"

using namespace locus;

namespace {

const GeoPoint kSite(48.7758, 9.1829);

Resource resource(std::string id, std::string rtype, GeoPoint at, double speed = 50.0) {
    Resource r;
    r.id = std::move(id);
    r.rtype = std::move(rtype);
    r.home = at;
    r.position = at;
    r.speed_kmh = speed;
    return r;
}

Activity located(std::string id, Minutes d, GeoPoint at, std::map<std::string, int> demands) {
    Activity a;
    a.id = std::move(id);
    a.duration_min = d;
    a.location = at;
    a.demands = std::move(demands);
    return a;
}

}  // namespace

TEST_CASE("travel separates two activities sharing one resource") {
    const GeoPoint far = oracle::destination(kSite, 0.0, 50.0);
    Portfolio pf;
    Project p;
    p.id = "P";
    p.activities = {located("A", 30, kSite, {{"crew", 1}}), located("B", 30, far, {{"crew", 1}})};
    pf.projects.push_back(p);
    pf.resources.push_back(resource("R", "crew", kSite));
    const Schedule s = schedule(pf, 0);
    CHECK(verify::schedule_problems(s, pf).empty());
    const auto* first = s.find({"P", "A"});
    const auto* second = s.find({"P", "B"});
    REQUIRE(first);
    REQUIRE(second);
    if (second->start < first->start) std::swap(first, second);
    CHECK(first->start == 0);
    CHECK(second->start == first->finish + 60);
    REQUIRE(second->travel.size() == 1);
    CHECK(second->travel[0].depart == first->finish);
    CHECK(second->travel[0].arrive == first->finish + 60);
    CHECK(s.total_travel_min == 60);
    CHECK(s.makespan == 120);
}

TEST_CASE("schedule origin shifts all times") {
    const Portfolio pf = fixtures::load("construction.json");
    const Schedule s0 = schedule(pf, 0);
    Portfolio shifted = pf;
    for (auto& p : shifted.projects) {
        for (auto& a : p.activities) {
            if (a.committed_start) *a.committed_start += 1000;
        }
    }
    const Schedule s1 = schedule(shifted, 1000);
    REQUIRE(s0.entries.size() == s1.entries.size());
    for (std::size_t i = 0; i < s0.entries.size(); ++i) {
        CHECK(s1.entries[i].start == s0.entries[i].start + 1000);
    }
    CHECK(s1.makespan == s0.makespan);
}

TEST_CASE("zero travel with abundant resources reduces to CPM") {
    gen::Rng rng(77);
    for (int i = 0; i < 100; ++i) {
        const Portfolio pf = gen::abundant_colocated(rng);
        REQUIRE(validate(pf).empty());
        const Schedule s = schedule(pf, 0);
        CHECK(verify::schedule_problems(s, pf).empty());
        CHECK(s.total_travel_min == 0);
        for (const auto& project : pf.projects) {
            const auto ref = oracle::longest_paths(project);
            for (const auto& a : project.activities) {
                CHECK(s.find({project.id, a.id})->start == ref.es.at(a.id));
            }
        }
        CHECK(transfer_warnings(s, pf).empty());
    }
}

TEST_CASE("random schedules are feasible and above the precedence bound") {
    gen::Rng rng(101);
    for (int i = 0; i < 300; ++i) {
        const Portfolio pf = gen::small_instance(rng, 10, 4);
        REQUIRE(validate(pf).empty());
        const Schedule s = schedule(pf, 15);
        const auto problems = verify::schedule_problems(s, pf);
        CHECK_MESSAGE(problems.empty(), (problems.empty() ? "" : problems.front()));
        CHECK(s.makespan >= cpm_makespan(pf));
    }
}

TEST_CASE("schedule is deterministic down to the bytes") {
    for (const char* name : {"construction.json", "event.json"}) {
        const std::string text = fixtures::read(name);
        const std::string a = to_json(schedule(parse_portfolio(text), 0)).dump();
        const std::string b = to_json(schedule(parse_portfolio(text), 0)).dump();
        CHECK(a == b);
    }
}

TEST_CASE("construction fixture layout") {
    const Portfolio pf = fixtures::load("construction.json");
    // The two sites are roughly 100 km apart: two hours for the formwork.
    const GeoPoint x = *pf.projects[0].activities[2].location;
    const GeoPoint y = *pf.projects[1].activities[0].location;
    CHECK(oracle::distance_km(x, y) == doctest::Approx(100.0).epsilon(0.01));
    CHECK(travel_time(x, y, 50.0) == 120);

    const Schedule s = schedule(pf, 0);
    CHECK(verify::schedule_problems(s, pf).empty());
    const auto* a3 = s.find({"A", "A3"});
    const auto* b1 = s.find({"B", "B1"});
    CHECK(a3->finish == 900);
    CHECK(b1->start == 930);
    CHECK(std::count(b1->assigned.begin(), b1->assigned.end(), "R1") == 1);
}

TEST_CASE("formwork from the far depot makes the portfolio later") {
    const Portfolio near = fixtures::load("construction.json");
    Portfolio far = near;
    Resource* r1 = far.find_resource("R1");
    r1->position = r1->home;  // still at the central depot
    CHECK(oracle::distance_km(r1->home, *near.find_resource("R1")->position) > 150.0);
    const Schedule sn = schedule(near, 0);
    const Schedule sf = schedule(far, 0);
    CHECK(verify::schedule_problems(sf, far).empty());
    CHECK(sf.makespan > sn.makespan);
}

TEST_CASE("failed resources are not scheduled, unsatisfiable pools are an error") {
    Portfolio pf = fixtures::load("construction.json");
    pf.find_resource("M1")->status = ResourceStatus::Failed;
    try {
        schedule(pf, 0);
        FAIL("scheduled without a mixer");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Unsatisfiable);
    }
    Resource spare = *pf.find_resource("M1");
    spare.id = "M2";
    spare.status = ResourceStatus::Available;
    pf.resources.push_back(spare);
    const Schedule s = schedule(pf, 0);
    CHECK(verify::schedule_problems(s, pf).empty());
    for (const auto& e : s.entries) {
        CHECK(std::find(e.assigned.begin(), e.assigned.end(), "M1") == e.assigned.end());
    }
}

TEST_CASE("location-free activities need no travel and keep resources in place") {
    Portfolio pf;
    Project p;
    p.id = "P";
    Activity desk;
    desk.id = "D";
    desk.duration_min = 10;
    desk.demands = {{"crew", 1}};
    Activity field = located("F", 10, oracle::destination(kSite, 90, 25), {{"crew", 1}});
    field.predecessors = {"D"};
    p.activities = {desk, field};
    pf.projects.push_back(p);
    pf.resources.push_back(resource("R", "crew", kSite));
    const Schedule s = schedule(pf, 0);
    CHECK(verify::schedule_problems(s, pf).empty());
    CHECK(s.find({"P", "D"})->travel.empty());
    REQUIRE(s.find({"P", "F"})->travel.size() == 1);
    CHECK(s.find({"P", "F"})->travel[0].from == kSite);
    CHECK(s.find({"P", "F"})->start == 10 + 30);
}

TEST_CASE("the resource that is already free wins over a nearer busy one") {
    Portfolio pf;
    Project p;
    p.id = "P";
    const GeoPoint other = oracle::destination(kSite, 180, 10);
    p.activities = {located("A", 100, kSite, {{"crew", 1}}), located("B", 10, kSite, {{"crew", 1}})};
    pf.projects.push_back(p);
    pf.resources = {resource("R1", "crew", kSite), resource("R2", "crew", other)};
    const Schedule s = schedule(pf, 0);
    CHECK(verify::schedule_problems(s, pf).empty());
    // B cannot use R1 before 100, R2 arrives after 12 minutes.
    CHECK(s.find({"P", "B"})->assigned == std::vector<std::string>{"R2"});
    CHECK(s.find({"P", "B"})->start == 12);
}

TEST_CASE("schedule JSON round-trips") {
    const Portfolio pf = fixtures::load("event.json");
    const Schedule s = schedule(pf, 0);
    CHECK(schedule_from_json(to_json(s)) == s);
}
