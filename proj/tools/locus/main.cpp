// locus: planner/operator command line.
//
//   locus validate <portfolio.json> [--strict]
//   locus schedule <portfolio.json> [--t0 N] [--format gantt-text|json|csv]
//   locus report   <portfolio.json> [--t0 N]
//   locus serve    [--port N] [--data-dir DIR] [--fixture FILE]
//   locus simulate <script.json> --server http://127.0.0.1:8080
//
// Exit codes: 0 ok, 1 domain findings or failures, 2 usage or I/O errors.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "locus/dispatch.hpp"
#include "locus/error.hpp"
#include "locus/json_io.hpp"
#include "locus/scheduler.hpp"
#include "locus/server/http_api.hpp"
#include "locus/server/server.hpp"
#include "simulate.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFindings = 1;
constexpr int kUsage = 2;

struct LoadResult {
    std::optional<locus::Portfolio> portfolio;
    int exit_code = kOk;
};

LoadResult load_portfolio(const std::string& path, bool strict) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "IO_ERROR " << path << " cannot be read\n";
        return {std::nullopt, kUsage};
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return {locus::parse_portfolio(buf.str(), {.strict = strict}), kOk};
    } catch (const locus::Error& e) {
        std::cout << to_string(e.code()) << ' ' << path << ' ' << e.detail() << '\n';
        return {std::nullopt, kFindings};
    }
}

bool report_findings(const locus::Portfolio& portfolio, std::ostream& out) {
    const auto findings = locus::validate(portfolio);
    for (const auto& f : findings) {
        out << f.code << ' ' << f.entity << ' ' << f.message << '\n';
    }
    return findings.empty();
}

int cmd_validate(const std::string& path, bool strict) {
    auto loaded = load_portfolio(path, strict);
    if (!loaded.portfolio) {
        return loaded.exit_code;
    }
    return report_findings(*loaded.portfolio, std::cout) ? kOk : kFindings;
}

int cmd_schedule(const std::string& path, locus::Minutes t0, const std::string& format, bool strict) {
    auto loaded = load_portfolio(path, strict);
    if (!loaded.portfolio) {
        return loaded.exit_code;
    }
    const auto& portfolio = *loaded.portfolio;
    if (!report_findings(portfolio, std::cerr)) {
        return kFindings;
    }
    locus::Schedule plan;
    try {
        plan = locus::schedule(portfolio, t0);
    } catch (const locus::Error& e) {
        std::cerr << to_string(e.code()) << ' ' << e.detail() << '\n';
        return kFindings;
    }
    const auto costs = locus::cost_rollup(plan, portfolio);
    const auto warnings = locus::transfer_warnings(plan, portfolio);

    if (format == "csv") {
        std::cout << locus::schedule_csv(plan);
    } else if (format == "json") {
        locus::Json w = locus::Json::array();
        for (const auto& warning : warnings) {
            w.push_back(locus::to_json(locus::Alert{warning}));
        }
        locus::Json doc{{"schedule", locus::to_json(plan)}, {"costs", locus::to_json(costs)}, {"warnings", w}};
        std::cout << doc.dump(2) << '\n';
    } else {
        std::cout << locus::gantt_text(plan, portfolio);
        std::cout << "\nmakespan " << plan.makespan << " min, travel " << plan.total_travel_min << " min\n";
        std::cout << "\ncosts\n";
        for (const auto& p : costs.projects) {
            std::cout << "  " << p.project << " labor " << locus::format_cents(p.labor) << " travel "
                      << locus::format_cents(p.travel) << " fixed " << locus::format_cents(p.fixed) << " total "
                      << locus::format_cents(p.total()) << '\n';
        }
        std::cout << "  portfolio total " << locus::format_cents(costs.total()) << '\n';
        std::cout << "\ntransfer warnings: " << warnings.size() << '\n';
        for (const auto& w : warnings) {
            std::cout << "  " << locus::describe_alert(w) << '\n';
        }
    }
    return kOk;
}

int cmd_report(const std::string& path, locus::Minutes t0, bool strict) {
    auto loaded = load_portfolio(path, strict);
    if (!loaded.portfolio) {
        return loaded.exit_code;
    }
    const auto& portfolio = *loaded.portfolio;
    if (!report_findings(portfolio, std::cerr)) {
        return kFindings;
    }
    for (const auto& project : portfolio.projects) {
        const auto analysis = locus::cpm(project);
        std::cout << "project " << project.id << " (" << project.name << ") critical-path length "
                  << analysis.makespan << " min\n";
        std::cout << "  activity            es     ef     ls     lf  slack\n";
        for (std::size_t i = 0; i < analysis.ids.size(); ++i) {
            const auto& t = analysis.times[i];
            std::cout << (t.critical ? "* " : "  ") << std::left << std::setw(14) << analysis.ids[i] << std::right
                      << std::setw(7) << t.es << std::setw(7) << t.ef << std::setw(7) << t.ls << std::setw(7) << t.lf
                      << std::setw(7) << t.slack << '\n';
        }
    }
    try {
        const auto plan = locus::schedule(portfolio, t0);
        const auto costs = locus::cost_rollup(plan, portfolio);
        std::cout << "\nschedule makespan " << plan.makespan << " min (precedence bound "
                  << locus::cpm_makespan(portfolio) << "), travel " << plan.total_travel_min << " min\n";
        std::cout << "cost labor " << locus::format_cents(costs.labor) << " travel "
                  << locus::format_cents(costs.travel) << " fixed " << locus::format_cents(costs.fixed) << " total "
                  << locus::format_cents(costs.total()) << '\n';
        for (const auto& w : locus::transfer_warnings(plan, portfolio)) {
            std::cout << locus::describe_alert(w) << '\n';
        }
    } catch (const locus::Error& e) {
        std::cerr << to_string(e.code()) << ' ' << e.detail() << '\n';
        return kFindings;
    }
    return kOk;
}

int cmd_serve(const std::string& host, int port, std::string data_dir, const std::string& fixture,
              std::size_t snapshot_every, const std::string& webui) {
    if (data_dir.empty()) {
        const char* env = std::getenv("LOCUS_DATA_DIR");
        data_dir = env && *env ? env : "locus-data";
    }

    // Signals are taken by a dedicated thread so the HTTP workers never see them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    std::unique_ptr<locus::server::Server> server;
    try {
        locus::server::ServerOptions options;
        options.data_dir = data_dir;
        options.snapshot_every = snapshot_every;
        server = std::make_unique<locus::server::Server>(options);
    } catch (const locus::Error& e) {
        std::cerr << "cannot open data dir: " << e.what() << '\n';
        return kUsage;
    }

    if (!fixture.empty() && server->state().last_seq == 0) {
        auto loaded = load_portfolio(fixture, false);
        if (!loaded.portfolio) {
            return loaded.exit_code;
        }
        const std::string actor =
            loaded.portfolio->projects.empty() ? "planner" : loaded.portfolio->projects.front().owner;
        try {
            server->submit(actor, locus::server::EventKind::PlanUpsert, locus::to_json(*loaded.portfolio));
        } catch (const locus::Error& e) {
            std::cerr << "fixture rejected: " << e.what() << '\n';
            return kFindings;
        }
    }

    locus::server::HttpApi api(*server, webui.empty() ? std::nullopt
                                                      : std::optional<std::filesystem::path>(webui));
    if (!api.bind(host, port)) {
        std::cerr << "cannot bind " << host << ':' << port << '\n';
        return kUsage;
    }
    std::cout << "listening on " << host << ':' << api.port() << " data " << data_dir << " hash "
              << server->hash() << std::endl;

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        api.stop();
    });
    api.serve();
    server->write_snapshot();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"locus - location-aware project planning and coordination"};
    app.require_subcommand(1);

    bool strict = false;
    std::string file;
    locus::Minutes t0 = 0;
    std::string format = "gantt-text";

    auto* validate = app.add_subcommand("validate", "Check a portfolio file");
    validate->add_option("file", file, "portfolio JSON")->required();
    validate->add_flag("--strict", strict, "reject unknown fields");

    auto* schedule = app.add_subcommand("schedule", "Schedule a portfolio");
    schedule->add_option("file", file, "portfolio JSON")->required();
    schedule->add_option("--t0", t0, "planning start in minutes since the epoch");
    schedule->add_option("--format", format, "gantt-text, json or csv")
        ->check(CLI::IsMember({"gantt-text", "json", "csv"}));
    schedule->add_flag("--strict", strict, "reject unknown fields");

    auto* report = app.add_subcommand("report", "Critical path and cost report");
    report->add_option("file", file, "portfolio JSON")->required();
    report->add_option("--t0", t0, "planning start in minutes since the epoch");
    report->add_flag("--strict", strict, "reject unknown fields");

    std::string host = "127.0.0.1";
    int port = 8080;
    std::string data_dir;
    std::string fixture;
    std::size_t snapshot_every = 100;
    std::string webui;
    auto* serve = app.add_subcommand("serve", "Run the project server");
    serve->add_option("--port", port, "TCP port (0 picks a free one)");
    serve->add_option("--host", host, "bind address");
    serve->add_option("--data-dir", data_dir, "event log directory (default $LOCUS_DATA_DIR)");
    serve->add_option("--fixture", fixture, "portfolio to load when the log is empty");
    serve->add_option("--snapshot-every", snapshot_every, "events between snapshots");
    serve->add_option("--webui", webui, "directory served at /");

    std::string server_url = "http://127.0.0.1:8080";
    auto* simulate = app.add_subcommand("simulate", "Drive scripted field clients against a server");
    simulate->add_option("script", file, "SimScript JSON")->required();
    simulate->add_option("--server", server_url, "server base URL");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (*validate) return cmd_validate(file, strict);
    if (*schedule) return cmd_schedule(file, t0, format, strict);
    if (*report) return cmd_report(file, t0, strict);
    if (*serve) return cmd_serve(host, port, data_dir, fixture, snapshot_every, webui);
    if (*simulate) return locus::cli::run_simulation(file, server_url, std::cout, std::cerr);
    return kUsage;
}
