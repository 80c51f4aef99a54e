#include <algorithm>
#include <iomanip>
#include <sstream>

#include "locus/scheduler.hpp"

namespace locus {

std::string schedule_csv(const Schedule& schedule) {
    std::ostringstream os;
    os << "activity_id,start,finish,resources,travel_min\n";
    for (const auto& e : schedule.entries) {
        std::string resources;
        for (const auto& r : e.assigned) {
            if (!resources.empty()) {
                resources += ';';
            }
            resources += r;
        }
        os << e.ref.str() << ',' << e.start << ',' << e.finish << ',' << resources << ',' << e.travel_min() << '\n';
    }
    return os.str();
}

std::string gantt_text(const Schedule& schedule, const Portfolio& portfolio, int width) {
    std::ostringstream os;
    if (schedule.entries.empty()) {
        os << "(empty schedule)\n";
        return os.str();
    }
    Minutes lo = schedule.entries.front().start;
    Minutes hi = schedule.entries.front().finish;
    std::size_t label = 0;
    for (const auto& e : schedule.entries) {
        lo = std::min(lo, e.start);
        for (const auto& leg : e.travel) {
            lo = std::min(lo, leg.depart);
        }
        hi = std::max(hi, e.finish);
        label = std::max(label, e.ref.str().size());
    }
    const Minutes span = std::max<Minutes>(1, hi - lo);
    auto column = [&](Minutes t) {
        return static_cast<int>((t - lo) * width / span);
    };

    std::map<std::string, CpmResult> analysis;
    for (const auto& p : portfolio.projects) {
        analysis.emplace(p.id, cpm(p));
    }

    os << std::string(label + 3, ' ') << '|' << lo << std::string(static_cast<std::size_t>(std::max(1, width - 12)), ' ')
       << hi << "|\n";
    for (const auto& e : schedule.entries) {
        bool critical = false;
        if (auto it = analysis.find(e.ref.project); it != analysis.end()) {
            critical = it->second.at(e.ref.activity).critical;
        }
        std::string row(static_cast<std::size_t>(width), ' ');
        for (const auto& leg : e.travel) {
            for (int c = column(leg.depart); c < std::max(column(leg.arrive), column(leg.depart) + 1) && c < width; ++c) {
                row[static_cast<std::size_t>(c)] = '~';
            }
        }
        const int from = column(e.start);
        const int to = std::max(column(e.finish), from + 1);
        for (int c = from; c < to && c < width; ++c) {
            row[static_cast<std::size_t>(c)] = critical ? '#' : '=';
        }
        os << (critical ? '*' : ' ') << ' ' << std::left << std::setw(static_cast<int>(label)) << e.ref.str() << " |"
           << row << "| " << e.start << "-" << e.finish;
        if (!e.assigned.empty()) {
            os << " [";
            for (std::size_t i = 0; i < e.assigned.size(); ++i) {
                os << (i ? "," : "") << e.assigned[i];
            }
            os << "]";
        }
        os << '\n';
    }
    os << "legend: * critical, # critical work, = work, ~ travel\n";
    return os.str();
}

std::string describe_alert(const Alert& alert) {
    std::ostringstream os;
    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, TransferDelayWarning>) {
                os << "TRANSFER_DELAY " << a.resource << ' ' << a.from_activity.str() << " -> " << a.to_activity.str()
                   << " gap=" << a.gap_min << " travel=" << a.travel_min << " shortfall=" << a.shortfall_min;
            } else if constexpr (std::is_same_v<T, BaselineSlip>) {
                os << "BASELINE_SLIP " << a.project << " slip=" << a.slip_min << " baseline_finish=" << a.baseline_finish
                   << " new_finish=" << a.new_finish;
            } else {
                os << "RESOURCE_FAILURE " << a.resource << " affected=";
                for (std::size_t i = 0; i < a.affected.size(); ++i) {
                    os << (i ? "," : "") << a.affected[i].str();
                }
                if (!a.replan_possible) {
                    os << " replan=impossible";
                }
            }
        },
        alert);
    return os.str();
}

}  // namespace locus
