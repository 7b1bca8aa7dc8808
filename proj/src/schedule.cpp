#include "subfourier/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "subfourier/csv.hpp"
#include "subfourier/errors.hpp"

namespace subfourier {

double KickSchedule::total_strength() const {
    double sum = 0.0;
    for (const auto& e : events) sum += e.strength;
    return sum;
}

double KickSchedule::min_gap() const {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < events.size(); ++i)
        gap = std::min(gap, events[i].time - events[i - 1].time);
    return gap;
}

std::vector<PulseBlock> KickSchedule::pulse_blocks() const {
    std::vector<PulseBlock> blocks;
    std::size_t i = 0;
    while (i < events.size()) {
        // Grow the block while the next pulse starts before the current end.
        std::size_t j = i;
        double end = events[i].time + 0.5 * events[i].width;
        while (j + 1 < events.size() &&
               events[j + 1].time - 0.5 * events[j + 1].width <= end) {
            ++j;
            end = std::max(end, events[j].time + 0.5 * events[j].width);
        }

        std::vector<double> cuts;
        for (std::size_t k = i; k <= j; ++k) {
            cuts.push_back(events[k].time - 0.5 * events[k].width);
            cuts.push_back(events[k].time + 0.5 * events[k].width);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        PulseBlock block;
        block.start = cuts.front();
        block.end = cuts.back();
        block.last_center = events[j].time;
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double mid = 0.5 * (cuts[c] + cuts[c + 1]);
            double amplitude = 0.0;
            for (std::size_t k = i; k <= j; ++k) {
                const auto& e = events[k];
                if (std::abs(mid - e.time) < 0.5 * e.width) amplitude += e.strength / e.width;
            }
            block.segments.push_back({cuts[c], cuts[c + 1], amplitude});
        }
        blocks.push_back(std::move(block));
        i = j + 1;
    }
    return blocks;
}

namespace {

// Sorts and merges events closer than the coincidence tolerance.
std::vector<KickEvent> merge_coincident(std::vector<KickEvent> events) {
    std::sort(events.begin(), events.end(),
              [](const KickEvent& a, const KickEvent& b) { return a.time < b.time; });
    std::vector<KickEvent> merged;
    for (const auto& e : events) {
        if (!merged.empty() && e.time - merged.back().time <= coincidence_tolerance) {
            merged.back().strength += e.strength;
        } else {
            merged.push_back(e);
        }
    }
    return merged;
}

}  // namespace

KickSchedule build_single_frequency_schedule(const SimParams& params) {
    params.validate();
    KickSchedule schedule;
    schedule.total_duration = params.total_duration();
    if (params.K == 0.0) return schedule;
    for (int n = 1; n <= params.N1; ++n)
        schedule.events.push_back({static_cast<double>(n), params.K, params.tau});
    return schedule;
}

KickSchedule build_two_frequency_schedule(const SimParams& params, bool strict) {
    params.validate();
    KickSchedule schedule;
    schedule.total_duration = params.total_duration();
    if (params.K == 0.0) return schedule;

    std::vector<KickEvent> events;
    for (int n = 1; n <= params.N1; ++n)
        events.push_back({static_cast<double>(n), params.K, params.tau});
    const double offset = params.phi / two_pi;
    const int n2 = params.resolved_N2();
    for (int n = 1; n <= n2; ++n)
        events.push_back({(n + offset) / params.r, params.K, params.tau});
    schedule.events = merge_coincident(std::move(events));

    if (strict && params.tau > 0.0 && schedule.events.size() > 1 &&
        schedule.min_gap() <= params.tau) {
        std::ostringstream os;
        os << "tau: pulses of width " << params.tau << " overlap (minimum gap "
           << schedule.min_gap() << ")";
        throw ConfigError(os.str());
    }
    return schedule;
}

KickSchedule build_modulated_schedule(const SimParams& params) {
    params.validate();
    KickSchedule schedule;
    schedule.total_duration = params.total_duration();
    const double cutoff = 1e-12 * params.K * (1.0 + params.A);
    for (int n = 1; n <= params.N1; ++n) {
        const double s = params.K * (1.0 + params.A * std::cos(two_pi * params.r * n +
                                                              params.modulation_phase));
        if (s > cutoff) schedule.events.push_back({static_cast<double>(n), s, params.tau});
    }
    return schedule;
}

KickSchedule build_schedule(const SimParams& params, bool strict) {
    switch (params.mode) {
        case DriveMode::single: return build_single_frequency_schedule(params);
        case DriveMode::two_train: return build_two_frequency_schedule(params, strict);
        case DriveMode::modulated: return build_modulated_schedule(params);
    }
    throw ConfigError("mode: unsupported");
}

void write_schedule_csv(std::ostream& out, const KickSchedule& schedule) {
    CsvWriter csv(out, {"time", "strength", "width"});
    for (const auto& e : schedule.events) csv.row({e.time, e.strength, e.width});
}

}  // namespace subfourier
