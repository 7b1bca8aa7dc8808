#pragma once

#include <iosfwd>
#include <vector>

#include "subfourier/params.hpp"

namespace subfourier {

// Events closer than this (in units of T1) are one kick.
inline constexpr double coincidence_tolerance = 1e-9;

struct KickEvent {
    double time = 0.0;      // pulse center, units of T1
    double strength = 0.0;  // integrated amplitude, units of K
    double width = 0.0;     // square-pulse duration; 0 = delta kick
};

// A piece of the summed square-pulse amplitude profile.
struct ProfileSegment {
    double start = 0.0;
    double end = 0.0;
    double amplitude = 0.0;  // sum of strength/width of the pulses active here
};

// Maximal group of square pulses whose supports overlap (or touch).
struct PulseBlock {
    double start = 0.0;
    double end = 0.0;
    double last_center = 0.0;
    std::vector<ProfileSegment> segments;
};

struct KickSchedule {
    std::vector<KickEvent> events;  // strictly increasing in time
    double total_duration = 0.0;

    double total_strength() const;
    double min_gap() const;  // smallest spacing between consecutive events

    // Square-pulse blocks with piecewise-constant amplitude profiles. The
    // integral of each block profile equals the sum of its event strengths.
    std::vector<PulseBlock> pulse_blocks() const;
};

// Kicks at t = 1..N1 with strength K (single-frequency train).
KickSchedule build_single_frequency_schedule(const SimParams& params);

// Trains at t = n (n = 1..N1) and t = (n + phi/2pi)/r (n = 1..N2), with
// coincident kicks merged. With strict = true, pulses of width tau that
// would overlap a neighbour are rejected with ConfigError.
KickSchedule build_two_frequency_schedule(const SimParams& params, bool strict = false);

// Kicks at t = n with strength K (1 + A cos(2 pi r n + modulation_phase));
// zero-strength kicks are dropped.
KickSchedule build_modulated_schedule(const SimParams& params);

// Dispatches on params.mode.
KickSchedule build_schedule(const SimParams& params, bool strict = false);

// CSV with columns time,strength,width at 17 significant digits.
void write_schedule_csv(std::ostream& out, const KickSchedule& schedule);

}  // namespace subfourier
