#include "subfourier/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include "subfourier/errors.hpp"
#include "subfourier/fft.hpp"
#include "subfourier/parallel.hpp"

namespace subfourier {

MomentumLadderState MomentumLadderState::plane_wave(std::size_t grid_size, double beta,
                                                    double hbar_eff, int offset) {
    MomentumLadderState s;
    s.beta = beta;
    s.hbar_eff = hbar_eff;
    s.amps.assign(grid_size, cplx(0.0, 0.0));
    const auto index = static_cast<long>(grid_size / 2) + offset;
    if (index < 0 || index >= static_cast<long>(grid_size))
        throw ConfigError("plane_wave: offset outside the ladder");
    s.amps[static_cast<std::size_t>(index)] = 1.0;
    return s;
}

double MomentumLadderState::norm() const {
    double sum = 0.0;
    for (const auto& a : amps) sum += std::norm(a);
    return sum;
}

double MomentumLadderState::edge_population(double fraction) const {
    const std::size_t band =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * size())));
    double sum = 0.0;
    for (std::size_t m = 0; m < band; ++m) sum += std::norm(amps[m]) + std::norm(amps[size() - 1 - m]);
    return sum;
}

namespace {

void apply_phases(MomentumLadderState& state, double dt) {
    if (dt == 0.0) return;
    const double scale = -dt / (2.0 * state.hbar_eff);
    for (std::size_t m = 0; m < state.size(); ++m) {
        const double p = state.momentum(m);
        state.amps[m] *= std::polar(1.0, scale * p * p);
    }
}

// Pointwise factors exp(-i phase cos(theta_j)) / M for the angle grid.
std::vector<cplx> angle_factors(std::size_t M, double phase) {
    std::vector<cplx> f(M);
    const double inv = 1.0 / static_cast<double>(M);
    for (std::size_t j = 0; j < M; ++j)
        f[j] = std::polar(inv, -phase * std::cos(two_pi * static_cast<double>(j) / M));
    return f;
}

void apply_in_angle(MomentumLadderState& state, const std::vector<cplx>& factors) {
    const auto& fft = FftPlan::get(state.size());
    fft.backward(state.amps);
    for (std::size_t j = 0; j < factors.size(); ++j) state.amps[j] *= factors[j];
    fft.forward(state.amps);
}

std::vector<cplx> kinetic_factors(const MomentumLadderState& state, double dt) {
    std::vector<cplx> f(state.size());
    const double scale = -dt / (2.0 * state.hbar_eff);
    for (std::size_t m = 0; m < state.size(); ++m) {
        const double p = state.momentum(m);
        f[m] = std::polar(1.0, scale * p * p);
    }
    return f;
}

void multiply(MomentumLadderState& state, const std::vector<cplx>& factors) {
    for (std::size_t m = 0; m < factors.size(); ++m) state.amps[m] *= factors[m];
}

struct SplitFactors {
    std::vector<cplx> half;
    std::vector<cplx> full;
    std::vector<cplx> potential;
};

SplitFactors split_factors(const MomentumLadderState& state, double amplitude, double h) {
    return {kinetic_factors(state, 0.5 * h), kinetic_factors(state, h),
            angle_factors(state.size(), amplitude * h / state.hbar_eff)};
}

// Strang steps K(h/2) V(h) K(h/2), adjacent half kinetic steps fused.
void split_step(MomentumLadderState& state, const SplitFactors& f, int steps) {
    multiply(state, f.half);
    for (int k = 0; k < steps; ++k) {
        apply_in_angle(state, f.potential);
        multiply(state, k + 1 < steps ? f.full : f.half);
    }
}

// Evolution engine with per-strength kick factor caching.
class Propagator {
public:
    Propagator(MomentumLadderState& state, const EvolveOptions& options)
        : state_(state), options_(options) {}

    double time() const { return time_; }

    void advance_to(double t) {
        if (t > time_) {
            apply_phases(state_, t - time_);
            time_ = t;
        }
    }

    void delta_kick(const KickEvent& e) {
        advance_to(e.time);
        auto it = kick_cache_.find(e.strength);
        if (it == kick_cache_.end())
            it = kick_cache_
                     .emplace(e.strength,
                              angle_factors(state_.size(), e.strength / state_.hbar_eff))
                     .first;
        apply_in_angle(state_, it->second);
    }

    void block(const PulseBlock& b, double width) {
        advance_to(b.start);
        for (const auto& seg : b.segments) {
            const double length = seg.end - seg.start;
            const int floor = substep_floor(seg.amplitude * width, state_.hbar_eff);
            const int per_width = std::max(options_.substeps, floor);
            const int steps =
                std::max(1, static_cast<int>(std::ceil(per_width * length / width - 1e-9)));
            if (length > 0.0 && seg.amplitude == 0.0) {
                apply_phases(state_, length);
            } else if (length > 0.0) {
                // Lengths equal up to rounding share factors.
                const auto key = std::make_tuple(seg.amplitude, std::llround(length * 1e12), steps);
                auto it = split_cache_.find(key);
                if (it == split_cache_.end())
                    it = split_cache_
                             .emplace(key, split_factors(state_, seg.amplitude, length / steps))
                             .first;
                split_step(state_, it->second, steps);
            }
            time_ = seg.end;
        }
    }

    void check_edges(double t) const {
        const double edge = state_.edge_population(options_.edge_fraction);
        if (edge >= options_.edge_tolerance) throw AliasingError(t, edge);
    }

private:
    MomentumLadderState& state_;
    const EvolveOptions& options_;
    double time_ = 0.0;
    std::map<double, std::vector<cplx>> kick_cache_;
    std::map<std::tuple<double, long long, int>, SplitFactors> split_cache_;
};

struct Unit {
    double first_center;
    std::size_t block;  // index into blocks, or npos for a delta event
    std::size_t event;
};

}  // namespace

void free_propagate(MomentumLadderState& state, double dt) {
    if (dt < 0.0) throw ConfigError("free_propagate: dt must be >= 0");
    apply_phases(state, dt);
}

void apply_delta_kick(MomentumLadderState& state, double strength) {
    if (strength < 0.0) throw ConfigError("apply_delta_kick: strength must be >= 0");
    if (strength == 0.0) return;
    apply_in_angle(state, angle_factors(state.size(), strength / state.hbar_eff));
}

int substep_floor(double strength, double hbar_eff) {
    return std::max(default_substeps, static_cast<int>(std::ceil(0.1 * strength / hbar_eff)));
}

void apply_square_pulse(MomentumLadderState& state, double strength, double width,
                        int substeps) {
    if (!(width > 0.0)) throw ConfigError("apply_square_pulse: width must be > 0");
    if (strength < 0.0) throw ConfigError("apply_square_pulse: strength must be >= 0");
    const int floor = substep_floor(strength, state.hbar_eff);
    if (substeps < floor) {
        std::ostringstream os;
        os << "apply_square_pulse: substeps " << substeps << " below floor " << floor;
        throw ConfigError(os.str());
    }
    if (strength == 0.0) {
        apply_phases(state, width);
        return;
    }
    split_step(state, split_factors(state, strength / width, width / substeps), substeps);
}

void evolve_schedule(MomentumLadderState& state, const KickSchedule& schedule,
                     const EvolveOptions& options, std::span<const double> record_times,
                     const SnapshotObserver& observe) {
    if (!std::is_sorted(record_times.begin(), record_times.end()))
        throw ConfigError("evolve_schedule: record times must be ascending");

    double width = 0.0;
    for (const auto& e : schedule.events) width = std::max(width, e.width);
    const bool square = options.shape == PulseShape::square && width > 0.0;

    std::vector<PulseBlock> blocks;
    std::vector<Unit> units;
    constexpr auto npos = static_cast<std::size_t>(-1);
    if (square) {
        blocks = schedule.pulse_blocks();
        std::size_t e = 0;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            units.push_back({schedule.events[e].time, b, e});
            while (e < schedule.events.size() && schedule.events[e].time <= blocks[b].last_center)
                ++e;
        }
    } else {
        for (std::size_t e = 0; e < schedule.events.size(); ++e)
            units.push_back({schedule.events[e].time, npos, e});
    }

    Propagator prop(state, options);
    std::size_t next_record = 0;
    auto flush_until = [&](double limit) {
        while (next_record < record_times.size() && record_times[next_record] < limit) {
            const double t = std::max(record_times[next_record], prop.time());
            prop.advance_to(t);
            prop.check_edges(t);
            if (observe) observe(t, state);
            ++next_record;
        }
    };

    for (const auto& u : units) {
        flush_until(u.first_center - coincidence_tolerance);
        if (u.block == npos)
            prop.delta_kick(schedule.events[u.event]);
        else
            prop.block(blocks[u.block], width);
    }
    flush_until(std::numeric_limits<double>::infinity());
    prop.advance_to(schedule.total_duration);
    prop.check_edges(prop.time());
}

std::vector<Snapshot> evolve_schedule(MomentumLadderState state, const KickSchedule& schedule,
                                      const EvolveOptions& options,
                                      std::span<const double> record_times) {
    std::vector<Snapshot> out;
    evolve_schedule(state, schedule, options, record_times,
                    [&](double t, const MomentumLadderState& s) { out.push_back({t, s}); });
    return out;
}

std::vector<double> classical_diffusion(double K, int kicks, int ensemble_size,
                                        std::uint64_t seed, int workers) {
    if (!(K >= 0.0)) throw ConfigError("classical_diffusion: K must be >= 0");
    if (kicks < 0 || ensemble_size < 1)
        throw ConfigError("classical_diffusion: kicks >= 0 and ensemble_size >= 1 required");

    constexpr int chunk = 4096;
    const int chunks = (ensemble_size + chunk - 1) / chunk;
    std::vector<std::vector<double>> partial(chunks, std::vector<double>(kicks + 1, 0.0));

    parallel_for(static_cast<std::size_t>(chunks), workers, [&](std::size_t c) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(c), 0x5eedu};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> uniform(0.0, two_pi);
        const int begin = static_cast<int>(c) * chunk;
        const int end = std::min(ensemble_size, begin + chunk);
        auto& sums = partial[c];
        for (int i = begin; i < end; ++i) {
            double theta = uniform(rng);
            double p = 0.0;
            for (int n = 1; n <= kicks; ++n) {
                p += K * std::sin(theta);
                theta = std::fmod(theta + p, two_pi);
                if (theta < 0.0) theta += two_pi;
                sums[n] += p * p;
            }
        }
    });

    std::vector<double> p2(kicks + 1, 0.0);
    for (const auto& s : partial)
        for (int n = 0; n <= kicks; ++n) p2[n] += s[n];
    for (auto& v : p2) v /= ensemble_size;
    return p2;
}

}  // namespace subfourier
