#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "subfourier/schedule.hpp"

namespace subfourier {

using cplx = std::complex<double>;

// Amplitudes on the momentum ladder P_m = (m - M/2 + beta) * hbar_eff of a
// single quasi-momentum class. beta never changes under the evolution.
struct MomentumLadderState {
    double beta = 0.0;
    double hbar_eff = 1.0;
    std::vector<cplx> amps;

    // All population on ladder index M/2 + offset.
    static MomentumLadderState plane_wave(std::size_t grid_size, double beta, double hbar_eff,
                                          int offset = 0);

    std::size_t size() const { return amps.size(); }
    std::size_t center() const { return amps.size() / 2; }
    double momentum(std::size_t m) const {
        return (static_cast<double>(m) - static_cast<double>(center()) + beta) * hbar_eff;
    }
    double norm() const;
    // Population in the outermost `fraction` of indices at each end.
    double edge_population(double fraction = 0.05) const;
};

// amps[m] *= exp(-i P_m^2 dt / (2 hbar_eff))
void free_propagate(MomentumLadderState& state, double dt);

// exp(-i strength cos(theta) / hbar_eff), applied in the angle representation
// theta_j = 2 pi j / M.
void apply_delta_kick(MomentumLadderState& state, double strength);

// Minimum split-step count accepted for a pulse of the given strength.
int substep_floor(double strength, double hbar_eff);
inline constexpr int default_substeps = 20;

// Strang splitting of H = P^2/2 + (strength/width) cos(theta) over `width`.
// Throws ConfigError when substeps < substep_floor(strength, hbar_eff).
void apply_square_pulse(MomentumLadderState& state, double strength, double width,
                        int substeps = default_substeps);

enum class PulseShape { delta, square };

struct EvolveOptions {
    PulseShape shape = PulseShape::square;  // square with zero width is a delta kick
    int substeps = default_substeps;        // per pulse width
    double edge_fraction = 0.05;
    double edge_tolerance = 1e-8;
};

using SnapshotObserver = std::function<void(double time, const MomentumLadderState&)>;

// Runs `state` through the schedule up to its total duration. For every
// record time t (ascending), `observe` receives the state right after the
// last event centered at or before t; the reported time is t, or the end
// of the pulse block when that lies later. Throws AliasingError if the
// ladder edges are populated at a snapshot or at the end.
void evolve_schedule(MomentumLadderState& state, const KickSchedule& schedule,
                     const EvolveOptions& options, std::span<const double> record_times,
                     const SnapshotObserver& observe);

struct Snapshot {
    double time = 0.0;
    MomentumLadderState state;
};

std::vector<Snapshot> evolve_schedule(MomentumLadderState state, const KickSchedule& schedule,
                                      const EvolveOptions& options,
                                      std::span<const double> record_times);

// Standard map P <- P + K sin(theta), theta <- theta + P (mod 2 pi) for
// `ensemble_size` trajectories with uniform random theta and P = 0.
// Element n of the result is <P^2> after n kicks (element 0 is the start).
// The result depends on seed only, not on the worker count.
std::vector<double> classical_diffusion(double K, int kicks, int ensemble_size,
                                        std::uint64_t seed, int workers = 0);

}  // namespace subfourier
