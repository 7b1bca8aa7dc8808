#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "subfourier/dynamics.hpp"
#include "subfourier/observables.hpp"

namespace subfourier {

// One incoherent member of the atom cloud: a plane wave at ladder offset
// `offset` in quasi-momentum class `beta`.
struct EnsembleMember {
    double beta = 0.0;
    int offset = 0;
    double weight = 0.0;

    double initial_momentum(double hbar_eff) const { return (offset + beta) * hbar_eff; }
};

struct EnsembleSpec {
    std::vector<double> betas;
    double sigma_P = 1.0;         // Gaussian width of the initial momentum distribution
    double weight_cutoff = 1e-3;  // members lighter than this (relative to the heaviest) are dropped

    // One jittered sample in each of `count` equal strata of [0, 1).
    static EnsembleSpec stratified(int count, double sigma_P, std::uint64_t seed);
};

// Members with weights proportional to exp(-P0^2 / (2 sigma_P^2)), normalized.
// sigma_P = 0 places one member per beta on the site nearest P = 0.
std::vector<EnsembleMember> make_members(const EnsembleSpec& spec, double hbar_eff);

struct RunOptions {
    EvolveOptions evolve;
    double window = 0.0;          // zero-momentum window; <= 0 selects one ladder spacing
    int max_grid = 1 << 16;       // auto-doubling stops here
    bool keep_final_states = false;
    int workers = 0;              // 0 = hardware concurrency
};

// Per-member observables at each record time plus weighted aggregates.
struct EnsembleRun {
    std::vector<EnsembleMember> members;
    std::vector<double> times;
    std::vector<std::vector<double>> member_p2;  // [member][record]
    std::vector<std::vector<double>> member_p0;
    std::vector<double> mean_p2;
    std::vector<double> p0;
    std::vector<double> p0_se;
    std::vector<int> grid_sizes;  // final grid used per member
    Ensemble final_states;        // filled when keep_final_states
};

double resolve_window(const RunOptions& options, double hbar_eff);

struct MemberResult {
    std::vector<double> p2;  // per record time
    std::vector<double> p0;
    int grid_size = 0;
    MomentumLadderState final_state;
};

// Evolves one member; on AliasingError the grid is doubled and the run
// repeated, up to options.max_grid.
MemberResult simulate_member(const SimParams& params, const KickSchedule& schedule,
                             const EnsembleMember& member, std::span<const double> record_times,
                             const RunOptions& options);

// Evolves every member through the schedule. A member whose ladder edges
// fill up is rerun on a grid twice as large, up to max_grid. Aggregation
// runs in member order, so results do not depend on the worker count.
EnsembleRun run_ensemble(const SimParams& params, const KickSchedule& schedule,
                         std::span<const double> record_times, const RunOptions& options);

// Same as run_ensemble with explicit members (K-inhomogeneity, tests).
EnsembleRun run_members(const SimParams& params, const KickSchedule& schedule,
                        std::vector<EnsembleMember> members,
                        std::span<const double> record_times, const RunOptions& options);

// Record times 0, 1, ..., N1: observables after every kick period.
std::vector<double> kick_record_times(int N1);

}  // namespace subfourier
