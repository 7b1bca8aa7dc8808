#include "subfourier/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "subfourier/errors.hpp"
#include "subfourier/parallel.hpp"

namespace subfourier {

EnsembleSpec EnsembleSpec::stratified(int count, double sigma_P, std::uint64_t seed) {
    if (count < 1) throw ConfigError("beta_samples: must be >= 1");
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      0xbe7au};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    EnsembleSpec spec;
    spec.sigma_P = sigma_P;
    for (int i = 0; i < count; ++i) spec.betas.push_back((i + uniform(rng)) / count);
    return spec;
}

std::vector<EnsembleMember> make_members(const EnsembleSpec& spec, double hbar_eff) {
    if (spec.betas.empty()) throw ConfigError("ensemble: no beta values");
    if (!(spec.sigma_P >= 0.0)) throw ConfigError("sigma_P: must be >= 0");
    std::vector<EnsembleMember> members;
    for (double beta : spec.betas) {
        if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("ensemble: beta outside [0, 1)");
        if (spec.sigma_P == 0.0) {
            members.push_back({beta, beta < 0.5 ? 0 : -1, 1.0});
            continue;
        }
        const int reach = static_cast<int>(std::ceil(8.0 * spec.sigma_P / hbar_eff)) + 1;
        for (int offset = -reach; offset <= reach; ++offset) {
            const double p0 = (offset + beta) * hbar_eff;
            members.push_back({beta, offset, std::exp(-p0 * p0 / (2.0 * spec.sigma_P * spec.sigma_P))});
        }
    }
    double wmax = 0.0;
    for (const auto& m : members) wmax = std::max(wmax, m.weight);
    std::erase_if(members, [&](const EnsembleMember& m) { return m.weight < spec.weight_cutoff * wmax; });
    double wsum = 0.0;
    for (const auto& m : members) wsum += m.weight;
    for (auto& m : members) m.weight /= wsum;
    return members;
}

double resolve_window(const RunOptions& options, double hbar_eff) {
    return options.window > 0.0 ? options.window : hbar_eff;
}

std::vector<double> kick_record_times(int N1) {
    std::vector<double> t(static_cast<std::size_t>(N1) + 1);
    std::iota(t.begin(), t.end(), 0.0);
    return t;
}

MemberResult simulate_member(const SimParams& params, const KickSchedule& schedule,
                             const EnsembleMember& member, std::span<const double> record_times,
                             const RunOptions& options) {
    const double window = resolve_window(options, params.hbar_eff);
    int grid = params.grid_size;
    for (;;) {
        MemberResult result;
        result.p2.reserve(record_times.size());
        result.p0.reserve(record_times.size());
        result.final_state = MomentumLadderState::plane_wave(static_cast<std::size_t>(grid),
                                                             member.beta, params.hbar_eff,
                                                             member.offset);
        try {
            evolve_schedule(result.final_state, schedule, options.evolve, record_times,
                            [&](double, const MomentumLadderState& s) {
                                result.p2.push_back(mean_p2(s));
                                result.p0.push_back(zero_momentum_population(s, window));
                            });
        } catch (const AliasingError&) {
            if (2 * grid > options.max_grid) throw;
            grid *= 2;
            continue;
        }
        result.grid_size = grid;
        return result;
    }
}

EnsembleRun run_members(const SimParams& params, const KickSchedule& schedule,
                        std::vector<EnsembleMember> members,
                        std::span<const double> record_times, const RunOptions& options) {
    params.validate();
    if (members.empty()) throw ConfigError("ensemble: no members");
    const std::size_t records = record_times.size();

    EnsembleRun run;
    run.members = std::move(members);
    const std::size_t count = run.members.size();
    run.member_p2.assign(count, {});
    run.member_p0.assign(count, {});
    run.grid_sizes.assign(count, params.grid_size);
    std::vector<MomentumLadderState> finals(options.keep_final_states ? count : 0);

    parallel_for(count, options.workers, [&](std::size_t k) {
        auto result = simulate_member(params, schedule, run.members[k], record_times, options);
        run.member_p2[k] = std::move(result.p2);
        run.member_p0[k] = std::move(result.p0);
        run.grid_sizes[k] = result.grid_size;
        if (options.keep_final_states) finals[k] = std::move(result.final_state);
    });

    std::vector<double> weights(count);
    for (std::size_t k = 0; k < count; ++k) weights[k] = run.members[k].weight;
    run.times.assign(record_times.begin(), record_times.end());
    run.mean_p2.assign(records, 0.0);
    run.p0.assign(records, 0.0);
    run.p0_se.assign(records, 0.0);
    std::vector<double> column(count);
    for (std::size_t t = 0; t < records; ++t) {
        for (std::size_t k = 0; k < count; ++k) run.mean_p2[t] += weights[k] * run.member_p2[k][t];
        for (std::size_t k = 0; k < count; ++k) column[k] = run.member_p0[k][t];
        const auto st = weighted_mean(column, weights);
        run.p0[t] = st.mean;
        run.p0_se[t] = st.se;
    }
    if (options.keep_final_states) {
        run.final_states.states = std::move(finals);
        run.final_states.weights = std::move(weights);
    }
    return run;
}

EnsembleRun run_ensemble(const SimParams& params, const KickSchedule& schedule,
                         std::span<const double> record_times, const RunOptions& options) {
    const auto spec = EnsembleSpec::stratified(params.beta_samples, params.sigma_P, params.seed);
    return run_members(params, schedule, make_members(spec, params.hbar_eff), record_times, options);
}

}  // namespace subfourier
