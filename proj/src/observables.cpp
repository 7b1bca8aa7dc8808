#include "subfourier/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "subfourier/errors.hpp"

namespace subfourier {

void Ensemble::validate() const {
    if (states.empty()) throw ConfigError("ensemble: no members");
    if (states.size() != weights.size()) throw ConfigError("ensemble: weights/states size mismatch");
    for (const auto& s : states)
        if (s.hbar_eff != states.front().hbar_eff)
            throw ConfigError("ensemble: members disagree on hbar_eff");
    for (double w : weights)
        if (!(w >= 0.0)) throw ConfigError("ensemble: negative weight");
}

double MomentumDistribution::total() const {
    return std::accumulate(prob.begin(), prob.end(), 0.0);
}

MomentumDistribution momentum_distribution(const Ensemble& ensemble, double bin_width) {
    ensemble.validate();
    const double hbar = ensemble.states.front().hbar_eff;
    if (!(bin_width >= 0.5 * hbar))
        throw ConfigError("momentum_distribution: bin width below half the ladder spacing");

    const double wsum = std::accumulate(ensemble.weights.begin(), ensemble.weights.end(), 0.0);
    long lo = std::numeric_limits<long>::max();
    long hi = std::numeric_limits<long>::min();
    for (const auto& s : ensemble.states) {
        lo = std::min(lo, std::lround(s.momentum(0) / bin_width));
        hi = std::max(hi, std::lround(s.momentum(s.size() - 1) / bin_width));
    }

    MomentumDistribution dist;
    dist.bin_width = bin_width;
    dist.prob.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (long b = lo; b <= hi; ++b) dist.P.push_back(static_cast<double>(b) * bin_width);
    for (std::size_t k = 0; k < ensemble.states.size(); ++k) {
        const auto& s = ensemble.states[k];
        const double w = ensemble.weights[k] / wsum;
        for (std::size_t m = 0; m < s.size(); ++m) {
            const long b = std::lround(s.momentum(m) / bin_width);
            dist.prob[static_cast<std::size_t>(b - lo)] += w * std::norm(s.amps[m]);
        }
    }
    return dist;
}

double zero_momentum_population(const MomentumLadderState& state, double window) {
    if (!(window > 0.0)) throw ConfigError("zero_momentum_population: window must be > 0");
    if (window < state.hbar_eff * (1.0 - 1e-12))
        throw ConfigError("zero_momentum_population: window narrower than the ladder spacing");
    const double half = 0.5 * window * (1.0 + 1e-12);
    double sum = 0.0;
    for (std::size_t m = 0; m < state.size(); ++m)
        if (std::abs(state.momentum(m)) <= half) sum += std::norm(state.amps[m]);
    return sum;
}

double zero_momentum_population(const Ensemble& ensemble, double window) {
    ensemble.validate();
    const double wsum = std::accumulate(ensemble.weights.begin(), ensemble.weights.end(), 0.0);
    double p0 = 0.0;
    for (std::size_t k = 0; k < ensemble.states.size(); ++k)
        p0 += ensemble.weights[k] / wsum * zero_momentum_population(ensemble.states[k], window);
    return p0;
}

double mean_p2(const MomentumLadderState& state) {
    double sum = 0.0;
    for (std::size_t m = 0; m < state.size(); ++m) {
        const double p = state.momentum(m);
        sum += p * p * std::norm(state.amps[m]);
    }
    return sum;
}

double mean_kinetic_energy(const Ensemble& ensemble) {
    ensemble.validate();
    const double wsum = std::accumulate(ensemble.weights.begin(), ensemble.weights.end(), 0.0);
    double e = 0.0;
    for (std::size_t k = 0; k < ensemble.states.size(); ++k)
        e += ensemble.weights[k] / wsum * mean_p2(ensemble.states[k]);
    return 0.5 * e;
}

LocalizationFit fit_localization_length(const MomentumDistribution& dist, double floor) {
    // Central bin: the one nearest P = 0.
    std::size_t central = 0;
    for (std::size_t i = 1; i < dist.P.size(); ++i)
        if (std::abs(dist.P[i]) < std::abs(dist.P[central])) central = i;

    std::vector<double> x, y;
    for (std::size_t i = 0; i < dist.P.size(); ++i) {
        if (i == central || !(dist.prob[i] > floor)) continue;
        x.push_back(std::abs(dist.P[i]));
        y.push_back(std::log(dist.prob[i]));
    }
    if (x.size() < 10) throw AnalysisError("fit_localization_length: fewer than 10 bins above floor");

    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw AnalysisError("fit_localization_length: all bins at one |P|");
    const double slope = sxy / sxx;
    if (!(slope < 0.0)) throw AnalysisError("fit_localization_length: profile does not decay");

    LocalizationFit fit;
    fit.L = -1.0 / slope;
    fit.amplitude = std::exp(my - slope * mx);
    fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    fit.bins = x.size();
    return fit;
}

namespace {

struct Line {
    double intercept;
    double slope;
};

Line fit_line(std::span<const double> p2, std::size_t begin, std::size_t end) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += p2[i];
        sxx += x * x;
        sxy += x * p2[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {(sy - slope * sx) / n, slope};
}

}  // namespace

double estimate_localization_time(std::span<const double> p2) {
    if (p2.size() < 21) throw AnalysisError("estimate_localization_time: need at least 20 kicks");
    const std::size_t kicks = p2.size() - 1;
    const auto early_end = static_cast<std::size_t>(std::floor(0.2 * kicks)) + 1;
    const auto late_begin = static_cast<std::size_t>(std::ceil(0.8 * kicks));

    const Line early = fit_line(p2, 0, early_end);
    const Line late = fit_line(p2, late_begin, p2.size());
    if (!(early.slope > 0.0)) throw AnalysisError("estimate_localization_time: no early growth");
    if (late.slope > 0.2 * early.slope)
        throw AnalysisError("estimate_localization_time: not localized (no plateau)");

    double plateau = 0.0;
    for (std::size_t i = late_begin; i < p2.size(); ++i) plateau += p2[i];
    plateau /= static_cast<double>(p2.size() - late_begin);
    return (plateau - early.intercept) / early.slope;
}

WeightedStats weighted_mean(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size() || values.empty())
        throw ConfigError("weighted_mean: size mismatch or empty input");
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(wsum > 0.0)) throw ConfigError("weighted_mean: weights sum to zero");
    WeightedStats st;
    for (std::size_t i = 0; i < values.size(); ++i) st.mean += weights[i] / wsum * values[i];
    double var = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = weights[i] / wsum;
        var += w * w * (values[i] - st.mean) * (values[i] - st.mean);
    }
    st.se = std::sqrt(var);
    return st;
}

}  // namespace subfourier
