#pragma once

#include <span>
#include <vector>

#include "subfourier/dynamics.hpp"

namespace subfourier {

// Incoherent mixture of ladder states (one per quasi-momentum class and
// initial ladder offset). Weights sum to one.
struct Ensemble {
    std::vector<MomentumLadderState> states;
    std::vector<double> weights;

    void validate() const;
};

struct MomentumDistribution {
    std::vector<double> P;     // bin centers, ascending
    std::vector<double> prob;  // bin probabilities
    double bin_width = 0.0;

    double total() const;
};

// Weighted |amps|^2 histogrammed on bins centered at multiples of bin_width.
MomentumDistribution momentum_distribution(const Ensemble& ensemble, double bin_width);

// Probability in |P| <= window/2. A window narrower than the ladder spacing
// is rejected: it could miss every site of a ladder.
double zero_momentum_population(const MomentumLadderState& state, double window);
double zero_momentum_population(const Ensemble& ensemble, double window);

// <P^2> of one state.
double mean_p2(const MomentumLadderState& state);
// Weighted <P^2>/2.
double mean_kinetic_energy(const Ensemble& ensemble);

struct LocalizationFit {
    double L = 0.0;          // exp(-|P|/L) decay length, reduced units
    double amplitude = 0.0;  // fitted p at P = 0
    double r_squared = 0.0;
    std::size_t bins = 0;

    // Linear fit of log p against |P| explains at least 95% of the variance.
    bool exponential() const { return r_squared >= 0.95; }
};

// Least squares of log p versus |P| over bins with p > floor, excluding the
// bin closest to P = 0. Throws AnalysisError with fewer than 10 usable bins
// or a non-decaying profile.
LocalizationFit fit_localization_length(const MomentumDistribution& dist, double floor = 1e-8);

// Kick count where the early linear growth (first 20% of the series) meets
// the late plateau (mean of the last 20%). Element i of p2 is <P^2> after
// kick i. Throws AnalysisError when the late slope exceeds 20% of the early
// slope or the series is shorter than 20 kicks.
double estimate_localization_time(std::span<const double> p2);

struct WeightedStats {
    double mean = 0.0;
    double se = 0.0;  // standard error of the weighted mean
};

// Weighted mean with standard error sqrt(sum w_i^2 (x_i - mean)^2), weights
// normalized internally.
WeightedStats weighted_mean(std::span<const double> values, std::span<const double> weights);

}  // namespace subfourier
