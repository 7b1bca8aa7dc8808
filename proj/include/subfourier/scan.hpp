#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subfourier/ensemble.hpp"
#include "subfourier/params.hpp"

namespace subfourier {

// Full width at half maximum of a sampled peak.
struct PeakWidth {
    double width = 0.0;
    double left = 0.0;   // half-level crossings, linearly interpolated
    double right = 0.0;
    double baseline = 0.0;
    double peak = 0.0;
    double peak_x = 0.0;
    std::size_t peak_index = 0;
};

// Baseline is the median of the samples in the outer 20% of the x range on
// each side, unless given. The maximum must lie between those regions and
// exceed the baseline by at least `significance` times the median of `se`
// (when se is non-empty). Throws AnalysisError otherwise, or when a flank
// never falls to the half level.
PeakWidth peak_width(std::span<const double> x, std::span<const double> y,
                     std::optional<double> baseline = std::nullopt,
                     std::span<const double> se = {}, double significance = 5.0);

// p(0) against r. Member-resolved values are kept for resampling.
struct ResonanceCurve {
    std::vector<double> r;   // strictly increasing
    std::vector<double> p0;
    std::vector<double> se;
    SimParams params;
    std::vector<double> member_weights;
    std::vector<std::vector<double>> member_p0;  // [member][r index]

    void validate() const;
};

struct WidthReport {
    double delta_r = 0.0;
    double left = 0.0;
    double right = 0.0;
    double baseline = 0.0;
    double peak = 0.0;
    double peak_r = 0.0;
    double W = 0.0;                  // delta_r * N1; 1 is the Fourier limit
    double fourier_width = 0.0;      // FWHM of F_1/2(r) for the same N1, tau
    double subfourier_factor = 0.0;  // fourier_width / delta_r
};

struct ScanOptions {
    RunOptions run;
    bool strict_overlap = false;
};

ResonanceCurve scan_resonance(const SimParams& params, std::span<const double> r_grid,
                              const ScanOptions& options);

// As scan_resonance with an explicit member list.
ResonanceCurve scan_members(const SimParams& params, std::span<const double> r_grid,
                            const std::vector<EnsembleMember>& members,
                            const ScanOptions& options);

WidthReport fwhm(const ResonanceCurve& curve);

// Jackknife standard error of delta_r over `groups` interleaved member groups.
double fwhm_error(const ResonanceCurve& curve, int groups = 8);

// Union of two curves on distinct r points (same params and members).
ResonanceCurve merge_curves(const ResonanceCurve& a, const ResonanceCurve& b);

// Symmetric uniform grid with `points` samples (odd counts include center).
std::vector<double> uniform_grid(double center, double half_range, int points);

struct AdaptiveScanOptions {
    double center = 1.0;
    double half_range = 0.05;
    int coarse_points = 41;
    int fine_points = 40;        // spread over 4x the current FWHM estimate
    int min_points_in_width = 10;
    int max_refinements = 3;
};

// Coarse pass over center +- half_range, then fine passes across four
// times the running FWHM estimate until enough samples fall inside it.
// Refinement stops early when no peak width can be measured.
ResonanceCurve adaptive_scan(const SimParams& params, const AdaptiveScanOptions& adaptive,
                             const ScanOptions& options);

struct WidthPoint {
    int N1 = 0;
    double delta_r = 0.0;
    double delta_r_error = 0.0;
    double W = 0.0;
    double slope_local = 0.0;  // d log(delta_r) / d log(N1) from neighbours
    bool ok = false;
    std::string error;
};

struct WidthSeries {
    std::vector<WidthPoint> points;
    double fourier_limit = 1.0;  // W of a Fourier-limited line
};

// Resonance width for each N1. The first scan spans adaptive.half_range;
// later ones span 5x the width predicted from the previous point by 1/N
// scaling. A point fails when no width can be measured or the half-maximum
// interval misses the scan center. Failed points are flagged and skipped.
WidthSeries width_vs_n(const SimParams& params, std::span<const int> N1_list,
                       const AdaptiveScanOptions& adaptive, const ScanOptions& options);

// Log-log slopes between consecutive successful points.
std::vector<double> segment_slopes(const WidthSeries& series);

// Segment slopes split by the localization time: a segment is
// pre-localization when both ends have N1 <= N_L and post-localization when
// both have N1 >= N_L. Segments spanning N_L are in neither list.
struct ScalingRegimes {
    double N_L = 0.0;
    std::vector<double> pre;
    std::vector<double> post;
};
ScalingRegimes classify_slopes(const WidthSeries& series, double N_L);

// N_L of the drive at exact resonance (r = 1, other params unchanged) over
// `kicks` periods, from the ensemble <P^2> series.
double resonance_localization_time(const SimParams& params, int kicks, const RunOptions& options);

struct PhaseAdvance {
    double width = 0.0;         // (r - 1) solving Phi(N) = 1 exactly
    double approximation = 0.0; // 2 hbar / (<P^2> N)
};

// Detuning at which the free-evolution phase accumulated between the N-th
// kicks of the two trains, <P^2> N (r-1)/(2 hbar r), reaches one. Throws
// AnalysisError when <P^2> N <= 2 hbar.
PhaseAdvance phase_advance_width(double mean_p2, double N, double hbar_eff);

// Discrete distribution of kick strengths across the cloud.
struct KDistribution {
    std::vector<double> K;
    std::vector<double> weights;

    static KDistribution single(double K);
    // Cloud with Gaussian transverse density and a Gaussian beam whose
    // intensity waist w is waist_ratio times the cloud rms size sigma:
    // K(rho) = K0 exp(-2 rho^2 / w^2). Gauss-Laguerre nodes in
    // u = rho^2 / (2 sigma^2), which is exponentially distributed.
    static KDistribution beam_profile(double K0, double waist_ratio = 1.6, int nodes = 8);
};

struct InhomogeneousScan {
    ResonanceCurve broadened;
    ResonanceCurve homogeneous;
};

// Weighted average of per-K resonance curves, alongside the curve at the
// nominal params.K.
InhomogeneousScan scan_with_k_inhomogeneity(const SimParams& params, const KDistribution& dist,
                                            std::span<const double> r_grid,
                                            const ScanOptions& options);

// As above on the grid of an existing homogeneous curve, which is reused.
InhomogeneousScan broaden_with_k(const KDistribution& dist, ResonanceCurve homogeneous,
                                 const ScanOptions& options);

// Nodes and weights of n-point Gauss-Laguerre quadrature (weight e^-x).
void gauss_laguerre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace subfourier
