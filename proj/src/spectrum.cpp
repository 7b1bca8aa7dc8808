#include "subfourier/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "subfourier/errors.hpp"
#include "subfourier/scan.hpp"

namespace subfourier {

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

double kick_train_power(const KickSchedule& schedule, double f) {
    std::complex<double> sum(0.0, 0.0);
    for (const auto& e : schedule.events) {
        const double envelope = e.width > 0.0 ? sinc(std::numbers::pi * f * e.width) : 1.0;
        sum += std::polar(e.strength * envelope, two_pi * f * e.time);
    }
    return std::norm(sum);
}

SpectrumCurve sequence_spectrum(const KickSchedule& schedule, std::span<const double> f) {
    SpectrumCurve curve;
    curve.f.assign(f.begin(), f.end());
    curve.power.reserve(f.size());
    for (double x : f) curve.power.push_back(kick_train_power(schedule, x));
    curve.events = schedule.events.size();
    curve.total_strength = schedule.total_strength();
    return curve;
}

FHalfCurve f_half(const SimParams& params, std::span<const double> r_grid) {
    FHalfCurve curve;
    SimParams p = params;
    p.mode = DriveMode::two_train;
    p.phi = 0.0;
    p.K = 1.0;
    double peak = 0.0;
    for (double r : r_grid) {
        p.r = r;
        const auto schedule = build_two_frequency_schedule(p);
        const double value = kick_train_power(schedule, 0.5 * (1.0 + r));
        curve.r.push_back(r);
        curve.F12.push_back(value);
        peak = std::max(peak, value);
    }
    if (peak > 0.0)
        for (auto& v : curve.F12) v /= peak;
    return curve;
}

double f_half_width(const SimParams& params) {
    constexpr int points = 2001;
    const double half_range = 3.0 / params.N1;
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) grid[i] = 1.0 - half_range + 2.0 * half_range * i / (points - 1);
    // tau must stay admissible across the whole grid.
    SimParams p = params;
    p.tau = std::min(p.tau, 0.99 / (1.0 + half_range));
    const auto curve = f_half(p, grid);
    return peak_width(curve.r, curve.F12, 0.0).width;
}

double harmonic_weight(double tau, int j) {
    if (!(tau >= 0.0) || j < 1) throw ConfigError("harmonic_weight: need tau >= 0 and j >= 1");
    const double a = sinc(std::numbers::pi * j * tau);
    const double b = sinc(std::numbers::pi * tau);
    return (a * a) / (b * b);
}

bool in_central_lobe(double tau, int j) { return j * tau < 1.0; }

std::vector<double> modulated_spectrum_peaks(double r, int j_max) {
    std::vector<double> peaks;
    for (int j = 1; j <= j_max; ++j) {
        peaks.push_back(j);
        peaks.push_back(j - (r - 1.0));
        peaks.push_back(j + (r - 1.0));
    }
    std::sort(peaks.begin(), peaks.end());
    return peaks;
}

}  // namespace subfourier
