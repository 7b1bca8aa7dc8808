#pragma once

#include <span>
#include <vector>

#include "subfourier/schedule.hpp"

namespace subfourier {

// sin(x)/x with sinc(0) = 1.
double sinc(double x);

struct SpectrumCurve {
    std::vector<double> f;      // frequency in units of f1
    std::vector<double> power;  // |FT|^2 of the kick train
    std::size_t events = 0;
    double total_strength = 0.0;
};

// |sum_k s_k exp(2 pi i f t_k) sinc(pi f tau_k)|^2, evaluated in closed
// form from the event list.
double kick_train_power(const KickSchedule& schedule, double f);
SpectrumCurve sequence_spectrum(const KickSchedule& schedule, std::span<const double> f);

struct FHalfCurve {
    std::vector<double> r;
    std::vector<double> F12;  // peak-normalized
};

// Power of the two-train schedule (phi forced to 0) at the midpoint
// frequency (1 + r)/2, for each r, normalized to the curve maximum.
FHalfCurve f_half(const SimParams& params, std::span<const double> r_grid);

// FWHM of F_1/2(r) with zero baseline, on an automatic grid of 1 +- 3/N1.
double f_half_width(const SimParams& params);

// sinc^2(pi j tau) / sinc^2(pi tau): weight of comb tooth j relative to the
// first, tau in units of T1.
double harmonic_weight(double tau, int j);
// Whether harmonic j lies inside the central lobe of the pulse envelope.
bool in_central_lobe(double tau, int j);

// Carriers j and sidebands j +- (r - 1) for j = 1..j_max, ascending.
std::vector<double> modulated_spectrum_peaks(double r, int j_max);

}  // namespace subfourier
