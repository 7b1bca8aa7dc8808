#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

namespace subfourier {

enum class DriveMode {
    single,     // one train at f1
    two_train,  // trains at f1 and f2 = r f1
    modulated,  // one train at f1, strengths modulated at r f1
};

std::string to_string(DriveMode mode);
DriveMode parse_drive_mode(const std::string& text);

// Physical and numerical configuration, all in reduced units: time in
// kick periods T1, momentum in units of M / (2 k_L T1).
struct SimParams {
    double K = 42.0;
    double hbar_eff = 5.76;
    double r = 1.0;
    double phi = 0.0;
    double tau = 0.0;                // pulse width in units of T1; 0 = delta kicks
    int N1 = 10;
    std::optional<int> N2;           // unset: derived from r, N1 and phi
    double A = 1.0;                  // modulation depth (modulated mode)
    double modulation_phase = 0.0;
    DriveMode mode = DriveMode::two_train;
    int grid_size = 2048;
    int beta_samples = 32;
    double sigma_P = 1.0;
    std::uint64_t seed = 1;

    // Throws ConfigError naming the offending field.
    void validate() const;

    // Number of kicks in the second train. Unless overridden this is the
    // largest n whose kick time (n + phi/2pi)/r lies strictly before N1;
    // for phi = 0 that is ceil(r N1) - 1.
    int resolved_N2() const;

    double total_duration() const { return static_cast<double>(N1); }
};

constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace subfourier
