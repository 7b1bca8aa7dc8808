#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "subfourier/params.hpp"

namespace subfourier {

// Everything a command needs. Lab-unit fields are zero when unused; see
// resolve_units.
struct RunConfig {
    SimParams params;

    // scan
    double r_min = 0.95;
    double r_max = 1.05;
    int r_steps = 41;
    bool adaptive = true;
    int fine_points = 40;
    int min_points_in_width = 10;
    int max_refinements = 3;
    double waist_ratio = 0.0;  // > 0 adds a K-inhomogeneous curve
    int k_nodes = 8;

    // width-vs-n
    std::vector<int> N1_list{5, 10, 20, 40};
    std::vector<double> K_list;   // empty: params.K alone
    double modulated_K = 0.0;     // > 0 adds a modulated-mode series at this K

    // spectrum / f-half
    double f_min = 0.5;
    double f_max = 1.5;
    int f_steps = 2001;
    std::vector<double> spectrum_r;  // empty: params.r alone

    // classical
    int kicks = 200;
    int classical_ensemble = 100000;

    // execution
    int workers = 0;
    std::string out_dir = "out";
    bool strict_overlap = false;
    double window = 0.0;          // p(0) window delta P; <= 0 means one ladder spacing
    std::string pulse = "auto";   // auto | delta | square
    int substeps = 20;
    int max_grid = 1 << 16;

    // lab units
    double f1_khz = 0.0;
    double tau_us = 0.0;
    double lambda_nm = 0.0;
    double mass_kg = 0.0;
};

// Cesium D2 line and atomic mass, used when only some lab fields are given.
constexpr double cesium_lambda_nm = 852.3;
constexpr double cesium_mass_kg = 2.2069e-25;

// hbar_eff = 4 k_L^2 T1 hbar / M with k_L = 2 pi / lambda and T1 = 1 / f1.
double hbar_eff_from_lab(double f1_khz, double lambda_nm, double mass_kg);

// Sets one key from its text form. Unknown keys and malformed values throw
// ConfigError naming the key.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

// Parses "key=value" lines; '#' starts a comment.
void apply_config_text(RunConfig& config, const std::string& text, const std::string& origin);
void load_config_file(RunConfig& config, const std::filesystem::path& path);

// fig1, fig2 or fig3 on top of the defaults.
RunConfig preset(const std::string& name);

// Converts lab-unit fields into params: tau_us with f1_khz sets tau;
// lambda_nm or mass_kg with f1_khz sets hbar_eff (missing one defaults to
// cesium). Returns log lines describing the conversion.
std::vector<std::string> resolve_units(RunConfig& config);

// Range and params checks; throws ConfigError naming the field.
void validate(const RunConfig& config);

// Every key with its current value, in a fixed order.
std::vector<std::pair<std::string, std::string>> settings(const RunConfig& config);

// settings() as key=value lines headed by a comment naming the command.
// Loading it back reproduces the run.
std::string manifest_text(const RunConfig& config, const std::string& command);

}  // namespace subfourier
