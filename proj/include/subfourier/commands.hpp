#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "subfourier/config.hpp"
#include "subfourier/ensemble.hpp"

namespace subfourier {

using Progress = std::function<void(const std::string&)>;

struct CommandResult {
    std::vector<std::filesystem::path> files;  // written, in order
    // 0 when every analysis succeeded; 3 when data were written but an
    // analysis step (peak width, fit) could not produce a value.
    int status = 0;
};

// Each command validates the config, creates out_dir, writes manifest.txt
// and then its data files. ConfigError and NumericalError propagate.

// trajectory.csv (n, mean_P2, p0), distribution.csv (P, prob),
// snapshot.csv (m, P, re, im, prob) of the heaviest member,
// schedule.csv and summary.txt (p0, mean_P2, L, R2, N_L).
CommandResult cmd_evolve(const RunConfig& config, const Progress& progress = {});

// resonance.csv (r, p0, se) and width.txt; with waist_ratio > 0 also
// resonance_broadened.csv and width_broadened.txt.
CommandResult cmd_scan(const RunConfig& config, const Progress& progress = {});

// width_vs_n.csv, or width_vs_n_K<K>.csv per K_list entry, plus
// width_vs_n_modulated.csv when modulated_K > 0.
CommandResult cmd_width_vs_n(const RunConfig& config, const Progress& progress = {});

// spectrum_r<r>.csv (f_over_f1, power) per spectrum_r entry.
CommandResult cmd_spectrum(const RunConfig& config, const Progress& progress = {});

// f_half.csv (r, F12_normalized) over r_min..r_max and f_half_width.txt.
CommandResult cmd_f_half(const RunConfig& config, const Progress& progress = {});

// classical.csv (n, mean_P2) from the standard map and classical.txt.
CommandResult cmd_classical(const RunConfig& config, const Progress& progress = {});

CommandResult run_command(const std::string& name, const RunConfig& config,
                          const Progress& progress = {});

// Run options implied by the config (pulse shape, window, grid limit...).
RunOptions run_options(const RunConfig& config);

}  // namespace subfourier
