#include "subfourier/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "subfourier/csv.hpp"
#include "subfourier/errors.hpp"
#include "subfourier/observables.hpp"
#include "subfourier/scan.hpp"
#include "subfourier/schedule.hpp"
#include "subfourier/spectrum.hpp"

namespace subfourier {

namespace fs = std::filesystem;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

using KeyValues = std::vector<std::pair<std::string, std::string>>;

void say(const Progress& progress, const std::string& text) {
    if (progress) progress(text);
}

std::string short_number(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << v;
    return os.str();
}

class Output {
public:
    Output(const RunConfig& config, const std::string& command, CommandResult& result)
        : dir_(config.out_dir), result_(result) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_))
            throw ConfigError("out_dir: cannot create " + dir_.string());
        write("manifest.txt", [&](std::ostream& os) { os << manifest_text(config, command); });
    }

    template <class F>
    void write(const std::string& name, F&& body) {
        const auto path = dir_ / name;
        std::ofstream os(path, std::ios::binary);
        if (!os) throw ConfigError("out_dir: cannot write " + path.string());
        body(os);
        os.flush();
        if (!os) throw ConfigError("out_dir: write failed for " + path.string());
        result_.files.push_back(path);
    }

    void key_values(const std::string& name, const KeyValues& kv) {
        write(name, [&](std::ostream& os) {
            for (const auto& [k, v] : kv) os << k << '=' << v << '\n';
        });
    }

private:
    fs::path dir_;
    CommandResult& result_;
};

RunConfig checked(const RunConfig& config) {
    validate(config);
    return config;
}

KeyValues width_lines(const WidthReport& w, double error, double window) {
    return {{"delta_r", format_double(w.delta_r)},
            {"delta_r_error", format_double(error)},
            {"W", format_double(w.W)},
            {"baseline", format_double(w.baseline)},
            {"peak", format_double(w.peak)},
            {"peak_r", format_double(w.peak_r)},
            {"left", format_double(w.left)},
            {"right", format_double(w.right)},
            {"fourier_width", format_double(w.fourier_width)},
            {"subfourier_factor", format_double(w.subfourier_factor)},
            {"window", format_double(window)}};
}

void write_curve(Output& out, const std::string& name, const ResonanceCurve& curve) {
    out.write(name, [&](std::ostream& os) {
        CsvWriter csv(os, {"r", "p0", "se"});
        for (std::size_t i = 0; i < curve.r.size(); ++i) csv.row({curve.r[i], curve.p0[i], curve.se[i]});
    });
}

// Writes the width report; returns false when no width could be measured.
bool write_width(Output& out, const std::string& name, const ResonanceCurve& curve, double window,
                 const Progress& progress) {
    try {
        const auto w = fwhm(curve);
        double error = nan;
        try {
            error = fwhm_error(curve);
        } catch (const AnalysisError& e) {
            say(progress, std::string("width error unavailable: ") + e.what());
        }
        out.key_values(name, width_lines(w, error, window));
        say(progress, name + ": delta_r=" + format_double(w.delta_r) + " W=" + format_double(w.W));
        return true;
    } catch (const AnalysisError& e) {
        out.key_values(name, {{"error", e.what()}, {"window", format_double(window)}});
        say(progress, name + ": " + e.what());
        return false;
    }
}

AdaptiveScanOptions adaptive_options(const RunConfig& c) {
    AdaptiveScanOptions a;
    a.center = 0.5 * (c.r_min + c.r_max);
    a.half_range = 0.5 * (c.r_max - c.r_min);
    a.coarse_points = c.r_steps;
    a.fine_points = c.fine_points;
    a.min_points_in_width = c.min_points_in_width;
    a.max_refinements = c.adaptive ? c.max_refinements : 0;
    return a;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

}  // namespace

RunOptions run_options(const RunConfig& c) {
    RunOptions o;
    if (c.pulse == "delta")
        o.evolve.shape = PulseShape::delta;
    else if (c.pulse == "square")
        o.evolve.shape = PulseShape::square;
    else
        o.evolve.shape = c.params.tau > 0.0 ? PulseShape::square : PulseShape::delta;
    o.evolve.substeps = c.substeps;
    o.window = c.window;
    o.max_grid = c.max_grid;
    o.workers = c.workers;
    return o;
}

CommandResult cmd_evolve(const RunConfig& config, const Progress& progress) {
    const auto c = checked(config);
    CommandResult result;
    Output out(c, "evolve", result);

    const auto schedule = build_schedule(c.params, c.strict_overlap);
    out.write("schedule.csv", [&](std::ostream& os) { write_schedule_csv(os, schedule); });
    say(progress, "evolving " + std::to_string(schedule.events.size()) + " kicks");

    auto options = run_options(c);
    options.keep_final_states = true;
    const auto run = run_ensemble(c.params, schedule, kick_record_times(c.params.N1), options);
    say(progress, std::to_string(run.members.size()) + " members done");

    out.write("trajectory.csv", [&](std::ostream& os) {
        CsvWriter csv(os, {"n", "mean_P2", "p0"});
        for (std::size_t i = 0; i < run.times.size(); ++i) csv.row({run.times[i], run.mean_p2[i], run.p0[i]});
    });

    const auto dist = momentum_distribution(run.final_states, c.params.hbar_eff);
    out.write("distribution.csv", [&](std::ostream& os) {
        CsvWriter csv(os, {"P", "prob"});
        for (std::size_t i = 0; i < dist.P.size(); ++i) csv.row({dist.P[i], dist.prob[i]});
    });

    const auto heaviest = static_cast<std::size_t>(
        std::max_element(run.final_states.weights.begin(), run.final_states.weights.end()) -
        run.final_states.weights.begin());
    const auto& state = run.final_states.states[heaviest];
    out.write("snapshot.csv", [&](std::ostream& os) {
        CsvWriter csv(os, {"m", "P", "re", "im", "prob"});
        for (std::size_t m = 0; m < state.size(); ++m)
            csv.row({static_cast<double>(m), state.momentum(m), state.amps[m].real(), state.amps[m].imag(),
                     std::norm(state.amps[m])});
    });

    double L = nan, R2 = nan, N_L = nan;
    try {
        const auto fit = fit_localization_length(dist);
        L = fit.L;
        R2 = fit.r_squared;
    } catch (const AnalysisError& e) {
        say(progress, std::string("localization fit: ") + e.what());
    }
    try {
        N_L = estimate_localization_time(run.mean_p2);
    } catch (const AnalysisError& e) {
        say(progress, std::string("localization time: ") + e.what());
    }
    out.key_values("summary.txt", {{"p0", format_double(run.p0.back())},
                                   {"p0_se", format_double(run.p0_se.back())},
                                   {"mean_P2", format_double(run.mean_p2.back())},
                                   {"L", format_double(L)},
                                   {"R2", format_double(R2)},
                                   {"N_L", format_double(N_L)},
                                   {"window", format_double(resolve_window(options, c.params.hbar_eff))},
                                   {"members", std::to_string(run.members.size())},
                                   {"max_grid_used", std::to_string(*std::max_element(
                                                         run.grid_sizes.begin(), run.grid_sizes.end()))}});
    return result;
}

CommandResult cmd_scan(const RunConfig& config, const Progress& progress) {
    const auto c = checked(config);
    CommandResult result;
    Output out(c, "scan", result);

    ScanOptions options;
    options.run = run_options(c);
    options.strict_overlap = c.strict_overlap;
    const double window = resolve_window(options.run, c.params.hbar_eff);

    say(progress, "scanning r in [" + format_double(c.r_min) + ", " + format_double(c.r_max) + "]");
    const auto curve = adaptive_scan(c.params, adaptive_options(c), options);
    write_curve(out, "resonance.csv", curve);
    if (!write_width(out, "width.txt", curve, window, progress)) result.status = 3;

    if (c.waist_ratio > 0.0) {
        say(progress, "K-inhomogeneous curve over " + std::to_string(c.k_nodes) + " nodes");
        const auto dist = KDistribution::beam_profile(c.params.K, c.waist_ratio, c.k_nodes);
        const auto both = broaden_with_k(dist, curve, options);
        write_curve(out, "resonance_broadened.csv", both.broadened);
        if (!write_width(out, "width_broadened.txt", both.broadened, window, progress)) result.status = 3;
    }
    return result;
}

CommandResult cmd_width_vs_n(const RunConfig& config, const Progress& progress) {
    const auto c = checked(config);
    CommandResult result;
    Output out(c, "width-vs-n", result);

    ScanOptions options;
    options.run = run_options(c);
    options.strict_overlap = c.strict_overlap;
    const auto adaptive = adaptive_options(c);

    auto series_file = [&](const std::string& name, const SimParams& params) {
        say(progress, name + ": K=" + format_double(params.K) + " mode=" + to_string(params.mode));
        const auto series = width_vs_n(params, c.N1_list, adaptive, options);
        out.write(name, [&](std::ostream& os) {
            CsvWriter csv(os, {"N1", "delta_r", "W", "fit_slope_local", "delta_r_error", "fourier_limit"});
            for (const auto& pt : series.points) {
                if (!pt.ok) say(progress, "N1=" + std::to_string(pt.N1) + " skipped: " + pt.error);
                csv.row({static_cast<double>(pt.N1), pt.ok ? pt.delta_r : nan, pt.ok ? pt.W : nan,
                         pt.ok ? pt.slope_local : nan, pt.ok ? pt.delta_r_error : nan,
                         series.fourier_limit});
            }
        });
        if (std::any_of(series.points.begin(), series.points.end(), [](const WidthPoint& p) { return !p.ok; }))
            result.status = 3;
    };

    if (c.K_list.empty()) {
        series_file("width_vs_n.csv", c.params);
    } else {
        for (double K : c.K_list) {
            SimParams p = c.params;
            p.K = K;
            series_file("width_vs_n_K" + short_number(K) + ".csv", p);
        }
    }
    if (c.modulated_K > 0.0) {
        SimParams p = c.params;
        p.K = c.modulated_K;
        p.mode = DriveMode::modulated;
        series_file("width_vs_n_modulated.csv", p);
    }
    return result;
}

CommandResult cmd_spectrum(const RunConfig& config, const Progress& progress) {
    const auto c = checked(config);
    CommandResult result;
    Output out(c, "spectrum", result);

    const auto f = linspace(c.f_min, c.f_max, c.f_steps);
    const auto ratios = c.spectrum_r.empty() ? std::vector<double>{c.params.r} : c.spectrum_r;
    for (double r : ratios) {
        SimParams p = c.params;
        p.r = r;
        p.validate();
        const auto curve = sequence_spectrum(build_schedule(p, c.strict_overlap), f);
        const auto name = "spectrum_r" + short_number(r) + ".csv";
        out.write(name, [&](std::ostream& os) {
            CsvWriter csv(os, {"f_over_f1", "power"});
            for (std::size_t i = 0; i < f.size(); ++i) csv.row({curve.f[i], curve.power[i]});
        });
        say(progress, name + ": " + std::to_string(curve.events) + " kicks");
    }
    return result;
}

CommandResult cmd_f_half(const RunConfig& config, const Progress& progress) {
    const auto c = checked(config);
    CommandResult result;
    Output out(c, "f-half", result);

    const auto r = linspace(c.r_min, c.r_max, c.r_steps);
    const auto curve = f_half(c.params, r);
    out.write("f_half.csv", [&](std::ostream& os) {
        CsvWriter csv(os, {"r", "F12_normalized"});
        for (std::size_t i = 0; i < r.size(); ++i) csv.row({curve.r[i], curve.F12[i]});
    });
    const double width = f_half_width(c.params);
    out.key_values("f_half_width.txt", {{"delta_r", format_double(width)},
                                        {"W", format_double(width * c.params.N1)},
                                        {"N1", std::to_string(c.params.N1)},
                                        {"tau", format_double(c.params.tau)}});
    say(progress, "F1/2 FWHM = " + format_double(width));
    return result;
}

CommandResult cmd_classical(const RunConfig& config, const Progress& progress) {
    const auto c = checked(config);
    CommandResult result;
    Output out(c, "classical", result);

    const auto p2 = classical_diffusion(c.params.K, c.kicks, c.classical_ensemble, c.params.seed, c.workers);
    out.write("classical.csv", [&](std::ostream& os) {
        CsvWriter csv(os, {"n", "mean_P2"});
        for (std::size_t n = 0; n < p2.size(); ++n) csv.row({static_cast<double>(n), p2[n]});
    });
    // Least-squares slope of <P^2> against n over the last 80% of kicks.
    const int first = c.kicks / 5;
    double sn = 0, sp = 0, snn = 0, snp = 0;
    int count = 0;
    for (int n = first; n <= c.kicks; ++n) {
        sn += n;
        sp += p2[n];
        snn += static_cast<double>(n) * n;
        snp += n * p2[n];
        ++count;
    }
    const double denom = count * snn - sn * sn;
    const double D = denom > 0.0 ? (count * snp - sn * sp) / denom : nan;
    out.key_values("classical.txt", {{"D", format_double(D)},
                                     {"D_quasilinear", format_double(0.5 * c.params.K * c.params.K)},
                                     {"mean_P2", format_double(p2.back())}});
    say(progress, "diffusion constant D = " + format_double(D));
    return result;
}

CommandResult run_command(const std::string& name, const RunConfig& config, const Progress& progress) {
    if (name == "evolve") return cmd_evolve(config, progress);
    if (name == "scan") return cmd_scan(config, progress);
    if (name == "width-vs-n") return cmd_width_vs_n(config, progress);
    if (name == "spectrum") return cmd_spectrum(config, progress);
    if (name == "f-half") return cmd_f_half(config, progress);
    if (name == "classical") return cmd_classical(config, progress);
    throw ConfigError("command: unknown command '" + name + "'");
}

}  // namespace subfourier
