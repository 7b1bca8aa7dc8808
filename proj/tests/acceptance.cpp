// End-to-end checks of the simulator, one PASS/FAIL line per criterion.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "subfourier/commands.hpp"
#include "subfourier/config.hpp"
#include "subfourier/dynamics.hpp"
#include "subfourier/ensemble.hpp"
#include "subfourier/observables.hpp"
#include "subfourier/scan.hpp"
#include "subfourier/schedule.hpp"
#include "subfourier/spectrum.hpp"

using namespace subfourier;
namespace fs = std::filesystem;
using cplx = std::complex<double>;

namespace {

int failures = 0;
std::vector<int> selected;  // empty: all

struct Outcome {
    bool pass = false;
    std::string detail;
};

void run(int id, const char* name, const std::function<Outcome()>& body) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), id) == selected.end()) return;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %-28s %s  %s  [%.1fs]\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

template <class... T>
std::string fmt(const char* f, T... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// F1/2 width at N1 = 10, f1 = 18 kHz, 3 us pulses. Shared by criteria 4 and 5.
double fourier_baseline() {
    auto c = preset("fig1");
    resolve_units(c);
    c.params.phi = 0.0;
    return f_half_width(c.params);
}

Outcome unitarity() {
    double worst = 0.0;
    for (double x : {0.5, 1.0, 5.0, 20.0}) {
        const double hbar = 2.5;
        auto s = MomentumLadderState::plane_wave(256, 0.0, hbar);
        apply_delta_kick(s, x * hbar);
        for (int j = -127; j < 128; ++j) {
            const int n = std::abs(j);
            const cplx expected = std::pow(cplx(0.0, -1.0), n) * std::cyl_bessel_j(static_cast<double>(n), x);
            worst = std::max(worst, std::abs(s.amps[128 + j] - expected));
        }
    }

    SimParams p;
    p.K = 10;
    p.hbar_eff = 2.0;
    p.N1 = 200;
    p.r = 0.77;
    p.phi = 1.0;
    const auto sched = build_schedule(p);
    auto s = MomentumLadderState::plane_wave(2048, 0.3, p.hbar_eff);
    EvolveOptions eo;
    eo.shape = PulseShape::delta;
    double drift = 0.0;
    evolve_schedule(s, sched, eo, kick_record_times(p.N1),
                    [&](double, const MomentumLadderState& st) { drift = std::max(drift, std::abs(st.norm() - 1.0)); });

    double p2_err = 0.0;
    for (double strength : {0.5, 3.0, 17.0}) {
        auto one = MomentumLadderState::plane_wave(1024, 0.0, 1.0);
        apply_delta_kick(one, strength);
        p2_err = std::max(p2_err, std::abs(mean_p2(one) - strength * strength / 2));
    }
    return {worst < 1e-10 && drift < 1e-10 && p2_err < 1e-8,
            fmt("bessel %.1e, norm drift %.1e, <P2> err %.1e", worst, drift, p2_err)};
}

SimParams localization_params() {
    SimParams p;
    p.K = 8;
    p.hbar_eff = 2.89;
    p.N1 = 200;
    p.grid_size = 1024;
    p.beta_samples = 32;
    return p;
}

Outcome localization() {
    auto p = localization_params();
    p.mode = DriveMode::single;
    RunOptions o;
    o.evolve.shape = PulseShape::delta;
    o.keep_final_states = true;
    const auto run = run_ensemble(p, build_schedule(p), kick_record_times(p.N1), o);
    const double q = run.mean_p2[200] / run.mean_p2[100];
    const auto cl = classical_diffusion(p.K, 200, 100000, p.seed);
    const double c = cl[200] / cl[100];
    const auto fit = fit_localization_length(momentum_distribution(run.final_states, p.hbar_eff));
    return {q < 1.3 && c >= 1.8 && c <= 2.2 && fit.r_squared > 0.95,
            fmt("quantum ratio %.3f, classical ratio %.3f, R2 %.3f", q, c, fit.r_squared)};
}

Outcome delocalization() {
    auto p = localization_params();
    p.mode = DriveMode::two_train;
    p.r = (std::sqrt(5.0) - 1.0) / 2.0;
    p.phi = 0.0;
    RunOptions o;
    o.evolve.shape = PulseShape::delta;
    const auto run = run_ensemble(p, build_schedule(p), kick_record_times(p.N1), o);
    const double q = run.mean_p2[200] / run.mean_p2[100];
    return {q > 1.5, fmt("ratio %.3f", q)};
}

Outcome fourier() {
    const double w = fourier_baseline();
    return {std::abs(w - 0.091) <= 0.010, fmt("FWHM %.4f", w)};
}

WidthReport c5_report;

Outcome subfourier_scan() {
    auto c = preset("fig1");
    resolve_units(c);
    AdaptiveScanOptions a;
    a.half_range = 0.005;
    a.coarse_points = 41;
    const auto opts = ScanOptions{run_options(c), false};
    const auto curve = adaptive_scan(c.params, a, opts);
    const auto rep = fwhm(curve);
    c5_report = rep;
    const double step = curve.r[1] - curve.r[0];
    const bool interior = rep.left > curve.r.front() && rep.right < curve.r.back();
    const bool at_one = std::abs(rep.peak_r - 1.0) <= std::max(step, 1e-9) * 1.0001;
    const double factor = fourier_baseline() / rep.delta_r;
    const bool ok = interior && at_one && rep.W < 0.5 && factor > 10 && rep.delta_r >= 5e-4 && rep.delta_r <= 1e-2;
    return {ok, fmt("delta_r %.5f, W %.4f, peak at r=%.5f, factor %.1f, %zu points", rep.delta_r, rep.W, rep.peak_r,
                    factor, curve.r.size())};
}

Outcome scaling() {
    auto c = preset("fig3");
    resolve_units(c);
    SimParams p = c.params;
    p.K = 12;
    p.hbar_eff = 2.0;
    p.tau = 0.0;
    p.beta_samples = 96;
    auto opts = ScanOptions{run_options(c), false};
    opts.run.evolve.shape = PulseShape::delta;
    opts.run.window = 10.0;
    const std::vector<int> N{5, 10, 20, 40, 80, 160};
    AdaptiveScanOptions a;
    a.half_range = 0.08;
    const auto series = width_vs_n(p, N, a, opts);
    const double N_L = resonance_localization_time(p, 400, opts.run);
    const auto reg = classify_slopes(series, N_L);
    bool ok = !reg.pre.empty() && !reg.post.empty();
    std::string pre, post;
    for (double s : reg.pre) {
        ok = ok && s >= -2.6 && s <= -1.4;
        pre += fmt(" %.2f", s);
    }
    for (double s : reg.post) {
        ok = ok && s >= -1.4 && s <= -0.6;
        post += fmt(" %.2f", s);
    }
    std::string widths;
    for (const auto& pt : series.points) widths += pt.ok ? fmt(" %.5f", pt.delta_r) : std::string(" fail");
    return {ok, fmt("N_L %.1f, widths%s, pre slopes%s, post slopes%s", N_L, widths.c_str(), pre.c_str(), post.c_str())};
}

Outcome k_ordering() {
    auto c = preset("fig3");
    resolve_units(c);
    SimParams p = c.params;
    p.N1 = 20;
    p.tau = 0.0;
    p.beta_samples = 64;
    auto opts = ScanOptions{run_options(c), false};
    opts.run.evolve.shape = PulseShape::delta;
    const std::vector<double> K{20, 42, 80}, range{0.003, 0.0015, 0.0008};
    std::vector<double> width, error, peak;
    for (std::size_t i = 0; i < K.size(); ++i) {
        p.K = K[i];
        AdaptiveScanOptions a;
        a.half_range = range[i];
        const auto curve = adaptive_scan(p, a, opts);
        const auto rep = fwhm(curve);
        width.push_back(rep.delta_r);
        error.push_back(fwhm_error(curve));
        peak.push_back(rep.peak);
    }
    bool ok = true;
    for (std::size_t i = 0; i + 1 < K.size(); ++i) {
        ok = ok && width[i] - width[i + 1] > std::hypot(error[i], error[i + 1]);
        ok = ok && peak[i] > peak[i + 1];
    }
    // Least-squares slope of log peak against log K.
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < K.size(); ++i) {
        mx += std::log(K[i]) / K.size();
        my += std::log(peak[i]) / K.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < K.size(); ++i) {
        sxy += (std::log(K[i]) - mx) * (std::log(peak[i]) - my);
        sxx += std::pow(std::log(K[i]) - mx, 2);
    }
    const double slope = sxy / sxx;
    ok = ok && slope >= -1.5 && slope <= -0.5;
    return {ok, fmt("widths %.5f(%.5f) %.5f(%.5f) %.5f(%.5f), peaks %.4f %.4f %.4f, slope %.2f", width[0], error[0],
                    width[1], error[1], width[2], error[2], peak[0], peak[1], peak[2], slope)};
}

Outcome modulated() {
    auto c = preset("fig3");
    resolve_units(c);
    SimParams p = c.params;
    p.mode = DriveMode::modulated;
    p.A = 1.0;
    p.K = 12;
    p.N1 = 40;
    p.beta_samples = 32;
    AdaptiveScanOptions a;
    a.half_range = 0.015;
    const auto curve = adaptive_scan(p, a, ScanOptions{run_options(c), false});
    const auto rep = fwhm(curve);
    return {rep.W < 1.0, fmt("delta_r %.5f, W %.3f", rep.delta_r, rep.W)};
}

Outcome harmonics() {
    const double tau = 0.054;
    const double ratio = harmonic_weight(tau, 35) / harmonic_weight(tau, 1);
    const bool ok = in_central_lobe(tau, 18) && !in_central_lobe(tau, 19) && ratio < 0.02;
    return {ok, fmt("weight(35)/weight(1) %.4f", ratio)};
}

Outcome identity() {
    const double f1 = 18e3;  // Hz
    bool ok = true;
    double worst = 0.0;
    std::vector<std::pair<double, int>> reports{{0.0026, 10}, {0.0123, 40}, {7.1e-5, 160}};
    if (c5_report.delta_r > 0.0) reports.emplace_back(c5_report.delta_r, 10);
    for (auto [dr, N1] : reports) {
        const double df2 = dr * f1;       // width in f2, Hz
        const double T = N1 / f1;         // sequence duration, s
        const double W = N1 == 10 && dr == c5_report.delta_r ? c5_report.W : dr * N1;
        const double rel = std::abs(df2 * T - W) / W;
        worst = std::max(worst, rel);
        ok = ok && rel <= 4 * std::numeric_limits<double>::epsilon();
    }
    const double quoted = 0.0026 * 10;
    ok = ok && std::abs(quoted - 0.026) < 1e-15 && std::abs(quoted * 38 - 1.0) < 0.02;
    return {ok, fmt("max rel diff %.1e, 0.0026*10 = %.4f, 1/38 = %.4f", worst, quoted, 1.0 / 38)};
}

// Composite Simpson over each pulse, step <= 1e-4; delta kicks are exact.
double sampled_power(const KickSchedule& s, double f) {
    cplx ft = 0.0;
    for (const auto& e : s.events) {
        if (e.width == 0.0) {
            ft += e.strength * std::polar(1.0, two_pi * f * e.time);
            continue;
        }
        int n = static_cast<int>(std::ceil(e.width / 1e-4));
        n += n % 2;
        const double h = e.width / n, a = e.time - e.width / 2;
        cplx sum = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double wk = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
            sum += wk * std::polar(1.0, two_pi * f * (a + k * h));
        }
        ft += e.strength / e.width * sum * h / 3.0;
    }
    return std::norm(ft);
}

Outcome spectrum_equivalence() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ur(0.5, 1.5), uphi(0.0, two_pi), utau(0.0, 0.3), uf(0.0, 3.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        SimParams p;
        p.K = 1.0;
        p.N1 = 10;
        p.r = ur(rng);
        p.phi = uphi(rng);
        p.tau = utau(rng) / std::max(1.0, p.r);
        const auto s = build_schedule(p);
        const double f = uf(rng);
        const double a = sampled_power(s, f), b = sequence_spectrum(s, std::vector<double>{f}).power[0];
        worst = std::max(worst, std::abs(a - b) / std::max(a, 1e-300));
    }
    return {worst < 1e-6, fmt("max relative difference %.2e", worst)};
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "subfourier_acceptance";
    fs::remove_all(root);
    auto c = preset("fig1");
    resolve_units(c);
    c.params.beta_samples = 16;
    c.params.grid_size = 512;
    c.r_steps = 11;
    c.adaptive = false;
    c.workers = 2;
    std::size_t compared = 0;
    bool ok = true;
    for (const char* cmd : {"evolve", "scan", "spectrum", "f-half"}) {
        auto a = c, b = c;
        a.out_dir = (root / cmd / "a").string();
        b.out_dir = (root / cmd / "b").string();
        if (std::string(cmd) == "spectrum") a.spectrum_r = b.spectrum_r = {0.98, 0.93};
        const auto ra = run_command(cmd, a), rb = run_command(cmd, b);
        for (const auto& f : fs::directory_iterator(a.out_dir)) {
            if (f.path().extension() != ".csv") continue;
            ++compared;
            ok = ok && slurp(f.path()) == slurp(fs::path(b.out_dir) / f.path().filename());
        }
    }
    fs::remove_all(root);
    return {ok && compared >= 6, fmt("%zu CSV files compared", compared)};
}

}  // namespace

// Optional arguments pick criteria by number.
int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    run(1, "unitarity and oracles", unitarity);
    run(2, "dynamical localization", localization);
    run(3, "delocalization at golden r", delocalization);
    run(4, "Fourier baseline", fourier);
    run(5, "sub-Fourier resonance", subfourier_scan);
    run(6, "scaling regimes", scaling);
    run(7, "K ordering", k_ordering);
    run(8, "modulated sub-Fourier", modulated);
    run(9, "harmonic exclusion", harmonics);
    run(10, "width identity", identity);
    run(11, "spectrum brute force", spectrum_equivalence);
    run(12, "determinism", determinism);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
