#include "subfourier/scan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "subfourier/errors.hpp"
#include "subfourier/parallel.hpp"
#include "subfourier/schedule.hpp"
#include "subfourier/spectrum.hpp"

namespace subfourier {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) throw AnalysisError("median of empty set");
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

double crossing(double x0, double y0, double x1, double y1, double level) {
    if (y1 == y0) return 0.5 * (x0 + x1);
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0);
}

}  // namespace

PeakWidth peak_width(std::span<const double> x, std::span<const double> y,
                     std::optional<double> baseline, std::span<const double> se,
                     double significance) {
    const std::size_t n = x.size();
    if (n < 5 || y.size() != n) throw AnalysisError("peak_width: need >= 5 samples");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x[i] > x[i - 1])) throw AnalysisError("peak_width: x must be strictly increasing");

    const double span = x[n - 1] - x[0];
    const double lo_edge = x[0] + 0.2 * span;
    const double hi_edge = x[n - 1] - 0.2 * span;

    PeakWidth out;
    if (baseline) {
        out.baseline = *baseline;
    } else {
        std::vector<double> outer;
        for (std::size_t i = 0; i < n; ++i)
            if (x[i] <= lo_edge || x[i] >= hi_edge) outer.push_back(y[i]);
        out.baseline = median(outer);
    }

    out.peak_index = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    out.peak = y[out.peak_index];
    out.peak_x = x[out.peak_index];
    if (out.peak_index == 0 || out.peak_index == n - 1 || out.peak_x <= lo_edge ||
        out.peak_x >= hi_edge) {
        std::ostringstream os;
        os << "peak_width: maximum at the scan edge (x=" << out.peak_x << ")";
        throw AnalysisError(os.str());
    }
    if (!(out.peak > out.baseline)) throw AnalysisError("peak_width: no peak above baseline");
    if (!se.empty()) {
        const double noise = median(std::vector<double>(se.begin(), se.end()));
        if (out.peak - out.baseline < significance * noise) {
            std::ostringstream os;
            os << "peak_width: peak height " << out.peak - out.baseline << " below " << significance
               << " x median standard error " << noise;
            throw AnalysisError(os.str());
        }
    }

    const double half = 0.5 * (out.peak + out.baseline);
    std::size_t i = out.peak_index;
    while (i > 0 && y[i - 1] > half) --i;
    if (i == 0) throw AnalysisError("peak_width: left flank never reaches half maximum");
    out.left = crossing(x[i - 1], y[i - 1], x[i], y[i], half);

    std::size_t j = out.peak_index;
    while (j + 1 < n && y[j + 1] > half) ++j;
    if (j + 1 == n) throw AnalysisError("peak_width: right flank never reaches half maximum");
    out.right = crossing(x[j], y[j], x[j + 1], y[j + 1], half);

    out.width = out.right - out.left;
    return out;
}

void ResonanceCurve::validate() const {
    if (r.size() < 5) throw AnalysisError("resonance curve: need >= 5 points");
    if (p0.size() != r.size() || se.size() != r.size())
        throw AnalysisError("resonance curve: array lengths differ");
    for (std::size_t i = 1; i < r.size(); ++i)
        if (!(r[i] > r[i - 1])) throw AnalysisError("resonance curve: r not strictly increasing");
    for (double v : p0)
        if (!(v >= 0.0)) throw AnalysisError("resonance curve: negative p0");
}

ResonanceCurve scan_members(const SimParams& params, std::span<const double> r_grid,
                            const std::vector<EnsembleMember>& members,
                            const ScanOptions& options) {
    params.validate();
    if (members.empty()) throw ConfigError("ensemble: no members");
    const std::size_t nr = r_grid.size();
    const std::size_t nm = members.size();

    std::vector<KickSchedule> schedules;
    schedules.reserve(nr);
    std::vector<SimParams> point_params(nr, params);
    for (std::size_t i = 0; i < nr; ++i) {
        point_params[i].r = r_grid[i];
        try {
            schedules.push_back(build_schedule(point_params[i], options.strict_overlap));
        } catch (const ConfigError& e) {
            std::ostringstream os;
            os << "r=" << r_grid[i] << ": " << e.what();
            throw ConfigError(os.str());
        }
    }

    const std::vector<double> final_time{static_cast<double>(params.N1)};
    std::vector<std::vector<double>> member_p0(nm, std::vector<double>(nr, 0.0));
    parallel_for(nr * nm, options.run.workers, [&](std::size_t item) {
        const std::size_t i = item / nm;
        const std::size_t k = item % nm;
        try {
            const auto res =
                simulate_member(point_params[i], schedules[i], members[k], final_time, options.run);
            member_p0[k][i] = res.p0.back();
        } catch (const NumericalError& e) {
            std::ostringstream os;
            os << "r=" << r_grid[i] << ": " << e.what();
            throw NumericalError(os.str());
        }
    });

    ResonanceCurve curve;
    curve.params = params;
    curve.r.assign(r_grid.begin(), r_grid.end());
    for (const auto& m : members) curve.member_weights.push_back(m.weight);
    curve.member_p0 = std::move(member_p0);
    std::vector<double> column(nm);
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t k = 0; k < nm; ++k) column[k] = curve.member_p0[k][i];
        const auto st = weighted_mean(column, curve.member_weights);
        curve.p0.push_back(st.mean);
        curve.se.push_back(st.se);
    }
    return curve;
}

ResonanceCurve scan_resonance(const SimParams& params, std::span<const double> r_grid,
                              const ScanOptions& options) {
    const auto spec = EnsembleSpec::stratified(params.beta_samples, params.sigma_P, params.seed);
    return scan_members(params, r_grid, make_members(spec, params.hbar_eff), options);
}

WidthReport fwhm(const ResonanceCurve& curve) {
    curve.validate();
    const auto pw = peak_width(curve.r, curve.p0, std::nullopt, curve.se);
    WidthReport rep;
    rep.delta_r = pw.width;
    rep.left = pw.left;
    rep.right = pw.right;
    rep.baseline = pw.baseline;
    rep.peak = pw.peak;
    rep.peak_r = pw.peak_x;
    rep.W = pw.width * curve.params.N1;
    rep.fourier_width = f_half_width(curve.params);
    rep.subfourier_factor = rep.fourier_width / rep.delta_r;
    return rep;
}

double fwhm_error(const ResonanceCurve& curve, int groups) {
    const std::size_t nm = curve.member_p0.size();
    if (groups < 2 || nm < static_cast<std::size_t>(groups))
        throw AnalysisError("fwhm_error: not enough members for the requested groups");
    std::vector<double> widths;
    for (int g = 0; g < groups; ++g) {
        std::vector<double> p0(curve.r.size(), 0.0);
        double wsum = 0.0;
        for (std::size_t k = 0; k < nm; ++k) {
            if (static_cast<int>(k % groups) == g) continue;
            wsum += curve.member_weights[k];
            for (std::size_t i = 0; i < p0.size(); ++i)
                p0[i] += curve.member_weights[k] * curve.member_p0[k][i];
        }
        if (!(wsum > 0.0)) throw AnalysisError("fwhm_error: empty jackknife sample");
        for (auto& v : p0) v /= wsum;
        widths.push_back(peak_width(curve.r, p0).width);
    }
    const double mean = std::accumulate(widths.begin(), widths.end(), 0.0) / groups;
    double ss = 0.0;
    for (double w : widths) ss += (w - mean) * (w - mean);
    return std::sqrt((groups - 1.0) / groups * ss);
}

ResonanceCurve merge_curves(const ResonanceCurve& a, const ResonanceCurve& b) {
    if (a.member_p0.size() != b.member_p0.size())
        throw AnalysisError("merge_curves: member sets differ");
    std::vector<std::pair<double, std::pair<const ResonanceCurve*, std::size_t>>> points;
    for (std::size_t i = 0; i < a.r.size(); ++i) points.push_back({a.r[i], {&a, i}});
    for (std::size_t i = 0; i < b.r.size(); ++i) points.push_back({b.r[i], {&b, i}});
    std::stable_sort(points.begin(), points.end(),
                     [](const auto& p, const auto& q) { return p.first < q.first; });

    ResonanceCurve out;
    out.params = a.params;
    out.member_weights = a.member_weights;
    out.member_p0.assign(a.member_p0.size(), {});
    for (const auto& [r, src] : points) {
        if (!out.r.empty() && std::abs(r - out.r.back()) < 1e-14) continue;
        const auto& [curve, i] = src;
        out.r.push_back(r);
        out.p0.push_back(curve->p0[i]);
        out.se.push_back(curve->se[i]);
        for (std::size_t k = 0; k < out.member_p0.size(); ++k)
            out.member_p0[k].push_back(curve->member_p0[k][i]);
    }
    return out;
}

std::vector<double> uniform_grid(double center, double half_range, int points) {
    if (points < 2) throw ConfigError("grid: need at least 2 points");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        g[i] = center - half_range + 2.0 * half_range * i / (points - 1);
    if (points % 2 == 1) g[points / 2] = center;
    return g;
}

ResonanceCurve adaptive_scan(const SimParams& params, const AdaptiveScanOptions& adaptive,
                             const ScanOptions& options) {
    const auto spec = EnsembleSpec::stratified(params.beta_samples, params.sigma_P, params.seed);
    const auto members = make_members(spec, params.hbar_eff);

    const auto coarse = uniform_grid(adaptive.center, adaptive.half_range, adaptive.coarse_points);
    auto curve = scan_members(params, coarse, members, options);
    for (int pass = 0; pass < adaptive.max_refinements; ++pass) {
        // No measurable peak: return what we have and let fwhm report it.
        PeakWidth pw;
        try {
            pw = peak_width(curve.r, curve.p0, std::nullopt, curve.se);
        } catch (const AnalysisError&) {
            break;
        }
        const auto inside = std::count_if(curve.r.begin(), curve.r.end(), [&](double r) {
            return r >= pw.left && r <= pw.right;
        });
        if (inside >= adaptive.min_points_in_width) break;
        std::vector<double> fine;
        for (double r : uniform_grid(pw.peak_x, 2.0 * pw.width, adaptive.fine_points)) {
            const bool known = std::any_of(curve.r.begin(), curve.r.end(),
                                           [&](double q) { return std::abs(q - r) < 1e-12; });
            if (!known && r > curve.r.front() && r < curve.r.back()) fine.push_back(r);
        }
        if (fine.empty()) break;
        curve = merge_curves(curve, scan_members(params, fine, members, options));
    }
    return curve;
}

WidthSeries width_vs_n(const SimParams& params, std::span<const int> N1_list,
                       const AdaptiveScanOptions& adaptive, const ScanOptions& options) {
    for (std::size_t i = 1; i < N1_list.size(); ++i)
        if (N1_list[i] <= N1_list[i - 1]) throw ConfigError("N1 list: must be increasing");

    WidthSeries series;
    double last_width = 0.0;
    int last_N = 0;
    for (int N : N1_list) {
        WidthPoint pt;
        pt.N1 = N;
        SimParams p = params;
        p.N1 = N;
        AdaptiveScanOptions a = adaptive;
        if (last_N > 0) a.half_range = 5.0 * last_width * last_N / N;
        try {
            const auto curve = adaptive_scan(p, a, options);
            const auto pw = peak_width(curve.r, curve.p0, std::nullopt, curve.se);
            // Before localization sets in there may be no line at the center at all.
            if (adaptive.center < pw.left || adaptive.center > pw.right) {
                std::ostringstream os;
                os << "N1=" << N << ": half-maximum interval [" << pw.left << ", " << pw.right
                   << "] does not contain r=" << adaptive.center;
                throw AnalysisError(os.str());
            }
            pt.delta_r = pw.width;
            pt.W = pw.width * N;
            pt.delta_r_error = fwhm_error(curve);
            pt.ok = true;
            last_width = pw.width;
            last_N = N;
        } catch (const AnalysisError& e) {
            pt.error = e.what();
        }
        series.points.push_back(pt);
    }

    auto& pts = series.points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!pts[i].ok) continue;
        std::size_t lo = i, hi = i;
        for (std::size_t k = i; k-- > 0;)
            if (pts[k].ok) { lo = k; break; }
        for (std::size_t k = i + 1; k < pts.size(); ++k)
            if (pts[k].ok) { hi = k; break; }
        if (lo == hi) continue;
        pts[i].slope_local = std::log(pts[hi].delta_r / pts[lo].delta_r) /
                             std::log(static_cast<double>(pts[hi].N1) / pts[lo].N1);
    }
    return series;
}

std::vector<double> segment_slopes(const WidthSeries& series) {
    std::vector<double> slopes;
    const WidthPoint* prev = nullptr;
    for (const auto& pt : series.points) {
        if (!pt.ok) continue;
        if (prev)
            slopes.push_back(std::log(pt.delta_r / prev->delta_r) /
                             std::log(static_cast<double>(pt.N1) / prev->N1));
        prev = &pt;
    }
    return slopes;
}

ScalingRegimes classify_slopes(const WidthSeries& series, double N_L) {
    ScalingRegimes out;
    out.N_L = N_L;
    const WidthPoint* prev = nullptr;
    for (const auto& pt : series.points) {
        if (!pt.ok) continue;
        if (prev) {
            const double slope = std::log(pt.delta_r / prev->delta_r) /
                                 std::log(static_cast<double>(pt.N1) / prev->N1);
            if (pt.N1 <= N_L) out.pre.push_back(slope);
            else if (prev->N1 >= N_L) out.post.push_back(slope);
        }
        prev = &pt;
    }
    return out;
}

double resonance_localization_time(const SimParams& params, int kicks, const RunOptions& options) {
    SimParams p = params;
    p.r = 1.0;
    p.N1 = kicks;
    p.N2.reset();
    const auto run = run_ensemble(p, build_schedule(p), kick_record_times(kicks), options);
    return estimate_localization_time(run.mean_p2);
}

PhaseAdvance phase_advance_width(double mean_p2, double N, double hbar_eff) {
    if (!(mean_p2 > 0.0 && N > 0.0 && hbar_eff > 0.0))
        throw ConfigError("phase_advance_width: inputs must be positive");
    const double x = 2.0 * hbar_eff / (mean_p2 * N);
    if (x >= 1.0) throw AnalysisError("phase_advance_width: <P^2> N <= 2 hbar_eff, criterion unreachable");
    return {x / (1.0 - x), x};
}

KDistribution KDistribution::single(double K) { return {{K}, {1.0}}; }

KDistribution KDistribution::beam_profile(double K0, double waist_ratio, int nodes) {
    if (!(waist_ratio > 0.0) || nodes < 1) throw ConfigError("beam_profile: bad waist ratio or node count");
    std::vector<double> u, w;
    gauss_laguerre(nodes, u, w);
    KDistribution d;
    // rho^2 = 2 sigma^2 u, so 2 rho^2 / w^2 = 4 u / waist_ratio^2.
    for (int i = 0; i < nodes; ++i) {
        d.K.push_back(K0 * std::exp(-4.0 * u[i] / (waist_ratio * waist_ratio)));
        d.weights.push_back(w[i]);
    }
    const double total = std::accumulate(d.weights.begin(), d.weights.end(), 0.0);
    for (auto& x : d.weights) x /= total;
    return d;
}

InhomogeneousScan scan_with_k_inhomogeneity(const SimParams& params, const KDistribution& dist,
                                            std::span<const double> r_grid,
                                            const ScanOptions& options) {
    const auto spec = EnsembleSpec::stratified(params.beta_samples, params.sigma_P, params.seed);
    return broaden_with_k(dist, scan_members(params, r_grid, make_members(spec, params.hbar_eff), options),
                          options);
}

InhomogeneousScan broaden_with_k(const KDistribution& dist, ResonanceCurve homogeneous,
                                 const ScanOptions& options) {
    if (dist.K.empty() || dist.K.size() != dist.weights.size())
        throw ConfigError("K distribution: nodes and weights must be non-empty and equal length");
    homogeneous.validate();
    const SimParams params = homogeneous.params;
    const auto spec = EnsembleSpec::stratified(params.beta_samples, params.sigma_P, params.seed);
    const auto members = make_members(spec, params.hbar_eff);
    if (members.size() != homogeneous.member_p0.size())
        throw ConfigError("K distribution: curve members do not match its params");
    const std::vector<double> r_grid = homogeneous.r;

    InhomogeneousScan out;
    out.homogeneous = std::move(homogeneous);
    const double wsum = std::accumulate(dist.weights.begin(), dist.weights.end(), 0.0);
    ResonanceCurve& b = out.broadened;
    b.params = params;
    b.r = r_grid;
    b.member_weights = out.homogeneous.member_weights;
    b.member_p0.assign(members.size(), std::vector<double>(r_grid.size(), 0.0));
    for (std::size_t node = 0; node < dist.K.size(); ++node) {
        SimParams p = params;
        p.K = dist.K[node];
        const double w = dist.weights[node] / wsum;
        const auto curve = p.K == params.K ? out.homogeneous : scan_members(p, r_grid, members, options);
        for (std::size_t k = 0; k < members.size(); ++k)
            for (std::size_t i = 0; i < r_grid.size(); ++i)
                b.member_p0[k][i] += w * curve.member_p0[k][i];
    }
    std::vector<double> column(members.size());
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        for (std::size_t k = 0; k < members.size(); ++k) column[k] = b.member_p0[k][i];
        const auto st = weighted_mean(column, b.member_weights);
        b.p0.push_back(st.mean);
        b.se.push_back(st.se);
    }
    return out;
}

void gauss_laguerre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw ConfigError("gauss_laguerre: n must be >= 1");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        // Initial guesses for the Newton iteration (Stroud & Secrest).
        if (i == 0)
            z = 3.0 / (1.0 + 2.4 * n);
        else if (i == 1)
            z += 15.0 / (1.0 + 2.5 * n);
        else
            z += (1.0 + 2.55 * (i - 1)) / (1.9 * (i - 1)) * (z - nodes[i - 2]);
        double dp = 0.0;
        double p2 = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0;
            p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0 - z) * p2 - (j - 1.0) * p3) / j;
            }
            dp = n * (p1 - p2) / z;
            const double step = p1 / dp;
            z -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, z)) break;
        }
        nodes[i] = z;
        weights[i] = -1.0 / (dp * n * p2);
    }
}

}  // namespace subfourier
