#include <doctest.h>

#include <cmath>
#include <numbers>

#include "subfourier/errors.hpp"
#include "subfourier/scan.hpp"

using namespace subfourier;

namespace {

std::vector<double> grid(double lo, double hi, double step) {
    std::vector<double> x;
    const int n = static_cast<int>(std::lround((hi - lo) / step));
    for (int i = 0; i <= n; ++i) x.push_back(lo + i * step);
    return x;
}

// Cheap resonance: delta kicks, fig1-like otherwise.
SimParams small_params() {
    SimParams p;
    p.K = 20;
    p.hbar_eff = 5.76;
    p.N1 = 10;
    p.phi = std::numbers::pi;
    p.grid_size = 256;
    p.beta_samples = 16;
    return p;
}

ScanOptions delta_options() {
    ScanOptions o;
    o.run.evolve.shape = PulseShape::delta;
    return o;
}

}  // namespace

TEST_CASE("peak width of a triangle is exact") {
    const auto x = grid(-0.2, 0.2, 0.01);
    std::vector<double> y;
    for (double v : x) y.push_back(std::max(0.0, 1.0 - std::abs(v) / 0.05));
    const auto w = peak_width(x, y, 0.0);
    CHECK(w.width == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(w.peak_x == doctest::Approx(0.0));
}

TEST_CASE("peak width of a Lorentzian") {
    const auto x = grid(-0.2, 0.2, 0.001);
    std::vector<double> y;
    const double g = 0.005;
    for (double v : x) y.push_back(g * g / (v * v + g * g));
    CHECK(peak_width(x, y).width == doctest::Approx(0.01).epsilon(0.02));
}

TEST_CASE("peak width is invariant under affine rescaling of y") {
    const auto x = grid(0.9, 1.1, 0.002);
    std::vector<double> y, z, se, se_z;
    for (double v : x) {
        y.push_back(0.03 + 0.06 * std::exp(-std::pow((v - 1.0) / 0.01, 2)) + 0.002 * std::sin(300 * v));
        se.push_back(0.002);
    }
    for (double v : y) z.push_back(7.5 * v + 0.4);
    for (double v : se) se_z.push_back(7.5 * v);
    const auto a = peak_width(x, y, std::nullopt, se);
    const auto b = peak_width(x, z, std::nullopt, se_z);
    CHECK(a.width == doctest::Approx(b.width).epsilon(1e-12));
    CHECK(a.left == doctest::Approx(b.left).epsilon(1e-12));
}

TEST_CASE("peak width errors") {
    const auto x = grid(0.0, 1.0, 0.05);
    std::vector<double> edge, narrow, flat, se(x.size(), 0.1);
    for (double v : x) {
        edge.push_back(v);
        narrow.push_back(1.0 - 0.1 * std::abs(v - 0.5));  // never reaches half level
        flat.push_back(1.0 + 0.01 * std::exp(-std::pow((v - 0.5) / 0.05, 2)));
    }
    CHECK_THROWS_AS(peak_width(x, edge), AnalysisError);
    CHECK_THROWS_AS(peak_width(x, narrow, 0.0), AnalysisError);
    CHECK_THROWS_AS(peak_width(x, flat, std::nullopt, se), AnalysisError);
}

TEST_CASE("uniform grids") {
    const auto g = uniform_grid(1.0, 0.01, 21);
    REQUIRE(g.size() == 21);
    CHECK(g[10] == 1.0);
    CHECK(g.front() == doctest::Approx(0.99));
    CHECK(g.back() == doctest::Approx(1.01));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] - 1.0 == doctest::Approx(1.0 - g[g.size() - 1 - i]));
}

TEST_CASE("phase-advance prediction") {
    const auto a = phase_advance_width(2 * 5.76, 10, 5.76);
    CHECK(a.approximation == doctest::Approx(0.1));
    CHECK(a.width == doctest::Approx(0.1 / 0.9));
    // Diffusive <P^2> = D N gives N^-2; constant <P^2> gives N^-1.
    const auto d1 = phase_advance_width(100 * 10, 10, 1.0), d2 = phase_advance_width(100 * 20, 20, 1.0);
    CHECK(d1.approximation / d2.approximation == doctest::Approx(4.0));
    const auto c1 = phase_advance_width(500, 10, 1.0), c2 = phase_advance_width(500, 20, 1.0);
    CHECK(c1.approximation / c2.approximation == doctest::Approx(2.0));
    CHECK_THROWS_AS(phase_advance_width(1.0, 1.0, 1.0), AnalysisError);
    CHECK_THROWS_AS(phase_advance_width(-1.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("Gauss-Laguerre quadrature") {
    std::vector<double> x, w;
    gauss_laguerre(2, x, w);
    CHECK(x[0] == doctest::Approx(2 - std::sqrt(2.0)));
    CHECK(x[1] == doctest::Approx(2 + std::sqrt(2.0)));
    CHECK(w[0] == doctest::Approx((2 + std::sqrt(2.0)) / 4));
    gauss_laguerre(8, x, w);
    // Exact for polynomials up to degree 15: integral of x^k e^-x is k!.
    for (int k = 0; k <= 15; ++k) {
        double q = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) q += w[i] * std::pow(x[i], k);
        CHECK(q == doctest::Approx(std::tgamma(k + 1.0)).epsilon(1e-10));
    }
}

TEST_CASE("beam-profile K distribution") {
    const auto d = KDistribution::beam_profile(42.0, 1.6, 32);
    REQUIRE(d.K.size() == 32);
    double wsum = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < d.K.size(); ++i) {
        CHECK(d.K[i] > 0.0);
        CHECK(d.K[i] <= 42.0);
        wsum += d.weights[i];
        mean += d.weights[i] * d.K[i];
    }
    CHECK(wsum == doctest::Approx(1.0));
    // E[K0 exp(-4u/w^2)] over u ~ Exp(1) is K0 / (1 + 4/w^2).
    CHECK(mean == doctest::Approx(42.0 / (1.0 + 4.0 / (1.6 * 1.6))).epsilon(1e-6));
    const auto s = KDistribution::single(7.0);
    CHECK(s.K == std::vector<double>{7.0});
}

TEST_CASE("width series slopes and regimes") {
    WidthSeries s;
    for (int N : {5, 10, 20, 40, 80}) {
        WidthPoint p;
        p.N1 = N;
        p.ok = true;
        p.delta_r = N <= 20 ? 1.0 / (N * N) : (1.0 / 400) * 20.0 / N;
        s.points.push_back(p);
    }
    s.points[3].ok = false;  // a skipped point is bridged
    const auto slopes = segment_slopes(s);
    REQUIRE(slopes.size() == 3);
    CHECK(slopes[0] == doctest::Approx(-2.0));
    CHECK(slopes[2] == doctest::Approx(-1.0));
    const auto reg = classify_slopes(s, 20.0);
    REQUIRE(reg.pre.size() == 2);
    for (double v : reg.pre) CHECK(v == doctest::Approx(-2.0));
    REQUIRE(reg.post.size() == 1);
    CHECK(reg.post[0] == doctest::Approx(-1.0));
    CHECK(classify_slopes(s, 30.0).post.empty());
}

TEST_CASE("K = 0 gives a flat resonance curve") {
    auto p = small_params();
    p.K = 0.0;
    const auto r = uniform_grid(1.0, 0.05, 11);
    const auto c = scan_resonance(p, r, delta_options());
    for (double v : c.p0) CHECK(v == doctest::Approx(c.p0.front()).epsilon(1e-12));
}

TEST_CASE("resonance at r = 1: maximum, central symmetry, determinism") {
    const auto p = small_params();
    const auto r = uniform_grid(1.0, 0.01, 21);
    auto o1 = delta_options();
    o1.run.workers = 1;
    auto o3 = o1;
    o3.run.workers = 3;
    const auto c = scan_resonance(p, r, o1);
    const auto c3 = scan_resonance(p, r, o3);
    CHECK(c.p0 == c3.p0);
    CHECK(c.se == c3.se);

    const auto top = std::max_element(c.p0.begin(), c.p0.end()) - c.p0.begin();
    CHECK(c.r[top] == 1.0);

    // Within the line (above half maximum) mirrored points agree within error.
    const auto w = peak_width(c.r, c.p0, std::nullopt, c.se);
    const double half = 0.5 * (w.peak + w.baseline);
    for (std::size_t i = 0; i < r.size() / 2; ++i) {
        const std::size_t j = r.size() - 1 - i;
        if (c.p0[i] < half && c.p0[j] < half) continue;
        CAPTURE(c.r[i]);
        CHECK(std::abs(c.p0[i] - c.p0[j]) <= 3.0 * std::hypot(c.se[i], c.se[j]));
    }

    const auto rep = fwhm(c);
    CHECK(rep.W == doctest::Approx(rep.delta_r * p.N1));
    CHECK(rep.subfourier_factor == doctest::Approx(rep.fourier_width / rep.delta_r));
    CHECK(fwhm_error(c) > 0.0);
}

TEST_CASE("adaptive scan puts enough points inside the width") {
    const auto p = small_params();
    AdaptiveScanOptions a;
    a.half_range = 0.02;
    a.coarse_points = 21;
    const auto c = adaptive_scan(p, a, delta_options());
    c.validate();
    const auto w = peak_width(c.r, c.p0, std::nullopt, c.se);
    const auto inside = std::count_if(c.r.begin(), c.r.end(), [&](double r) { return r >= w.left && r <= w.right; });
    CHECK(inside >= a.min_points_in_width);
    CHECK(std::is_sorted(c.r.begin(), c.r.end()));
}

TEST_CASE("K inhomogeneity") {
    const auto p = small_params();
    const auto r = uniform_grid(1.0, 0.01, 21);
    const auto o = delta_options();
    const auto same = scan_with_k_inhomogeneity(p, KDistribution::single(p.K), r, o);
    const auto plain = scan_resonance(p, r, o);
    CHECK(same.homogeneous.p0 == plain.p0);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(same.broadened.p0[i] == doctest::Approx(plain.p0[i]).epsilon(1e-13));

    const auto beam = scan_with_k_inhomogeneity(p, KDistribution::beam_profile(p.K, 1.6, 8), r, o);
    const auto reused = broaden_with_k(KDistribution::beam_profile(p.K, 1.6, 8), plain, o);
    CHECK(reused.broadened.p0 == beam.broadened.p0);
    CHECK_THROWS_AS(broaden_with_k(KDistribution{}, plain, o), ConfigError);
}

TEST_CASE("merge_curves interleaves r points") {
    const auto p = small_params();
    const auto o = delta_options();
    const auto members = make_members(EnsembleSpec::stratified(p.beta_samples, p.sigma_P, p.seed), p.hbar_eff);
    const auto a = scan_members(p, std::vector<double>{0.99, 1.0, 1.01}, members, o);
    const auto b = scan_members(p, std::vector<double>{0.995, 1.005}, members, o);
    const auto m = merge_curves(a, b);
    CHECK(m.r == std::vector<double>{0.99, 0.995, 1.0, 1.005, 1.01});
    CHECK(m.p0[2] == a.p0[1]);
    CHECK(m.p0[1] == b.p0[0]);
    CHECK(m.member_p0.front().size() == 5);
}

TEST_CASE("scan errors carry the offending r") {
    auto p = small_params();
    p.K = 200;
    p.hbar_eff = 1.0;
    p.grid_size = 64;
    p.beta_samples = 1;
    auto o = delta_options();
    o.run.max_grid = 64;
    try {
        scan_resonance(p, std::vector<double>{0.95, 1.0}, o);
        FAIL("expected an aliasing error");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("r=0.95") != std::string::npos);
    }
}
