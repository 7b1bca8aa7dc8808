#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "subfourier/dynamics.hpp"
#include "subfourier/errors.hpp"
#include "subfourier/observables.hpp"
#include "subfourier/schedule.hpp"

using namespace subfourier;

namespace {

double overlap(const MomentumLadderState& a, const MomentumLadderState& b) {
    cplx s = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) s += std::conj(a.amps[m]) * b.amps[m];
    return std::norm(s);
}

double distance(const MomentumLadderState& a, const MomentumLadderState& b) {
    double s = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) s += std::norm(a.amps[m] - b.amps[m]);
    return std::sqrt(s);
}

// exp(-i x cos(theta)) = sum_j (-i)^|j| J_|j|(x) exp(i j theta)
cplx jacobi_anger(int j, double x) {
    const int n = std::abs(j);
    return std::pow(cplx(0.0, -1.0), n) * std::cyl_bessel_j(static_cast<double>(n), x);
}

}  // namespace

TEST_CASE("free propagation phases") {
    auto s = MomentumLadderState::plane_wave(64, 0.0, 1.0);
    const auto before = s.amps;
    free_propagate(s, 3.7);
    CHECK(s.amps == before);  // P = 0 picks up no phase

    auto p1 = MomentumLadderState::plane_wave(64, 0.0, 1.0, 1);
    free_propagate(p1, 1.0);
    const auto a = p1.amps[33];
    CHECK(std::abs(a - std::polar(1.0, -0.5)) < 1e-15);

    auto q = MomentumLadderState::plane_wave(64, 0.3, 2.0, 4);
    const auto q0 = q.amps;
    free_propagate(q, 0.0);
    CHECK(q.amps == q0);
    CHECK_THROWS_AS(free_propagate(q, -1.0), ConfigError);
}

TEST_CASE("delta kick against the Jacobi-Anger expansion") {
    for (double x : {0.5, 1.0, 5.0, 20.0}) {
        const double hbar = 2.5;
        auto s = MomentumLadderState::plane_wave(256, 0.0, hbar);
        apply_delta_kick(s, x * hbar);
        double worst = 0.0;
        for (int j = -127; j < 128; ++j) {
            const auto expected = jacobi_anger(j, x);
            worst = std::max(worst, std::abs(s.amps[128 + j] - expected));
        }
        CAPTURE(x);
        CHECK(worst < 1e-10);
    }
    auto s = MomentumLadderState::plane_wave(128, 0.0, 1.0);
    apply_delta_kick(s, 1.0);
    CHECK(std::norm(s.amps[64]) == doctest::Approx(0.5855277).epsilon(1e-6));  // J0(1)^2
}

TEST_CASE("quasi-momentum does not change the kick populations") {
    auto a = MomentumLadderState::plane_wave(128, 0.0, 1.3);
    auto b = MomentumLadderState::plane_wave(128, 0.37, 1.3);
    apply_delta_kick(a, 4.0);
    apply_delta_kick(b, 4.0);
    for (std::size_t m = 0; m < a.size(); ++m) CHECK(std::norm(a.amps[m]) == doctest::Approx(std::norm(b.amps[m])));
    CHECK(b.beta == 0.37);
}

TEST_CASE("one kick gives <P^2> = s^2/2") {
    for (double s : {1.0, 8.0, 42.0}) {
        auto st = MomentumLadderState::plane_wave(1024, 0.0, 5.76);
        apply_delta_kick(st, s);
        CHECK(std::abs(mean_p2(st) - s * s / 2) < 1e-8 * std::max(1.0, s * s));
    }
    auto st = MomentumLadderState::plane_wave(64, 0.0, 1.0);
    const auto before = st.amps;
    apply_delta_kick(st, 0.0);
    CHECK(st.amps == before);
    CHECK_THROWS_AS(apply_delta_kick(st, -1.0), ConfigError);
}

TEST_CASE("norm is conserved over a 200-kick schedule") {
    SimParams p;
    p.K = 10;
    p.hbar_eff = 2.89;
    p.N1 = 100;
    p.r = 0.618;
    auto s = MomentumLadderState::plane_wave(2048, 0.2, p.hbar_eff);
    const auto sched = build_schedule(p);
    REQUIRE(sched.events.size() >= 160);
    EvolveOptions o;
    o.shape = PulseShape::delta;
    o.edge_tolerance = 1.0;
    evolve_schedule(s, sched, o, std::vector<double>{}, nullptr);
    CHECK(std::abs(s.norm() - 1.0) < 1e-10);
}

TEST_CASE("square pulse limits and convergence") {
    SUBCASE("short pulse approaches the delta kick") {
        auto a = MomentumLadderState::plane_wave(128, 0.0, 1.0);
        auto b = a;
        apply_delta_kick(a, 1.0);
        apply_square_pulse(b, 1.0, 1e-3);
        CHECK(overlap(a, b) > 1 - 1e-4);
    }
    SUBCASE("zero strength is free evolution") {
        auto a = MomentumLadderState::plane_wave(64, 0.1, 1.0, 3);
        auto b = a;
        free_propagate(a, 0.05);
        apply_square_pulse(b, 0.0, 0.05);
        CHECK(distance(a, b) < 1e-14);
    }
    SUBCASE("second-order convergence") {
        auto start = MomentumLadderState::plane_wave(256, 0.25, 1.0);
        apply_delta_kick(start, 3.0);  // spread the state so the kinetic term matters
        auto run = [&](int n) {
            auto s = start;
            apply_square_pulse(s, 5.0, 0.3, n);
            return s;
        };
        const auto ref = run(160);
        const double e20 = distance(run(20), ref);
        const double e40 = distance(run(40), ref);
        CAPTURE(e20);
        CAPTURE(e40);
        CHECK(e20 / e40 == doctest::Approx(4.0).epsilon(0.15));
    }
    SUBCASE("unitary and floor enforced") {
        auto s = MomentumLadderState::plane_wave(512, 0.0, 1.0);
        apply_square_pulse(s, 42.0, 0.054, substep_floor(42.0, 1.0));
        CHECK(std::abs(s.norm() - 1.0) < 1e-12);
        CHECK(substep_floor(42.0, 5.76) == 20);
        CHECK(substep_floor(420.0, 1.0) == 42);
        CHECK_THROWS_AS(apply_square_pulse(s, 420.0, 0.05, 20), ConfigError);
        CHECK_THROWS_AS(apply_square_pulse(s, 1.0, 0.0), ConfigError);
    }
}

TEST_CASE("evolve_schedule composition") {
    EvolveOptions delta;
    delta.shape = PulseShape::delta;

    SUBCASE("empty schedule is free propagation") {
        KickSchedule empty;
        empty.total_duration = 7;
        auto a = MomentumLadderState::plane_wave(64, 0.3, 1.7, 2);
        auto b = a;
        evolve_schedule(a, empty, delta, std::vector<double>{}, nullptr);
        free_propagate(b, 7.0);
        CHECK(distance(a, b) < 1e-14);
    }
    SUBCASE("one kick: free to t = 1, kick, free to the end") {
        KickSchedule s;
        s.events = {{1.0, 3.0, 0.0}};
        s.total_duration = 2.0;
        auto a = MomentumLadderState::plane_wave(128, 0.1, 1.0);
        auto b = a;
        const std::vector<double> record{1.0};
        const auto snaps = evolve_schedule(a, s, delta, record);
        free_propagate(b, 1.0);
        apply_delta_kick(b, 3.0);
        REQUIRE(snaps.size() == 1);
        CHECK(snaps[0].time == 1.0);
        CHECK(distance(snaps[0].state, b) < 1e-13);
    }
    SUBCASE("merged r = 1 kicks equal two back-to-back kicks") {
        SimParams p;
        p.K = 2.5;
        p.hbar_eff = 1.3;
        p.N1 = 5;
        auto merged = MomentumLadderState::plane_wave(256, 0.4, p.hbar_eff);
        evolve_schedule(merged, build_schedule(p), delta, std::vector<double>{}, nullptr);
        auto twice = MomentumLadderState::plane_wave(256, 0.4, p.hbar_eff);
        for (int n = 1; n <= p.N1; ++n) {
            free_propagate(twice, 1.0);
            apply_delta_kick(twice, p.K);
            if (n < p.N1) apply_delta_kick(twice, p.K);  // second train stops before N1
        }
        CHECK(distance(merged, twice) < 1e-12);
    }
    SUBCASE("record times see the state after the kick at that time") {
        SimParams p;
        p.K = 1.0;
        p.hbar_eff = 1.0;
        p.N1 = 3;
        p.mode = DriveMode::single;
        auto s = MomentumLadderState::plane_wave(128, 0.0, 1.0);
        const std::vector<double> record{0.0, 1.0, 2.0, 3.0};
        const auto snaps = evolve_schedule(s, build_schedule(p), delta, record);
        REQUIRE(snaps.size() == 4);
        CHECK(mean_p2(snaps[0].state) == doctest::Approx(0.0));
        CHECK(mean_p2(snaps[1].state) == doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("aliasing guard names the time") {
        SimParams p;
        p.K = 40;
        p.hbar_eff = 1.0;
        p.N1 = 5;
        p.mode = DriveMode::single;
        auto s = MomentumLadderState::plane_wave(64, 0.0, 1.0);
        try {
            evolve_schedule(s, build_schedule(p), delta, std::vector<double>{1.0}, nullptr);
            FAIL("expected AliasingError");
        } catch (const AliasingError& e) {
            CHECK(e.time() == 1.0);
            CHECK(e.edge_population() >= 1e-8);
        }
    }
    SUBCASE("unsorted record times rejected") {
        KickSchedule s;
        s.total_duration = 1;
        auto st = MomentumLadderState::plane_wave(64, 0.0, 1.0);
        CHECK_THROWS_AS(evolve_schedule(st, s, delta, std::vector<double>{1.0, 0.5}, nullptr), ConfigError);
    }
}

TEST_CASE("square-pulse schedule converges to the delta schedule as tau shrinks") {
    SimParams p;
    p.K = 3;
    p.hbar_eff = 1.0;
    p.N1 = 4;
    p.phi = std::numbers::pi;
    auto delta_state = MomentumLadderState::plane_wave(256, 0.2, 1.0);
    EvolveOptions o;
    o.shape = PulseShape::delta;
    evolve_schedule(delta_state, build_schedule(p), o, std::vector<double>{}, nullptr);
    double previous = 1.0;
    for (double tau : {1e-2, 1e-3}) {
        p.tau = tau;
        auto sq = MomentumLadderState::plane_wave(256, 0.2, 1.0);
        o.shape = PulseShape::square;
        evolve_schedule(sq, build_schedule(p), o, std::vector<double>{}, nullptr);
        const double miss = 1 - overlap(sq, delta_state);
        CHECK(miss < previous);
        previous = miss;
    }
    CHECK(previous < 1e-4);
}

TEST_CASE("classical standard map") {
    const auto zero = classical_diffusion(0.0, 20, 1000, 1);
    for (double v : zero) CHECK(v == 0.0);

    const auto a = classical_diffusion(10.0, 100, 20000, 5, 1);
    const auto b = classical_diffusion(10.0, 100, 20000, 5, 3);
    CHECK(a == b);
    for (double v : a) CHECK(v >= 0.0);

    // Slope of <P^2> against n from the tail of a series.
    auto slope = [](const std::vector<double>& p2) {
        const int n0 = 20, n1 = static_cast<int>(p2.size()) - 1;
        return (p2[n1] - p2[n0]) / (n1 - n0);
    };
    const auto big = classical_diffusion(10.0, 100, 100000, 11);
    const auto oracle = classical_diffusion(10.0, 100, 1000000, 12345);
    const double D = slope(big), D_oracle = slope(oracle);
    CHECK(D == doctest::Approx(D_oracle).epsilon(0.05));
    // Correlated-kick correction to K^2/2: 1 - 2 J2(K) + 2 J2(K)^2.
    const double j2 = std::cyl_bessel_j(2.0, 10.0);
    const double corrected = 50.0 * (1 - 2 * j2 + 2 * j2 * j2);
    CHECK(D == doctest::Approx(corrected).epsilon(0.12));
    CHECK_THROWS_AS(classical_diffusion(-1, 10, 10, 1), ConfigError);
}
