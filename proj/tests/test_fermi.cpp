#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "breatherlab/fermi.hpp"
#include "breatherlab/grid.hpp"
#include "breatherlab/model.hpp"
#include "breatherlab/modes.hpp"

using namespace breatherlab;
using Catch::Approx;

namespace {
Trajectory analytic_trajectory(const BreatherParams& bp, const Grid& g, int M) {
    Trajectory traj;
    traj.T = 2.0 * std::numbers::pi / bp.omega;
    for (int m = 0; m <= M; ++m) traj.states.push_back(breather_state(bp, g, m * traj.T / M));
    return traj;
}
}  // namespace

TEST_CASE("golden rule integrals of the registry potentials") {
    const Grid g = make_grid(30.0, 3001);

    const FourierIntegral zero = golden_rule_integrals(make_model("sine_gordon"), g);
    REQUIRE(zero.cos_part == 0.0);
    REQUIRE(zero.sin_part == 0.0);

    const FourierIntegral gauss = golden_rule_integrals(make_model("gaussian"), g);
    const double oracle = std::sqrt(std::numbers::pi) * std::exp(-0.75);
    REQUIRE(gauss.cos_part == Approx(oracle).margin(1e-8));

    const FourierIntegral odd = golden_rule_integrals(make_model("odd_sech"), g);
    REQUIRE(std::abs(odd.cos_part) < 1e-10);
    REQUIRE(std::isfinite(odd.sin_part));
    REQUIRE(std::abs(odd.sin_part) > 1e-3);  // reported, genuinely nonzero
}

TEST_CASE("golden rule integrals are linear in the potential") {
    const Grid g = make_grid(30.0, 1001);
    const FourierIntegral one = golden_rule_integrals(make_model("gaussian", {{"amplitude", 1.0}}), g);
    const FourierIntegral two = golden_rule_integrals(make_model("gaussian", {{"amplitude", 2.0}}), g);
    REQUIRE(two.cos_part == Approx(2.0 * one.cos_part).epsilon(1e-14));
    REQUIRE(two.sin_part == Approx(2.0 * one.sin_part).margin(1e-16));
}

TEST_CASE("resonance defect of the zero solution") {
    const Grid g = make_grid(30.0, 301);
    BreatherSolution sol;
    sol.stack = make_stack(g, 0.98, 4);
    sol.omega = 0.98;
    const ResonanceDefect rd = resonance_defect(sol, make_model("sine_gordon"));
    REQUIRE(rd.defect_f == 0.0);
    REQUIRE(rd.defect_g == 0.0);
    REQUIRE(rd.kappa == Approx(std::sqrt(4.0 * 0.98 * 0.98 - 1.0)).margin(1e-14));
}

TEST_CASE("resonance defect of the exact breather is tiny and translation invariant") {
    const ModelSpec sg = make_model("sine_gordon");
    const Grid g = make_grid(100.0, 2001);
    const BreatherParams bp = BreatherParams::from_eps(0.2);
    BreatherSolution sol;
    sol.stack = analyze(analytic_trajectory(bp, g, 64), 8);
    sol.omega = bp.omega;
    const ResonanceDefect rd = resonance_defect(sol, sg);
    REQUIRE(rd.defect_f < 1e-8);
    REQUIRE(rd.defect_g < 1e-8);

    const double t0 = 0.53;
    ModeStack shifted = sol.stack;
    for (int n = 1; n <= shifted.n_max; ++n) {
        const double d = n * shifted.omega * t0;
        for (int i = 0; i < g.N; ++i) {
            const double a = sol.stack.a[n][i], b = sol.stack.b[n][i];
            shifted.a[n][i] = a * std::cos(d) + b * std::sin(d);
            shifted.b[n][i] = -a * std::sin(d) + b * std::cos(d);
        }
    }
    BreatherSolution sol2;
    sol2.stack = shifted;
    sol2.omega = bp.omega;
    const ResonanceDefect rd2 = resonance_defect(sol2, sg);
    REQUIRE(std::abs(rd2.defect_f - rd.defect_f) < 1e-10);
    REQUIRE(std::abs(rd2.defect_g - rd.defect_g) < 1e-10);
}

TEST_CASE("resonance defect guards its mode budget") {
    const Grid g = make_grid(30.0, 301);
    BreatherSolution sol;
    sol.stack = make_stack(g, 0.98, 1);  // 2 n* exceeds n_max
    for (int i = 0; i < g.N; ++i) sol.stack.a[1][i] = std::exp(-g.x[i] * g.x[i]);
    REQUIRE_THROWS_AS(resonance_defect(sol, make_model("sine_gordon")), std::invalid_argument);
}

TEST_CASE("second-harmonic forcing of a single mode is the quadratic term exactly") {
    // with v_perp = 0 the cubic feeds only the 1st and 3rd harmonics, and
    // F_2 = U (a^2 - b^2)/2 is an algebraic identity
    const Grid g = make_grid(30.0, 501);
    const ModelSpec gauss = make_model("gaussian");
    ModeStack st = make_stack(g, 0.97, 4);
    for (int i = 0; i < g.N; ++i) {
        st.a[1][i] = 0.5 * std::exp(-g.x[i] * g.x[i] / 9.0);
        st.b[1][i] = 0.2 * std::exp(-(g.x[i] - 1.0) * (g.x[i] - 1.0) / 4.0);
    }
    BreatherSolution sol;
    sol.stack = st;
    sol.omega = 0.97;
    const SecondHarmonicGap gap = second_harmonic_gap(sol, gauss, 1.0);
    REQUIRE(gap.gap_l1 < 1e-13);
}

TEST_CASE("second-harmonic gap of the exact breather vanishes by parity") {
    // q is odd in phi for the zero potential, and the breather carries only
    // odd harmonics, so the second-harmonic forcing is identically zero
    const ModelSpec sg = make_model("sine_gordon");
    const Grid g = make_grid(100.0, 1001);
    for (double eps : {0.2, 0.1}) {
        const BreatherParams bp = BreatherParams::from_eps(eps);
        BreatherSolution sol;
        sol.stack = analyze(analytic_trajectory(bp, g, 64), 8);
        sol.omega = bp.omega;
        const double alpha = measure_alpha(sol.stack);
        const SecondHarmonicGap gap = second_harmonic_gap(sol, sg, alpha);
        REQUIRE(gap.gap_l1 < 1e-12);
        REQUIRE(gap.gap_over_sqrt_alpha < 1e-10);
    }
}

TEST_CASE("localization mass of centered and shifted profiles") {
    SECTION("centered small breather carries the canonical mass") {
        const double eps = 0.05;
        const Grid g = make_grid(560.0, 4481);
        const BreatherParams bp = BreatherParams::from_eps(eps);
        BreatherSolution sol;
        sol.stack = analyze(analytic_trajectory(bp, g, 64), 8);
        sol.omega = bp.omega;

        // quadrature oracle for ∫_{|y|<5} Q^2 on an independent fine mesh
        double oracle = 0.0;
        const int M = 200000;
        for (int k = 0; k <= M; ++k) {
            const double y = -5.0 + 10.0 * k / M;
            const double w = (k == 0 || k == M) ? 0.5 : 1.0;
            oracle += w * Q_profile(y) * Q_profile(y) * (10.0 / M);
        }
        const double mass = localization_mass(sol, 5.0);
        REQUIRE(mass == Approx(oracle).epsilon(0.02));
    }
    SECTION("profile far from the origin leaves no mass in the window") {
        const double eps = 0.2;
        const Grid g = make_grid(400.0, 2001);
        ModeStack st = make_stack(g, std::sqrt(1.0 - eps * eps), 2);
        const double center = 30.0 / eps;  // r/eps with r = 30
        for (int i = 0; i < g.N; ++i) st.a[1][i] = eps * Q_profile(eps * (g.x[i] - center));
        BreatherSolution sol;
        sol.stack = st;
        sol.omega = st.omega;
        REQUIRE(localization_mass(sol, 5.0) < 1e-20);
    }
    SECTION("zero solution has zero mass") {
        const Grid g = make_grid(100.0, 501);
        BreatherSolution sol;
        sol.stack = make_stack(g, 0.98, 2);
        sol.omega = 0.98;
        REQUIRE(localization_mass(sol, 5.0) == 0.0);
    }
    SECTION("window outside the domain is rejected") {
        const Grid g = make_grid(30.0, 301);
        BreatherSolution sol;
        sol.stack = make_stack(g, 0.98, 2);
        sol.omega = 0.98;
        REQUIRE_THROWS_AS(localization_mass(sol, 20.0), std::invalid_argument);
    }
}

TEST_CASE("limiting functional closed form") {
    const double lambda = 0.9, r1 = 1.3, theta1 = 0.4, ci = 0.8372;
    const double q = Q_profile(std::sqrt(lambda) * r1);
    REQUIRE(limiting_functional(lambda, r1, theta1, ci) ==
            Approx(std::cos(0.8) * lambda * q * q * ci).margin(1e-14));
    // centered profile with theta = 0 and a unit integral reduces to lambda Q(0)^2
    REQUIRE(limiting_functional(1.0, 0.0, 0.0, 1.0) == Approx(16.0).margin(1e-12));
}
