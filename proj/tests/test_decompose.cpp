#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "breatherlab/decompose.hpp"
#include "breatherlab/grid.hpp"
#include "breatherlab/model.hpp"
#include "breatherlab/modes.hpp"

using namespace breatherlab;
using Catch::Approx;

namespace {
void add_profile(const Grid& g, std::vector<double>& a, std::vector<double>& b, double lambda,
                 double r, double theta) {
    const double s = std::sqrt(lambda);
    for (int i = 0; i < g.N; ++i) {
        const double P = s * Q_profile(s * (g.x[i] - r));
        a[i] += std::cos(theta) * P;
        b[i] += std::sin(theta) * P;
    }
}
}  // namespace

TEST_CASE("single exact profile is recovered exactly") {
    const Grid g = make_grid(30.0, 2001);
    std::vector<double> a(g.N, 0.0), b(g.N, 0.0);
    add_profile(g, a, b, 1.0, 0.0, 0.0);
    const DecompositionReport rep = greedy_extract(g, a, b, 1.0);
    REQUIRE(rep.profiles.size() == 1);
    REQUIRE(rep.profiles[0].r == Approx(0.0).margin(1e-10));
    REQUIRE(rep.profiles[0].theta == Approx(0.0).margin(1e-10));
    REQUIRE(rep.residual_L2 < 1e-10);
    REQUIRE(rep.residual_H1 < 1e-10);
    REQUIRE_FALSE(rep.overcrowded);
}

TEST_CASE("two separated profiles at distinct phases") {
    const Grid g = make_grid(30.0, 2001);
    std::vector<double> a(g.N, 0.0), b(g.N, 0.0);
    const double th2 = std::numbers::pi / 3.0;
    add_profile(g, a, b, 1.0, -15.0, 0.0);
    add_profile(g, a, b, 1.0, 15.0, th2);
    const DecompositionReport rep = greedy_extract(g, a, b, 1.0);
    REQUIRE(rep.profiles.size() == 2);
    for (const SolitonProfile& p : rep.profiles) {
        if (p.r < 0.0) {
            REQUIRE(std::abs(p.r + 15.0) <= g.h);
            REQUIRE(std::min(p.theta, 2.0 * std::numbers::pi - p.theta) <= 1e-3);
        } else {
            REQUIRE(std::abs(p.r - 15.0) <= g.h);
            REQUIRE(std::abs(p.theta - th2) <= 1e-3);
        }
    }
    REQUIRE(rep.residual_H1 < 1e-4);
    REQUIRE(rep.separations[0][1] == Approx(30.0).margin(0.1));
}

TEST_CASE("zero input gives the empty decomposition") {
    const Grid g = make_grid(30.0, 501);
    const DecompositionReport rep =
        greedy_extract(g, std::vector<double>(g.N, 0.0), std::vector<double>(g.N, 0.0), 1.0);
    REQUIRE(rep.profiles.empty());
    REQUIRE(rep.residual_L2 == 0.0);
    REQUIRE_FALSE(rep.overcrowded);
}

TEST_CASE("extraction is equivariant under grid translation") {
    const Grid g = make_grid(30.0, 2001);
    std::vector<double> a0(g.N, 0.0), b0(g.N, 0.0);
    add_profile(g, a0, b0, 1.0, 3.0, 0.7);
    std::vector<double> a1(g.N, 0.0), b1(g.N, 0.0);
    add_profile(g, a1, b1, 1.0, 3.0 + g.h, 0.7);

    const DecompositionReport r0 = greedy_extract(g, a0, b0, 1.0);
    const DecompositionReport r1 = greedy_extract(g, a1, b1, 1.0);
    REQUIRE(r0.profiles.size() == 1);
    REQUIRE(r1.profiles.size() == 1);
    REQUIRE(r1.profiles[0].r - r0.profiles[0].r == Approx(g.h).margin(1e-10));
    REQUIRE(r1.profiles[0].theta == Approx(r0.profiles[0].theta).margin(1e-10));
    REQUIRE(r1.residual_L2 == Approx(r0.residual_L2).margin(1e-10));
}

TEST_CASE("extraction is equivariant under phase rotation") {
    const Grid g = make_grid(30.0, 1001);
    std::vector<double> a(g.N, 0.0), b(g.N, 0.0);
    add_profile(g, a, b, 1.0, -4.0, 0.3);
    add_profile(g, a, b, 1.0, 9.0, 1.2);

    const double phi0 = 1.9;
    std::vector<double> ar(g.N), br(g.N);
    for (int i = 0; i < g.N; ++i) {
        ar[i] = a[i] * std::cos(phi0) - b[i] * std::sin(phi0);
        br[i] = a[i] * std::sin(phi0) + b[i] * std::cos(phi0);
    }
    const DecompositionReport r0 = greedy_extract(g, a, b, 1.0);
    const DecompositionReport r1 = greedy_extract(g, ar, br, 1.0);
    REQUIRE(r0.profiles.size() == r1.profiles.size());
    for (size_t j = 0; j < r0.profiles.size(); ++j) {
        double d = std::fmod(r1.profiles[j].theta - r0.profiles[j].theta - phi0,
                             2.0 * std::numbers::pi);
        if (d < 0) d += 2.0 * std::numbers::pi;
        d = std::min(d, 2.0 * std::numbers::pi - d);
        REQUIRE(d <= 1e-10);
        REQUIRE(r1.profiles[j].r == Approx(r0.profiles[j].r).margin(1e-10));
    }
    REQUIRE(r1.residual_L2 == Approx(r0.residual_L2).margin(1e-10));
}

TEST_CASE("each extraction removes the canonical weighted energy") {
    const Grid g = make_grid(60.0, 4001);
    const double lambda = 0.8;
    std::vector<double> a(g.N, 0.0), b(g.N, 0.0);
    add_profile(g, a, b, lambda, -25.0, 0.4);
    add_profile(g, a, b, lambda, 25.0, 2.0);

    // canonical removal: lambda^{3/2} (∫Q'^2 + ∫Q^2) = lambda^{3/2} 128/3
    const double expected = std::pow(lambda, 1.5) * 128.0 / 3.0;

    const double before = weighted_h1_sq(g, a, b, lambda);
    ExtractConfig cfg;
    cfg.max_J = 1;
    const DecompositionReport rep = greedy_extract(g, a, b, lambda, cfg);
    REQUIRE(rep.profiles.size() == 1);
    // reconstruct the remainder and measure what was removed
    std::vector<double> a2 = a, b2 = b;
    const SolitonProfile& p = rep.profiles[0];
    for (int i = 0; i < g.N; ++i) {
        const double P = std::sqrt(p.lambda) * Q_profile(std::sqrt(p.lambda) * (g.x[i] - p.r));
        a2[i] -= std::cos(p.theta) * P;
        b2[i] -= std::sin(p.theta) * P;
    }
    const double after = weighted_h1_sq(g, a2, b2, lambda);
    REQUIRE(before - after == Approx(expected).epsilon(0.05));
}

TEST_CASE("extraction set does not depend on the sweep direction") {
    const Grid g = make_grid(30.0, 1001);
    std::vector<double> a(g.N, 0.0), b(g.N, 0.0);
    add_profile(g, a, b, 1.0, -10.0, 0.5);
    add_profile(g, a, b, 1.0, 12.0, 2.4);
    // mirroring the axis reverses which peak the argmax visits first
    std::vector<double> am(g.N), bm(g.N);
    for (int i = 0; i < g.N; ++i) {
        am[i] = a[g.N - 1 - i];
        bm[i] = b[g.N - 1 - i];
    }
    const DecompositionReport r0 = greedy_extract(g, a, b, 1.0);
    const DecompositionReport r1 = greedy_extract(g, am, bm, 1.0);
    REQUIRE(r0.profiles.size() == 2);
    REQUIRE(r1.profiles.size() == 2);
    // the mirrored set has mirrored centers, identical phases and residuals
    for (size_t j = 0; j < 2; ++j) {
        bool matched = false;
        for (size_t k = 0; k < 2; ++k)
            if (std::abs(r1.profiles[k].r + r0.profiles[j].r) < 1e-6 &&
                std::abs(r1.profiles[k].theta - r0.profiles[j].theta) < 1e-6)
                matched = true;
        REQUIRE(matched);
    }
    REQUIRE(r1.residual_L2 == Approx(r0.residual_L2).margin(1e-9));
}

TEST_CASE("overcrowded flag when max_J is exhausted") {
    const Grid g = make_grid(60.0, 2001);
    std::vector<double> a(g.N, 0.0), b(g.N, 0.0);
    for (double r : {-40.0, -20.0, 0.0, 20.0, 40.0}) add_profile(g, a, b, 1.0, r, 0.0);
    ExtractConfig cfg;
    cfg.max_J = 3;
    const DecompositionReport rep = greedy_extract(g, a, b, 1.0, cfg);
    REQUIRE(rep.profiles.size() == 3);
    REQUIRE(rep.overcrowded);
}

TEST_CASE("lambda fit recovers a planted slope") {
    std::vector<PeriodPoint> pts;
    const double lambda0 = 0.5;
    for (double alpha : {0.3, 0.2, 0.1})
        pts.push_back({alpha, 2.0 * std::numbers::pi * (1.0 + 0.5 * lambda0 * alpha * alpha), 1});
    const PeriodAsymptoticsReport rep = fit_lambda(pts);
    REQUIRE(rep.lambda_fit == Approx(lambda0).margin(1e-12));
    REQUIRE(rep.lambda_positive);
}

TEST_CASE("lambda fit flags a flat family") {
    std::vector<PeriodPoint> pts;
    for (double alpha : {0.3, 0.2, 0.1}) pts.push_back({alpha, 2.0 * std::numbers::pi, 1});
    const PeriodAsymptoticsReport rep = fit_lambda(pts);
    REQUIRE(rep.lambda_fit == Approx(0.0).margin(1e-14));
    REQUIRE_FALSE(rep.lambda_positive);
}

TEST_CASE("lambda fit demands three members") {
    std::vector<PeriodPoint> pts = {{0.3, 6.4, 1}, {0.2, 6.3, 1}};
    REQUIRE_THROWS_AS(fit_lambda(pts), InsufficientDataError);
}

TEST_CASE("lambda fit on exact breather stacks lands near the canonical scale") {
    // family built from the closed form alone: alpha measured, T = 2 pi / omega
    std::vector<PeriodPoint> pts;
    for (double eps : {0.2, 0.1, 0.05}) {
        const double L = 28.0 / eps;
        const int N = 2 * static_cast<int>(std::ceil(L / 0.25)) + 1;
        const Grid g = make_grid(L, N);
        const BreatherParams bp = BreatherParams::from_eps(eps);
        Trajectory traj;
        traj.T = 2.0 * std::numbers::pi / bp.omega;
        for (int m = 0; m <= 64; ++m)
            traj.states.push_back(breather_state(bp, g, m * traj.T / 64));
        const ModeStack st = analyze(traj, 8);
        pts.push_back({measure_alpha(st), traj.T, 1});
    }
    const PeriodAsymptoticsReport rep = fit_lambda(pts);
    REQUIRE(rep.lambda_fit == Approx(1.0 / 1024.0).epsilon(0.15));
}

TEST_CASE("theorem-ii discrepancy for exact breathers shrinks with eps") {
    const ModelSpec sg = make_model("sine_gordon");
    auto value_at = [&](double eps) {
        const double L = 28.0 / eps;
        const int N = 2 * static_cast<int>(std::ceil(L / 0.25)) + 1;
        const Grid g = make_grid(L, N);
        const BreatherParams bp = BreatherParams::from_eps(eps);
        Trajectory traj;
        traj.T = 2.0 * std::numbers::pi / bp.omega;
        for (int m = 0; m <= 64; ++m)
            traj.states.push_back(breather_state(bp, g, m * traj.T / 64));
        BreatherSolution sol;
        sol.stack = analyze(traj, 8);
        sol.omega = bp.omega;
        const double alpha = measure_alpha(sol.stack);
        const DominantSplit ds = dominant_split(sol.stack, alpha);
        const RescaledDominant rd = rescale_dominant(g, ds.a_star, ds.b_star, alpha);
        const double lam = (eps * eps) / (alpha * alpha);
        DecompositionReport rep = greedy_extract(rd.ygrid, rd.a, rd.b, lam);
        REQUIRE(rep.profiles.size() == 1);
        return theorem_ii_check(sol, rep, alpha);
    };
    const double v005 = value_at(0.05);
    const double v02 = value_at(0.2);
    REQUIRE(v005 <= 0.01);
    REQUIRE(v02 > v005);
}

TEST_CASE("theorem-ii of the zero solution is zero") {
    const Grid g = make_grid(30.0, 301);
    BreatherSolution sol;
    sol.stack = make_stack(g, 0.95, 3);
    sol.omega = 0.95;
    DecompositionReport rep;
    rep.lambda_hat = 1.0;
    REQUIRE(theorem_ii_check(sol, rep, 1.0) == 0.0);
}

TEST_CASE("greedy_extract validates its inputs") {
    const Grid g = make_grid(30.0, 301);
    std::vector<double> a(g.N, 0.0), b(g.N, 0.0);
    REQUIRE_THROWS_AS(greedy_extract(g, a, b, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(greedy_extract(g, std::vector<double>(5, 0.0), b, 1.0),
                      std::invalid_argument);
}
