#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "breatherlab/evolve.hpp"
#include "breatherlab/grid.hpp"
#include "breatherlab/model.hpp"

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

TEST_CASE("zero state is a fixed point of both schemes") {
    const Grid g = make_grid(20.0, 201);
    const ModelSpec sg = make_model("sine_gordon");
    for (Scheme sc : {Scheme::leapfrog, Scheme::strang}) {
        FieldState s = make_state(g);
        for (int k = 0; k < 50; ++k) s = step(s, sg, 0.04, sc);
        for (double v : s.phi) REQUIRE(v == 0.0);
        for (double v : s.phi_t) REQUIRE(v == 0.0);
    }
}

TEST_CASE("CFL guard") {
    const Grid g = make_grid(20.0, 201);  // h = 0.2
    const ModelSpec sg = make_model("sine_gordon");
    REQUIRE_THROWS_AS(step(make_state(g), sg, 0.11), std::invalid_argument);
    REQUIRE_THROWS_AS(step(make_state(g), sg, 0.0), std::invalid_argument);
}

TEST_CASE("leapfrog is time reversible") {
    const Grid g = make_grid(50.0, 501);
    const ModelSpec sg = make_model("sine_gordon");
    const BreatherParams bp = BreatherParams::from_eps(0.3);
    const FieldState s0 = breather_state(bp, g, 0.0);

    FieldState s = s0;
    const double dt = 0.04;
    for (int k = 0; k < 1000; ++k) s = step(s, sg, dt);
    for (int k = 0; k < 1000; ++k) s = step(s, sg, -dt);
    std::vector<double> diff(g.N);
    for (int i = 0; i < g.N; ++i) diff[i] = s.phi[i] - s0.phi[i];
    REQUIRE(l2_norm(g, diff) < 1e-10);
}

TEST_CASE("one-period evolution of the exact breather") {
    const Grid g = make_grid(100.0, 2001);
    const ModelSpec sg = make_model("sine_gordon");
    const BreatherParams bp = BreatherParams::from_eps(0.2);
    const double T = 2.0 * std::numbers::pi / bp.omega;
    const FieldState s0 = breather_state(bp, g, 0.0);

    EvolveConfig cfg;
    cfg.steps_per_period = 2048;
    const PeriodResidual pr = period_residual(s0, sg, T, cfg);
    REQUIRE(pr.phi_gap < 5e-4);
    REQUIRE(pr.phit_gap < 5e-4);

    const Trajectory traj = evolve_period(s0, sg, T, cfg, 1);
    REQUIRE(relative_energy_drift(traj, sg) < 1e-8);
}

TEST_CASE("dt-convergence order of the period residual") {
    // fine grid so the spatial floor sits well below the coarsest dt error
    const Grid g = make_grid(100.0, 2001);
    const ModelSpec sg = make_model("sine_gordon");
    const BreatherParams bp = BreatherParams::from_eps(0.3);
    const double T = 2.0 * std::numbers::pi / bp.omega;
    const FieldState s0 = breather_state(bp, g, 0.0);

    double gaps[3];
    const int steps[3] = {256, 512, 1024};
    for (int k = 0; k < 3; ++k) {
        EvolveConfig cfg;
        cfg.steps_per_period = steps[k];
        gaps[k] = period_residual(s0, sg, T, cfg).phi_gap;
    }
    REQUIRE(std::log2(gaps[0] / gaps[1]) > 1.9);
    REQUIRE(std::log2(gaps[1] / gaps[2]) > 1.9);
}

TEST_CASE("strang cross-checks leapfrog") {
    const Grid g = make_grid(100.0, 2001);
    const ModelSpec sg = make_model("sine_gordon");
    const BreatherParams bp = BreatherParams::from_eps(0.3);
    const double T = 2.0 * std::numbers::pi / bp.omega;
    const FieldState s0 = breather_state(bp, g, 0.0);

    EvolveConfig lf, st;
    lf.steps_per_period = 512;
    st.steps_per_period = 512;
    st.scheme = Scheme::strang;
    const double gap_lf = period_residual(s0, sg, T, lf).phi_gap;
    const double gap_st = period_residual(s0, sg, T, st).phi_gap;
    REQUIRE(gap_st < 10.0 * gap_lf);
    REQUIRE(gap_lf < 10.0 * gap_st);

    // strang is second order as well
    EvolveConfig st2 = st;
    st2.steps_per_period = 1024;
    const double gap_st2 = period_residual(s0, sg, T, st2).phi_gap;
    REQUIRE(std::log2(gap_st / gap_st2) > 1.9);
}

TEST_CASE("wrong period leaves a macroscopic gap") {
    const Grid g = make_grid(70.0, 701);
    const ModelSpec sg = make_model("sine_gordon");
    const BreatherParams bp = BreatherParams::from_eps(0.3);
    const double T = 2.0 * std::numbers::pi / bp.omega;
    const FieldState s0 = breather_state(bp, g, 0.0);

    // oracle: the analytic formula evaluated at the mismatched time
    std::vector<double> adiff(g.N);
    for (int i = 0; i < g.N; ++i)
        adiff[i] = sine_gordon_breather(bp, 1.1 * T, g.x[i]) - s0.phi[i];
    const double analytic_gap = l2_norm(g, adiff);
    REQUIRE(analytic_gap > 0.1 * l2_norm(g, s0.phi));

    EvolveConfig cfg;
    cfg.steps_per_period = 1024;
    const PeriodResidual pr = period_residual(s0, sg, 1.1 * T, cfg);
    REQUIRE(pr.phi_gap > 0.1 * l2_norm(g, s0.phi));
    REQUIRE(pr.phi_gap == Approx(analytic_gap).epsilon(0.05));
}

TEST_CASE("zero state has zero period residual") {
    const Grid g = make_grid(20.0, 201);
    EvolveConfig cfg;
    cfg.steps_per_period = 64;
    const PeriodResidual pr = period_residual(make_state(g), make_model("cubic"), 5.0, cfg);
    REQUIRE(pr.phi_gap == 0.0);
    REQUIRE(pr.phit_gap == 0.0);
}

TEST_CASE("focusing blow-up is reported with a step index") {
    const Grid g = make_grid(20.0, 401);
    const ModelSpec cubic = make_model("cubic");
    FieldState s = make_state(g);
    for (int i = 0; i < g.N; ++i) s.phi[i] = 30.0 * Q_profile(g.x[i]);
    EvolveConfig cfg;
    cfg.steps_per_period = 4096;
    try {
        evolve_period(s, cubic, 40.0, cfg, 4);
        FAIL("expected blow-up");
    } catch (const BlowUpError& e) {
        REQUIRE(e.step_index >= 1);
    }
}

TEST_CASE("virial diagnostics on the zero trajectory") {
    const Grid g = make_grid(20.0, 201);
    Trajectory traj;
    traj.T = 6.0;
    for (int m = 0; m <= 8; ++m) {
        FieldState s = make_state(g);
        s.time = m * traj.T / 8;
        traj.states.push_back(s);
    }
    const VirialReport vr = virial_diagnostics(traj, make_model("cubic"), 5.0);
    REQUIRE(vr.i1_defect == 0.0);
    REQUIRE(vr.i2_defect == 0.0);
    REQUIRE(vr.identity_defect == 0.0);
}

TEST_CASE("virial rejects non-uniform sampling") {
    const Grid g = make_grid(20.0, 201);
    Trajectory traj;
    traj.T = 6.0;
    for (int m = 0; m <= 8; ++m) {
        FieldState s = make_state(g);
        s.time = m * traj.T / 8;
        traj.states.push_back(s);
    }
    traj.states[3].time += 0.01;
    REQUIRE_THROWS_AS(virial_diagnostics(traj, make_model("cubic"), 5.0), std::invalid_argument);
}

TEST_CASE("virial identities on the exact breather") {
    const Grid g = make_grid(100.0, 2001);
    const ModelSpec sg = make_model("sine_gordon");
    const Trajectory traj = analytic_trajectory(BreatherParams::from_eps(0.2), g, 64);
    const VirialReport vr = virial_diagnostics(traj, sg, g.L / 4.0);
    REQUIRE(vr.i1_defect < 1e-4);
    REQUIRE(vr.i2_defect < 1e-4);
    REQUIRE(vr.identity_defect < 1e-4);
    REQUIRE(vr.alpha > 0.0);
}

TEST_CASE("virial scaling ratios stay within a factor 4 across the family") {
    const ModelSpec sg = make_model("sine_gordon");
    std::vector<double> r1, r2, r3;
    for (double eps : {0.05, 0.1, 0.2}) {
        const double L = std::max(30.0, 28.0 / eps);
        const int N = 2 * static_cast<int>(std::ceil(L / 0.25)) + 1;
        const Grid g = make_grid(L, N);
        const Trajectory traj = analytic_trajectory(BreatherParams::from_eps(eps), g, 32);
        const VirialReport vr = virial_diagnostics(traj, sg, g.L / 4.0);
        r1.push_back(vr.ratio_t_l2);
        r2.push_back(vr.ratio_x);
        r3.push_back(vr.ratio_linf4);
    }
    for (const auto* v : {&r1, &r2, &r3}) {
        const double mx = std::max({(*v)[0], (*v)[1], (*v)[2]});
        const double mn = std::min({(*v)[0], (*v)[1], (*v)[2]});
        REQUIRE(mx / mn < 4.0);
    }
}
