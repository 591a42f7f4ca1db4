// Time evolution of the semi-discrete field equations, used as an
// independent cross-check on the Fourier-in-time solver: one-period
// return residuals, energy drift, and virial/averaging diagnostics.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "breatherlab/grid.hpp"
#include "breatherlab/model.hpp"

namespace breatherlab {

enum class Scheme { leapfrog, strang };

struct EvolveConfig {
    int steps_per_period = 4096;
    Scheme scheme = Scheme::leapfrog;
    int snapshot_every = 0;  // 0 = no snapshots
};

struct BlowUpError : std::runtime_error {
    long step_index;
    explicit BlowUpError(long idx)
        : std::runtime_error("evolution blew up at step " + std::to_string(idx)), step_index(idx) {}
};

namespace detail {

inline void acceleration(const Grid& g, const ModelSpec& m,
                         const std::vector<double>& phi, std::vector<double>& acc) {
    acc = d2(g, phi);
    for (int i = 0; i < g.N; ++i) acc[i] += -phi[i] + q_eval(m, g.x[i], phi[i]);
}

inline void check_cfl(const Grid& g, double dt) {
    if (!(dt > 0.0) || dt > 0.5 * g.h)
        throw std::invalid_argument("evolve: CFL guard requires 0 < dt <= 0.5 h");
}

// kick-drift-kick velocity Verlet on phi_tt = d2 phi - phi + q(x, phi)
inline void step_leapfrog(FieldState& s, const ModelSpec& m, double dt) {
    const Grid& g = s.grid;
    std::vector<double> acc;
    acceleration(g, m, s.phi, acc);
    for (int i = 0; i < g.N; ++i) s.phi_t[i] += 0.5 * dt * acc[i];
    for (int i = 0; i < g.N; ++i) s.phi[i] += dt * s.phi_t[i];
    acceleration(g, m, s.phi, acc);
    for (int i = 0; i < g.N; ++i) s.phi_t[i] += 0.5 * dt * acc[i];
    s.time += dt;
}

// Strang split: half kick with the nonlinear force q alone, then the
// linear flow phi_tt = d2 phi - phi advanced by 4 Verlet substeps,
// then the closing nonlinear half kick.
inline void step_strang(FieldState& s, const ModelSpec& m, double dt) {
    const Grid& g = s.grid;
    for (int i = 0; i < g.N; ++i) s.phi_t[i] += 0.5 * dt * q_eval(m, g.x[i], s.phi[i]);
    const int sub = 4;
    const double ds = dt / sub;
    std::vector<double> lin;
    for (int k = 0; k < sub; ++k) {
        lin = d2(g, s.phi);
        for (int i = 0; i < g.N; ++i) s.phi_t[i] += 0.5 * ds * (lin[i] - s.phi[i]);
        for (int i = 0; i < g.N; ++i) s.phi[i] += ds * s.phi_t[i];
        lin = d2(g, s.phi);
        for (int i = 0; i < g.N; ++i) s.phi_t[i] += 0.5 * ds * (lin[i] - s.phi[i]);
    }
    for (int i = 0; i < g.N; ++i) s.phi_t[i] += 0.5 * dt * q_eval(m, g.x[i], s.phi[i]);
    s.time += dt;
}

}  // namespace detail

/// One second-order symplectic step. Throws on CFL violation or if the
/// state stops being finite.
inline FieldState step(const FieldState& s0, const ModelSpec& m, double dt,
                       Scheme scheme = Scheme::leapfrog) {
    detail::check_cfl(s0.grid, std::abs(dt));
    FieldState s = s0;
    if (scheme == Scheme::leapfrog)
        detail::step_leapfrog(s, m, dt);
    else
        detail::step_strang(s, m, dt);
    if (!all_finite(s.phi) || !all_finite(s.phi_t)) throw BlowUpError(0);
    return s;
}

/// Uniform samples of one period: states[m] at t0 + m T/M for m = 0..M,
/// both endpoints included.
struct Trajectory {
    std::vector<FieldState> states;
    double T = 0.0;
    int samples() const { return static_cast<int>(states.size()) - 1; }
};

/// Evolve exactly one period, sampling M+1 uniform snapshots.
/// cfg.steps_per_period must be a multiple of M.
inline Trajectory evolve_period(const FieldState& s0, const ModelSpec& m, double T,
                                const EvolveConfig& cfg, int M) {
    if (M < 1 || cfg.steps_per_period % M != 0)
        throw std::invalid_argument("evolve: steps_per_period must be a positive multiple of the sample count");
    const double dt = T / cfg.steps_per_period;
    detail::check_cfl(s0.grid, dt);
    Trajectory traj;
    traj.T = T;
    traj.states.reserve(M + 1);
    FieldState s = s0;
    traj.states.push_back(s);
    const int per = cfg.steps_per_period / M;
    long idx = 0;
    for (int block = 0; block < M; ++block) {
        for (int k = 0; k < per; ++k) {
            if (cfg.scheme == Scheme::leapfrog)
                detail::step_leapfrog(s, m, dt);
            else
                detail::step_strang(s, m, dt);
            ++idx;
            if (!all_finite(s.phi) || !all_finite(s.phi_t)) throw BlowUpError(idx);
        }
        traj.states.push_back(s);
    }
    return traj;
}

struct PeriodResidual {
    double phi_gap = 0.0;
    double phit_gap = 0.0;
};

/// L2 gaps between the state evolved over one period and the initial state.
inline PeriodResidual period_residual(const FieldState& s0, const ModelSpec& m, double T,
                                      const EvolveConfig& cfg) {
    Trajectory traj = evolve_period(s0, m, T, cfg, 1);
    const FieldState& s1 = traj.states.back();
    const Grid& g = s0.grid;
    std::vector<double> dphi(g.N), dphit(g.N);
    for (int i = 0; i < g.N; ++i) {
        dphi[i] = s1.phi[i] - s0.phi[i];
        dphit[i] = s1.phi_t[i] - s0.phi_t[i];
    }
    return {l2_norm(g, dphi), l2_norm(g, dphit)};
}

inline double relative_energy_drift(const Trajectory& traj, const ModelSpec& m) {
    const double e0 = energy(traj.states.front(), m);
    const double e1 = energy(traj.states.back(), m);
    const double scale = std::max(std::abs(e0), 1e-300);
    return std::abs(e1 - e0) / scale;
}

// ---------------------------------------------------------------------------
// Virial / time-averaging diagnostics over one period.

struct VirialReport {
    double A = 0.0;
    double i1_defect = 0.0;        // |I1(T) - I1(0)|
    double i2_defect = 0.0;        // |I2(T) - I2(0)|
    double identity_defect = 0.0;  // time-averaged I1' identity
    double ratio_t_l2 = 0.0;       // avg(|phi_t|^2 + |phi|^2) / alpha
    double ratio_x = 0.0;          // avg |phi_x|^2 / alpha^3
    double ratio_linf4 = 0.0;      // avg |phi|_inf^4 / alpha^4
    double alpha = 0.0;            // max over samples of squared H1 norm
};

/// Diagnostics on a uniformly sampled one-period trajectory. The weights
/// are zeta_A = sech(x/A) and Theta_A(x) = A atan(sinh(x/A)).
inline VirialReport virial_diagnostics(const Trajectory& traj, const ModelSpec& m, double A) {
    const int M = traj.samples();
    if (M < 2) throw std::invalid_argument("virial: need at least 2 samples over the period");
    const double dt = traj.T / M;
    for (int k = 0; k <= M; ++k) {
        const double expect = traj.states.front().time + k * dt;
        if (std::abs(traj.states[k].time - expect) > 1e-9 * std::max(1.0, traj.T))
            throw std::invalid_argument("virial: trajectory samples are not uniform over one period");
    }
    if (!(A > 0.0)) throw std::invalid_argument("virial: weight scale A must be positive");

    const Grid& g = traj.states.front().grid;
    std::vector<double> zeta(g.N), theta(g.N);
    for (int i = 0; i < g.N; ++i) {
        zeta[i] = 1.0 / std::cosh(g.x[i] / A);
        theta[i] = A * std::atan(std::sinh(g.x[i] / A));
    }

    VirialReport rep;
    rep.A = A;

    auto i1_of = [&](const FieldState& s) {
        std::vector<double> dens(g.N);
        for (int i = 0; i < g.N; ++i) dens[i] = s.phi[i] * s.phi_t[i];
        return trapezoid(g, dens);
    };
    auto i2_of = [&](const FieldState& s) {
        const std::vector<double> dphi = d1(g, s.phi);
        std::vector<double> dens(g.N);
        for (int i = 0; i < g.N; ++i)
            dens[i] = (theta[i] * dphi[i] + 0.5 * zeta[i] * s.phi[i]) * s.phi_t[i];
        return trapezoid(g, dens);
    };

    rep.i1_defect = std::abs(i1_of(traj.states.back()) - i1_of(traj.states.front()));
    rep.i2_defect = std::abs(i2_of(traj.states.back()) - i2_of(traj.states.front()));

    // Time averages by periodic trapezoid (endpoints half-weighted).
    double avg_identity = 0.0, avg_t_l2 = 0.0, avg_x = 0.0, avg_linf4 = 0.0, alpha = 0.0;
    for (int k = 0; k <= M; ++k) {
        const FieldState& s = traj.states[k];
        const double w = (k == 0 || k == M) ? 0.5 : 1.0;
        const std::vector<double> dphi = d1(g, s.phi);
        std::vector<double> nl(g.N), pt2(g.N), px2(g.N), p2(g.N);
        double linf = 0.0;
        for (int i = 0; i < g.N; ++i) {
            const double f = s.phi[i];
            pt2[i] = s.phi_t[i] * s.phi_t[i];
            px2[i] = dphi[i] * dphi[i];
            p2[i] = f * f;
            nl[i] = m.U(g.x[i]) * f * f * f + f * f * f * f / 6.0 + f * m.p(f);
            linf = std::max(linf, std::abs(f));
        }
        const double t2 = trapezoid(g, pt2), x2 = trapezoid(g, px2), l2 = trapezoid(g, p2);
        avg_identity += w * (t2 - (x2 + l2) + trapezoid(g, nl));
        avg_t_l2 += w * (t2 + l2);
        avg_x += w * x2;
        avg_linf4 += w * linf * linf * linf * linf;
        alpha = std::max(alpha, l2 + x2);
    }
    const double inv = 1.0 / M;
    rep.identity_defect = std::abs(avg_identity * inv);
    rep.alpha = alpha;
    if (alpha > 0.0) {
        rep.ratio_t_l2 = avg_t_l2 * inv / alpha;
        rep.ratio_x = avg_x * inv / (alpha * alpha * alpha);
        rep.ratio_linf4 = avg_linf4 * inv / (alpha * alpha * alpha * alpha);
    }
    return rep;
}

}  // namespace breatherlab
