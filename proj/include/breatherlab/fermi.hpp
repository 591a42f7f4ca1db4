// Second-harmonic resonance analysis: the potential's oscillatory
// integrals at sqrt(3), the resonance defect of the 2n* forcing, the
// quadratic approximation gap, and the localization-mass diagnostic.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "breatherlab/grid.hpp"
#include "breatherlab/model.hpp"
#include "breatherlab/modes.hpp"
#include "breatherlab/solver.hpp"

namespace breatherlab {

struct GoldenRuleReport {
    double cos_integral = 0.0;  // ∫ cos(sqrt(3) x) U dx
    double sin_integral = 0.0;
    bool decay_warning = false;
    double kappa = 0.0;              // sqrt(4 n*^2 w^2 - 1), measured resonant frequency
    double resonance_defect_f = 0.0;
    double resonance_defect_g = 0.0;
    double second_harmonic_gap = 0.0;       // L1 norm, physical variables
    double gap_rescaled = 0.0;              // divided by alpha^2
    double gap_over_sqrt_alpha = 0.0;
    double limiting_functional = 0.0;
    double localization_mass = 0.0;
};

/// Oscillatory integrals of the potential at exactly k = sqrt(3).
inline FourierIntegral golden_rule_integrals(const ModelSpec& model, const Grid& g) {
    std::vector<double> u(g.N);
    for (int i = 0; i < g.N; ++i) u[i] = model.U(g.x[i]);
    return fourier_integral(g, u, std::sqrt(3.0));
}

struct ResonanceDefect {
    double defect_f = 0.0;
    double defect_g = 0.0;
    double kappa = 0.0;
};

/// |∫ cos(kappa x) F_{2n*}| and |∫ cos(kappa x) G_{2n*}| with the measured
/// kappa = sqrt(4 n*^2 w^2 - 1). Both vanish for genuine decaying solutions.
inline ResonanceDefect resonance_defect(const BreatherSolution& sol, const ModelSpec& model) {
    const ModeStack& st = sol.stack;
    const int n_star = dominant_index(st);
    const int n2 = 2 * n_star;
    if (n2 > st.n_max)
        throw std::invalid_argument("resonance_defect: mode budget too small, need 2 n* <= n_max");
    const double k2 = 4.0 * n_star * n_star * st.omega * st.omega - 1.0;
    if (!(k2 > 0.0))
        throw std::invalid_argument("resonance_defect: second harmonic is not oscillatory (4 n*^2 w^2 <= 1)");
    ResonanceDefect rd;
    rd.kappa = std::sqrt(k2);
    const ForcingSet fs = assemble_forcing(st, model);
    const FourierIntegral fi = fourier_integral(st.grid, fs.f[n2], rd.kappa);
    const FourierIntegral gi = fourier_integral(st.grid, fs.g[n2], rd.kappa);
    rd.defect_f = std::abs(fi.cos_part);
    rd.defect_g = std::abs(gi.cos_part);
    return rd;
}

struct SecondHarmonicGap {
    double gap_l1 = 0.0;           // || F_{2n*} - U (a*^2 - b*^2)/2 ||_{L1}
    double gap_rescaled = 0.0;     // same in rescaled variables: gap_l1 / alpha^2
    double gap_over_sqrt_alpha = 0.0;
};

/// The cubic term feeds only the n* and 3n* harmonics, so the second
/// harmonic forcing is the quadratic part alone up to remainder coupling:
/// measure || F_{2n*} - U (a*^2 - b*^2)/2 ||_{L1} and its ratio to sqrt(alpha).
inline SecondHarmonicGap second_harmonic_gap(const BreatherSolution& sol, const ModelSpec& model,
                                             double alpha) {
    const ModeStack& st = sol.stack;
    const int n_star = dominant_index(st);
    const int n2 = 2 * n_star;
    if (n2 > st.n_max)
        throw std::invalid_argument("second_harmonic_gap: mode budget too small, need 2 n* <= n_max");
    if (!(alpha > 0.0)) throw std::invalid_argument("second_harmonic_gap: alpha must be positive");
    const Grid& g = st.grid;
    const ForcingSet fs = assemble_forcing(st, model);
    std::vector<double> gap(g.N);
    for (int i = 0; i < g.N; ++i) {
        const double as = st.a[n_star][i], bs = st.b[n_star][i];
        gap[i] = std::abs(fs.f[n2][i] - 0.5 * model.U(g.x[i]) * (as * as - bs * bs));
    }
    SecondHarmonicGap r;
    r.gap_l1 = trapezoid(g, gap);
    r.gap_rescaled = r.gap_l1 / (alpha * alpha);
    r.gap_over_sqrt_alpha = r.gap_rescaled / std::sqrt(alpha);
    return r;
}

/// eps^{-1} sup over collocation times of ∫_{|x| < L_window/eps} phi^2 dx.
inline double localization_mass(const BreatherSolution& sol, double L_window, int M_samples = 64) {
    const ModeStack& st = sol.stack;
    const Grid& g = st.grid;
    const int n_star = dominant_index(st);
    const double wk = n_star * st.omega;
    const double e2 = 1.0 - wk * wk;
    if (!(e2 > 0.0)) throw std::invalid_argument("localization_mass: n* omega must lie below 1");
    const double eps = std::sqrt(e2);
    const double win = L_window / eps;
    if (win > g.L) throw std::invalid_argument("localization_mass: window exceeds the domain");

    const double T = 2.0 * std::numbers::pi / st.omega;
    double worst = 0.0;
    for (int m = 0; m < M_samples; ++m) {
        const FieldState s = synthesize(st, m * T / M_samples);
        double acc = 0.0;
        for (int i = 0; i < g.N; ++i) {
            if (std::abs(g.x[i]) >= win) continue;
            acc += s.phi[i] * s.phi[i];
        }
        worst = std::max(worst, acc * g.h);
    }
    return worst / eps;
}

/// The limiting resonance functional cos(2 theta_1) lambda Q^2(sqrt(lambda) r_1)
/// times the potential's cosine integral at sqrt(3).
inline double limiting_functional(double lambda, double r1, double theta1, double cos_integral) {
    const double q = Q_profile(std::sqrt(lambda) * r1);
    return std::cos(2.0 * theta1) * lambda * q * q * cos_integral;
}

}  // namespace breatherlab
