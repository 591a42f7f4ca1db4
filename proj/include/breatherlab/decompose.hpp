// Constructive profile decomposition of the dominant-mode pair: greedy
// extraction of modulated sech solitons, the period-asymptotics fit for
// the limiting scale, and the rescaled sup-in-time L2 discrepancy check.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "breatherlab/grid.hpp"
#include "breatherlab/model.hpp"
#include "breatherlab/modes.hpp"
#include "breatherlab/solver.hpp"

namespace breatherlab {

/// One modulated soliton x -> sqrt(lambda) Q(sqrt(lambda)(y - r)) with
/// temporal phase theta in [0, 2 pi).
struct SolitonProfile {
    double lambda = 0.0;
    double r = 0.0;
    double theta = 0.0;
};

struct ExtractConfig {
    double min_height = 0.1;  // fraction of the canonical peak 4 sqrt(lambda)
    int max_J = 8;
    bool fit_refine = true;
};

struct DecompositionReport {
    double lambda_hat = 0.0;
    std::vector<SolitonProfile> profiles;  // sorted by |r|
    double residual_H1 = 0.0;
    double residual_L2 = 0.0;
    std::vector<std::vector<double>> separations;  // pairwise |r_i - r_j|
    double theorem_ii_value = std::numeric_limits<double>::quiet_NaN();
    bool overcrowded = false;
};

namespace detail {

// Local least squares of (a, b) against (cos t, sin t) sqrt(l) Q(sqrt(l)(y-r))
// in (r, theta), amplitude held fixed by lambda_hat. Gauss-Newton on a
// window of half-width 10/sqrt(l) around the peak.
inline void refine_profile(const Grid& yg, const std::vector<double>& a,
                           const std::vector<double>& b, double sqlam,
                           double& r, double& theta) {
    const double half = 10.0 / sqlam;
    int lo = 0, hi = yg.N - 1;
    while (lo < yg.N && yg.x[lo] < r - half) ++lo;
    while (hi >= 0 && yg.x[hi] > r + half) --hi;
    if (hi - lo < 8) return;

    for (int iter = 0; iter < 12; ++iter) {
        double g11 = 0.0, g12 = 0.0, g22 = 0.0, r1 = 0.0, r2 = 0.0;
        const double ct = std::cos(theta), st = std::sin(theta);
        for (int i = lo; i <= hi; ++i) {
            const double xi = sqlam * (yg.x[i] - r);
            const double P = sqlam * Q_profile(xi);
            const double dPdr = -sqlam * sqlam * Q_prime(xi);
            const double ra = a[i] - ct * P;
            const double rb = b[i] - st * P;
            // d(residual)/dr and d(residual)/dtheta for both components
            const double ja_r = -ct * dPdr, jb_r = -st * dPdr;
            const double ja_t = st * P, jb_t = -ct * P;
            g11 += ja_r * ja_r + jb_r * jb_r;
            g12 += ja_r * ja_t + jb_r * jb_t;
            g22 += ja_t * ja_t + jb_t * jb_t;
            r1 += ja_r * ra + jb_r * rb;
            r2 += ja_t * ra + jb_t * rb;
        }
        const double det = g11 * g22 - g12 * g12;
        if (std::abs(det) < 1e-30) return;
        const double dr = -(g22 * r1 - g12 * r2) / det;
        const double dth = -(g11 * r2 - g12 * r1) / det;
        r += dr;
        theta += dth;
        if (std::abs(dr) < 1e-13 * (1.0 + std::abs(r)) && std::abs(dth) < 1e-13) break;
    }
}

inline double wrap_angle(double t) {
    const double two_pi = 2.0 * std::numbers::pi;
    t = std::fmod(t, two_pi);
    if (t < 0.0) t += two_pi;
    return t;
}

}  // namespace detail

/// Iterated peak extraction: locate the joint amplitude maximum, read off
/// (r, theta), optionally refine, subtract, repeat until the remaining
/// peak falls below min_height times the canonical peak.
inline DecompositionReport greedy_extract(const Grid& ygrid, std::vector<double> a,
                                          std::vector<double> b, double lambda_hat,
                                          const ExtractConfig& cfg = {}) {
    if (!(lambda_hat > 0.0)) throw std::invalid_argument("greedy_extract: lambda_hat must be positive");
    if (static_cast<int>(a.size()) != ygrid.N || static_cast<int>(b.size()) != ygrid.N)
        throw std::invalid_argument("greedy_extract: input size mismatch");

    DecompositionReport rep;
    rep.lambda_hat = lambda_hat;
    const double sqlam = std::sqrt(lambda_hat);
    const double stop_amp = cfg.min_height * 4.0 * sqlam;

    auto peak_at = [&]() {
        int m = 0;
        double best = -1.0;
        for (int i = 0; i < ygrid.N; ++i) {
            const double e = a[i] * a[i] + b[i] * b[i];
            if (e > best) {
                best = e;
                m = i;
            }
        }
        return std::pair<int, double>(m, std::sqrt(best));
    };

    while (static_cast<int>(rep.profiles.size()) < cfg.max_J) {
        auto [m, amp] = peak_at();
        if (amp < stop_amp) break;
        double r = ygrid.x[m];
        double theta = std::atan2(b[m], a[m]);
        if (cfg.fit_refine) detail::refine_profile(ygrid, a, b, sqlam, r, theta);
        const double ct = std::cos(theta), st = std::sin(theta);
        for (int i = 0; i < ygrid.N; ++i) {
            const double P = sqlam * Q_profile(sqlam * (ygrid.x[i] - r));
            a[i] -= ct * P;
            b[i] -= st * P;
        }
        rep.profiles.push_back({lambda_hat, r, detail::wrap_angle(theta)});
    }
    if (static_cast<int>(rep.profiles.size()) == cfg.max_J) {
        auto [m, amp] = peak_at();
        if (amp >= stop_amp) rep.overcrowded = true;
    }

    rep.residual_L2 = std::sqrt(l2_norm_sq(ygrid, a) + l2_norm_sq(ygrid, b));
    rep.residual_H1 = std::sqrt(rep.residual_L2 * rep.residual_L2 +
                                l2_norm_sq(ygrid, d1(ygrid, a)) + l2_norm_sq(ygrid, d1(ygrid, b)));

    std::sort(rep.profiles.begin(), rep.profiles.end(),
              [](const SolitonProfile& p, const SolitonProfile& q) {
                  return std::abs(p.r) < std::abs(q.r);
              });
    const size_t J = rep.profiles.size();
    rep.separations.assign(J, std::vector<double>(J, 0.0));
    for (size_t i = 0; i < J; ++i)
        for (size_t j = 0; j < J; ++j)
            rep.separations[i][j] = std::abs(rep.profiles[i].r - rep.profiles[j].r);
    return rep;
}

/// Rescaled axis y = alpha x paired with the rescaled dominant profiles
/// a(y)/alpha, b(y)/alpha of a solution.
struct RescaledDominant {
    Grid ygrid;
    std::vector<double> a, b;
};

inline RescaledDominant rescale_dominant(const Grid& xgrid, const std::vector<double>& a_star,
                                         const std::vector<double>& b_star, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("rescale_dominant: alpha must be positive");
    RescaledDominant rd;
    rd.ygrid = make_grid(alpha * xgrid.L, xgrid.N);
    rd.a.resize(xgrid.N);
    rd.b.resize(xgrid.N);
    for (int i = 0; i < xgrid.N; ++i) {
        rd.a[i] = a_star[i] / alpha;
        rd.b[i] = b_star[i] / alpha;
    }
    return rd;
}

/// Squared weighted H1 norm  ∫ a'^2 + b'^2 + lambda (a^2 + b^2); the
/// quantity each well-separated extraction step removes by a fixed amount.
inline double weighted_h1_sq(const Grid& g, const std::vector<double>& a,
                             const std::vector<double>& b, double lambda) {
    return l2_norm_sq(g, d1(g, a)) + l2_norm_sq(g, d1(g, b)) +
           lambda * (l2_norm_sq(g, a) + l2_norm_sq(g, b));
}

// ---------------------------------------------------------------------------
// Period asymptotics.

struct InsufficientDataError : std::runtime_error {
    InsufficientDataError() : std::runtime_error("fit_lambda: need at least 3 converged family members") {}
};

struct PeriodPoint {
    double alpha = 0.0;
    double T = 0.0;
    int n_star = 1;
};

struct PeriodRow {
    double eps = 0.0;            // sqrt(1 - (2 pi n* / T)^2), 0 if outside the regime
    double alpha_sq = 0.0;
    double rel_period = 0.0;     // T / (2 pi n*) - 1
    double lambda_period = 0.0;  // 2 rel_period / alpha^2
    double lambda_eps = 0.0;     // eps^2 / alpha^2
};

struct PeriodAsymptoticsReport {
    std::vector<PeriodRow> rows;
    double lambda_fit = 0.0;  // least squares of rel_period against alpha^2/2 through the origin
    bool lambda_positive = false;
};

inline PeriodAsymptoticsReport fit_lambda(const std::vector<PeriodPoint>& points) {
    if (points.size() < 3) throw InsufficientDataError();
    PeriodAsymptoticsReport rep;
    double sxy = 0.0, sxx = 0.0;
    for (const PeriodPoint& p : points) {
        if (!(p.alpha > 0.0) || !(p.T > 0.0) || p.n_star < 1)
            throw std::invalid_argument("fit_lambda: invalid family member");
        PeriodRow row;
        row.alpha_sq = p.alpha * p.alpha;
        row.rel_period = p.T / (2.0 * std::numbers::pi * p.n_star) - 1.0;
        row.lambda_period = 2.0 * row.rel_period / row.alpha_sq;
        const double wk = 2.0 * std::numbers::pi * p.n_star / p.T;
        const double e2 = 1.0 - wk * wk;
        row.eps = e2 > 0.0 ? std::sqrt(e2) : 0.0;
        row.lambda_eps = e2 / row.alpha_sq;
        rep.rows.push_back(row);
        const double x = 0.5 * row.alpha_sq;
        sxy += x * row.rel_period;
        sxx += x * x;
    }
    rep.lambda_fit = sxx > 0.0 ? sxy / sxx : 0.0;
    rep.lambda_positive = rep.lambda_fit > 1e-12;
    return rep;
}

inline PeriodAsymptoticsReport fit_lambda(const std::vector<FamilyEntry>& family) {
    std::vector<PeriodPoint> pts;
    for (const FamilyEntry& e : family)
        if (e.sol.converged && e.error.empty())
            pts.push_back({e.alpha, e.T, e.n_star >= 1 ? e.n_star : 1});
    return fit_lambda(pts);
}

// ---------------------------------------------------------------------------

/// Scaled sup-in-time L2 discrepancy between the solution and its
/// soliton-sum model, evaluated at the collocation times:
///   eps^{-1} sup_t ∫ | phi - sum_j eps Q(eps(x - r_j/alpha)) cos(w_k t - theta_j) |^2 dx
/// with eps = sqrt(1 - w_k^2), w_k = n* omega. Stores the value in the report.
inline double theorem_ii_check(const BreatherSolution& sol, DecompositionReport& rep,
                               double alpha, int M_samples = 64) {
    const ModeStack& st = sol.stack;
    const Grid& g = st.grid;
    const int n_star = dominant_index(st);
    const double wk = n_star * st.omega;
    const double e2 = 1.0 - wk * wk;
    if (!(e2 > 0.0)) throw std::invalid_argument("theorem_ii_check: n* omega must lie below 1");
    const double eps = std::sqrt(e2);

    // profile centers in physical coordinates
    std::vector<double> centers;
    for (const SolitonProfile& p : rep.profiles) centers.push_back(p.r / alpha);

    const double T = 2.0 * std::numbers::pi / st.omega;
    double worst = 0.0;
    std::vector<double> diff(g.N);
    for (int m = 0; m < M_samples; ++m) {
        const double t = m * T / M_samples;
        const FieldState s = synthesize(st, t);
        for (int i = 0; i < g.N; ++i) {
            double model_val = 0.0;
            for (size_t j = 0; j < centers.size(); ++j)
                model_val += eps * Q_profile(eps * (g.x[i] - centers[j])) *
                             std::cos(wk * t - rep.profiles[j].theta);
            diff[i] = s.phi[i] - model_val;
        }
        worst = std::max(worst, l2_norm_sq(g, diff));
    }
    rep.theorem_ii_value = worst / eps;
    return rep.theorem_ii_value;
}

}  // namespace breatherlab
