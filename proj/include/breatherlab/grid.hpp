// Spatial discretization: uniform symmetric grids, finite-difference
// derivatives, trapezoid quadrature, discrete norms and oscillatory
// Fourier integrals of decaying fields.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace breatherlab {

struct Grid {
    double L = 0.0;     // half-length, domain is [-L, L]
    int N = 0;          // number of nodes, odd so that x = 0 is a node
    double h = 0.0;     // spacing 2L/(N-1)
    std::vector<double> x;
};

inline Grid make_grid(double L, int N) {
    if (!(L > 0.0)) throw std::invalid_argument("grid: half-length L must be positive");
    if (N < 16) throw std::invalid_argument("grid: N must be at least 16");
    if (N % 2 == 0) throw std::invalid_argument("grid: N must be odd so that x = 0 is a node");
    Grid g;
    g.L = L;
    g.N = N;
    g.h = 2.0 * L / static_cast<double>(N - 1);
    g.x.resize(N);
    const int mid = (N - 1) / 2;
    for (int i = 0; i < N; ++i) g.x[i] = static_cast<double>(i - mid) * g.h;
    return g;
}

/// Sampled (phi, d/dt phi) on a grid at one time.
struct FieldState {
    Grid grid;
    std::vector<double> phi;
    std::vector<double> phi_t;
    double time = 0.0;
};

inline FieldState make_state(const Grid& g) {
    FieldState s;
    s.grid = g;
    s.phi.assign(g.N, 0.0);
    s.phi_t.assign(g.N, 0.0);
    return s;
}

inline bool all_finite(const std::vector<double>& f) {
    for (double v : f)
        if (!std::isfinite(v)) return false;
    return true;
}

// 4th-order central second derivative, homogeneous Dirichlet closure:
// stencil values beyond the two ends are taken as zero.
inline std::vector<double> d2(const Grid& g, const std::vector<double>& f) {
    if (g.N < 7) throw std::invalid_argument("d2: grid too small for the 4th-order stencil");
    if (static_cast<int>(f.size()) != g.N) throw std::invalid_argument("d2: size mismatch");
    const int n = g.N;
    const double c = 1.0 / (12.0 * g.h * g.h);
    std::vector<double> out(n);
    auto at = [&](int i) -> double { return (i < 0 || i >= n) ? 0.0 : f[i]; };
    for (int i = 0; i < n; ++i)
        out[i] = c * (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * f[i] + 16.0 * at(i + 1) - at(i + 2));
    return out;
}

// 4th-order central first derivative with the same zero closure.
inline std::vector<double> d1(const Grid& g, const std::vector<double>& f) {
    if (g.N < 7) throw std::invalid_argument("d1: grid too small for the 4th-order stencil");
    if (static_cast<int>(f.size()) != g.N) throw std::invalid_argument("d1: size mismatch");
    const int n = g.N;
    const double c = 1.0 / (12.0 * g.h);
    std::vector<double> out(n);
    auto at = [&](int i) -> double { return (i < 0 || i >= n) ? 0.0 : f[i]; };
    for (int i = 0; i < n; ++i)
        out[i] = c * (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2));
    return out;
}

inline double trapezoid(const Grid& g, const std::vector<double>& f) {
    double s = 0.5 * (f.front() + f.back());
    for (int i = 1; i + 1 < g.N; ++i) s += f[i];
    return s * g.h;
}

inline double l2_norm_sq(const Grid& g, const std::vector<double>& f) {
    double s = 0.5 * (f.front() * f.front() + f.back() * f.back());
    for (int i = 1; i + 1 < g.N; ++i) s += f[i] * f[i];
    return s * g.h;
}

inline double l2_norm(const Grid& g, const std::vector<double>& f) {
    return std::sqrt(l2_norm_sq(g, f));
}

struct NormReport {
    double l2 = 0.0;
    double h1 = 0.0;
    double linf = 0.0;
};

inline NormReport norms(const Grid& g, const std::vector<double>& f) {
    if (!all_finite(f)) throw std::invalid_argument("norms: non-finite samples");
    NormReport r;
    r.l2 = l2_norm(g, f);
    r.h1 = std::sqrt(r.l2 * r.l2 + l2_norm_sq(g, d1(g, f)));
    for (double v : f) r.linf = std::max(r.linf, std::abs(v));
    return r;
}

struct FourierIntegral {
    double cos_part = 0.0;
    double sin_part = 0.0;
    bool decay_warning = false;   // |f| at either end above 1e-10
};

// Trapezoid evaluation of  ∫ cos(kx) f  and  ∫ sin(kx) f  over [-L, L].
inline FourierIntegral fourier_integral(const Grid& g, const std::vector<double>& f, double k) {
    if (static_cast<int>(f.size()) != g.N) throw std::invalid_argument("fourier_integral: size mismatch");
    FourierIntegral r;
    r.decay_warning = std::abs(f.front()) > 1e-10 || std::abs(f.back()) > 1e-10;
    double sc = 0.0, ss = 0.0;
    for (int i = 0; i < g.N; ++i) {
        const double w = (i == 0 || i == g.N - 1) ? 0.5 : 1.0;
        sc += w * std::cos(k * g.x[i]) * f[i];
        ss += w * std::sin(k * g.x[i]) * f[i];
    }
    r.cos_part = sc * g.h;
    r.sin_part = ss * g.h;
    return r;
}

// Linear interpolation of samples f on grid g at point x; zero outside.
inline double interp_linear(const Grid& g, const std::vector<double>& f, double x) {
    if (x <= -g.L || x >= g.L) return 0.0;
    const double t = (x + g.L) / g.h;
    const int i = static_cast<int>(t);
    const double w = t - static_cast<double>(i);
    if (i + 1 >= g.N) return f[g.N - 1];
    return (1.0 - w) * f[i] + w * f[i + 1];
}

}  // namespace breatherlab
