// Breather candidates as zeros of the time-Fourier Galerkin residual
//   a_n'' + (n^2 w^2 - 1) a_n + f_n = 0,   b_n'' + (n^2 w^2 - 1) b_n + g_n = 0,
// solved by damped Newton at fixed omega with gauge fixing, seeded by
// the small-amplitude soliton profile.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "breatherlab/banded.hpp"
#include "breatherlab/grid.hpp"
#include "breatherlab/model.hpp"
#include "breatherlab/modes.hpp"

namespace breatherlab {

enum class Boundary { dirichlet, sponge };

struct NewtonConfig {
    double tol = 1e-10;          // on the infinity norm of the Newton update
    int max_iter = 50;
    double damping = 1.0;        // initial step fraction, backtracked on residual growth
    bool pin_b_fundamental = true;  // time-translation gauge: b_{n*} == 0
    bool even_x = true;             // space-translation gauge for even U
    bool centroid_anchor = false;   // anchored centroid for non-even U
    Boundary boundary = Boundary::dirichlet;
    int n_star = 1;
    int collocation = 0;         // 0 = auto (dealiased)
};

struct GaugeError : std::runtime_error {
    explicit GaugeError(const std::string& what) : std::runtime_error(what) {}
};

struct DomainTooSmallError : std::runtime_error {
    explicit DomainTooSmallError(double boundary_value)
        : std::runtime_error(format_message(boundary_value)) {}

  private:
    static std::string format_message(double v) {
        char buf[96];
        std::snprintf(buf, sizeof(buf),
                      "seed: profile decay at the boundary is %.3g > 1e-10; enlarge L", v);
        return buf;
    }
};

/// Stack with a_1 = eps Q(eps x), all other coefficients zero, and
/// omega = sqrt(1 - eps^2).
inline ModeStack seed(const BreatherParams& bp, const Grid& g, int n_max) {
    if (20.0 / bp.eps > g.L)
        throw DomainTooSmallError(bp.eps * Q_profile(bp.eps * g.L));
    const double edge = bp.eps * Q_profile(bp.eps * g.L);
    if (edge > 1e-10) throw DomainTooSmallError(edge);
    ModeStack st = make_stack(g, bp.omega, n_max);
    for (int i = 0; i < g.N; ++i) st.a[1][i] = bp.eps * Q_profile(bp.eps * g.x[i]);
    return st;
}

struct BreatherSolution {
    ModeStack stack;
    double omega = 0.0;
    std::string model_name;
    double residual_norm = 0.0;  // max over retained harmonics of mode_residual
    int newton_iterations = 0;
    bool converged = false;
    std::vector<double> residual_history;  // global L2 residual per iteration
};

namespace detail {

// Packing of the unknown vector: per grid node, the retained components
// in a fixed order (a_0..a_nmax, then b_n for n >= 1 minus the pinned one).
struct ComponentMap {
    struct Comp {
        bool is_b;
        int n;
    };
    std::vector<Comp> comps;
    int C = 0;

    static ComponentMap build(int n_max, bool pin_b, int n_star) {
        ComponentMap cm;
        for (int n = 0; n <= n_max; ++n) cm.comps.push_back({false, n});
        for (int n = 1; n <= n_max; ++n)
            if (!(pin_b && n == n_star)) cm.comps.push_back({true, n});
        cm.C = static_cast<int>(cm.comps.size());
        return cm;
    }
};

struct GalerkinSystem {
    const ModelSpec& model;
    Grid grid;
    double omega;
    int n_max;
    NewtonConfig cfg;
    ComponentMap cm;
    int M_col;
    std::vector<double> mu;                 // mu_n = n^2 w^2 - 1
    std::vector<std::vector<double>> mu_x;  // effective mu per component and node
    std::vector<std::vector<double>> proj, synth;  // [c][j] collocation tables

    GalerkinSystem(const ModelSpec& m, const ModeStack& st, const NewtonConfig& c)
        : model(m), grid(st.grid), omega(st.omega), n_max(st.n_max), cfg(c) {
        cm = ComponentMap::build(n_max, cfg.pin_b_fundamental, cfg.n_star);
        M_col = cfg.collocation > 0 ? cfg.collocation : dealiased_collocation(n_max);
        if (M_col < 4 * n_max + 2)
            throw std::invalid_argument("newton_solve: collocation too coarse to dealias the cubic term");
        mu.resize(n_max + 1);
        for (int n = 0; n <= n_max; ++n) mu[n] = static_cast<double>(n) * n * omega * omega - 1.0;
        build_mu_x();
        build_tables();
    }

    // Sponge boundary: a smooth frequency taper over the outer quarter of
    // the domain turns oscillatory modes (mu_n > 0) evanescent near +-L.
    void build_mu_x() {
        mu_x.assign(cm.C, std::vector<double>(grid.N, 0.0));
        const double w = grid.L / 4.0;
        for (int c = 0; c < cm.C; ++c) {
            const int n = cm.comps[c].n;
            for (int i = 0; i < grid.N; ++i) {
                double v = mu[n];
                if (cfg.boundary == Boundary::sponge && mu[n] > 0.0) {
                    const double d = std::abs(grid.x[i]) - (grid.L - w);
                    if (d > 0.0) {
                        const double r = std::sin(0.5 * std::numbers::pi * d / w);
                        v = mu[n] - r * r * (mu[n] + 1.0);
                    }
                }
                mu_x[c][i] = v;
            }
        }
    }

    void build_tables() {
        proj.assign(cm.C, std::vector<double>(M_col));
        synth.assign(cm.C, std::vector<double>(M_col));
        for (int c = 0; c < cm.C; ++c) {
            const auto comp = cm.comps[c];
            for (int j = 0; j < M_col; ++j) {
                const double s = 2.0 * std::numbers::pi * j / M_col;
                const double t = comp.is_b ? std::sin(comp.n * s) : std::cos(comp.n * s);
                proj[c][j] = t;
                synth[c][j] = (!comp.is_b && comp.n == 0) ? 0.5 * t : t;
            }
        }
    }

    size_t dim() const { return static_cast<size_t>(grid.N) * cm.C; }
    size_t idx(int i, int c) const { return static_cast<size_t>(i) * cm.C + c; }

    void pack(const ModeStack& st, std::vector<double>& u) const {
        u.resize(dim());
        for (int c = 0; c < cm.C; ++c) {
            const auto comp = cm.comps[c];
            const auto& src = comp.is_b ? st.b[comp.n] : st.a[comp.n];
            for (int i = 0; i < grid.N; ++i) u[idx(i, c)] = src[i];
        }
    }

    ModeStack unpack(const std::vector<double>& u) const {
        ModeStack st = make_stack(grid, omega, n_max);
        for (int c = 0; c < cm.C; ++c) {
            const auto comp = cm.comps[c];
            auto& dst = comp.is_b ? st.b[comp.n] : st.a[comp.n];
            for (int i = 0; i < grid.N; ++i) dst[i] = u[idx(i, c)];
        }
        return st;
    }

    // Residual of the coupled mode system at the packed state.
    std::vector<double> residual(const std::vector<double>& u) const {
        const int N = grid.N;
        std::vector<double> R(dim(), 0.0);
        // nonlinear forcing via collocation
        std::vector<double> phi(N), qv(N);
        std::vector<std::vector<double>> fr(cm.C, std::vector<double>(N, 0.0));
        const double two_over_M = 2.0 / M_col;
        for (int j = 0; j < M_col; ++j) {
            for (int i = 0; i < N; ++i) {
                double v = 0.0;
                for (int c = 0; c < cm.C; ++c) v += u[idx(i, c)] * synth[c][j];
                phi[i] = v;
            }
            for (int i = 0; i < N; ++i) qv[i] = q_eval(model, grid.x[i], phi[i]);
            for (int c = 0; c < cm.C; ++c) {
                const double w = proj[c][j] * two_over_M;
                if (w == 0.0) continue;
                auto& f = fr[c];
                for (int i = 0; i < N; ++i) f[i] += w * qv[i];
            }
        }
        // linear part: d2 + mu_eff
        const double cd = 1.0 / (12.0 * grid.h * grid.h);
        for (int c = 0; c < cm.C; ++c) {
            for (int i = 0; i < N; ++i) {
                auto at = [&](int k) -> double { return (k < 0 || k >= N) ? 0.0 : u[idx(k, c)]; };
                const double lap = cd * (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) +
                                         16.0 * at(i + 1) - at(i + 2));
                R[idx(i, c)] = lap + mu_x[c][i] * u[idx(i, c)] + fr[c][i];
            }
        }
        return R;
    }

    // Analytic Jacobian in banded storage. The nonlinear block couples all
    // components at one node through dq/dphi pushed through the transform.
    BandedMatrix jacobian(const std::vector<double>& u) const {
        const int N = grid.N;
        const int C = cm.C;
        const int band = 2 * C;
        BandedMatrix J(static_cast<int>(dim()), band, band);
        const double cd = 1.0 / (12.0 * grid.h * grid.h);
        for (int c = 0; c < C; ++c) {
            for (int i = 0; i < N; ++i) {
                const int row = static_cast<int>(idx(i, c));
                J.add(row, row, -30.0 * cd + mu_x[c][i]);
                if (i - 2 >= 0) J.add(row, static_cast<int>(idx(i - 2, c)), -cd);
                if (i - 1 >= 0) J.add(row, static_cast<int>(idx(i - 1, c)), 16.0 * cd);
                if (i + 1 < N) J.add(row, static_cast<int>(idx(i + 1, c)), 16.0 * cd);
                if (i + 2 < N) J.add(row, static_cast<int>(idx(i + 2, c)), -cd);
            }
        }
        // pointwise coupling blocks K_i[c][c'] = (2/M) sum_j w(s_j, x_i) proj_c synth_c'
        std::vector<double> w(M_col);
        const double two_over_M = 2.0 / M_col;
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < M_col; ++j) {
                double v = 0.0;
                for (int c = 0; c < C; ++c) v += u[idx(i, c)] * synth[c][j];
                w[j] = dq_dphi(model, grid.x[i], v);
            }
            for (int c = 0; c < C; ++c) {
                const int row = static_cast<int>(idx(i, c));
                for (int cp = 0; cp < C; ++cp) {
                    double k = 0.0;
                    for (int j = 0; j < M_col; ++j) k += w[j] * proj[c][j] * synth[cp][j];
                    J.add(row, static_cast<int>(idx(i, cp)), k * two_over_M);
                }
            }
        }
        return J;
    }

    void symmetrize_even(std::vector<double>& u) const {
        const int N = grid.N;
        for (int c = 0; c < cm.C; ++c)
            for (int i = 0; i < N / 2; ++i) {
                const double avg = 0.5 * (u[idx(i, c)] + u[idx(N - 1 - i, c)]);
                u[idx(i, c)] = avg;
                u[idx(N - 1 - i, c)] = avg;
            }
    }

    double norm2(const std::vector<double>& v) const {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    }
};

}  // namespace detail

/// Damped Newton iteration on the stacked harmonics at fixed omega.
/// Non-convergence within max_iter is a reported outcome, not an error.
inline BreatherSolution newton_solve(const ModeStack& seed_stack, const ModelSpec& model,
                                     const NewtonConfig& cfg) {
    if (cfg.even_x && !model.u_even)
        throw GaugeError("newton_solve: even_x gauge requires an even potential");
    if (!(cfg.tol > 0.0) || !(cfg.damping > 0.0 && cfg.damping <= 1.0))
        throw std::invalid_argument("newton_solve: bad tolerance or damping");

    detail::GalerkinSystem sys(model, seed_stack, cfg);
    std::vector<double> u;
    sys.pack(seed_stack, u);
    if (cfg.even_x) sys.symmetrize_even(u);

    BreatherSolution sol;
    sol.omega = seed_stack.omega;
    sol.model_name = model.name;

    std::vector<double> R = sys.residual(u);
    double rnorm = sys.norm2(R);
    sol.residual_history.push_back(rnorm);

    const bool anchor = cfg.centroid_anchor && !cfg.even_x;
    for (int it = 0; it < cfg.max_iter; ++it) {
        BandedMatrix J = sys.jacobian(u);
        std::vector<double> delta = R;
        for (double& v : delta) v = -v;
        try {
            if (!anchor) {
                J.solve(delta);
            } else {
                // Bordered solve via Sherman-Morrison: keep the update
                // orthogonal to the centroid constraint gradient, spending
                // the near-kernel translation direction.
                std::vector<double> t(sys.dim(), 0.0);
                {
                    const ModeStack cur = sys.unpack(u);
                    for (int c = 0; c < sys.cm.C; ++c) {
                        const auto comp = sys.cm.comps[c];
                        const std::vector<double> d =
                            d1(sys.grid, comp.is_b ? cur.b[comp.n] : cur.a[comp.n]);
                        for (int i = 0; i < sys.grid.N; ++i) t[sys.idx(i, c)] = d[i];
                    }
                }
                std::vector<double> grad(sys.dim(), 0.0);
                {
                    const ModeStack cur = sys.unpack(u);
                    const int ns = cfg.n_star;
                    for (int c = 0; c < sys.cm.C; ++c) {
                        const auto comp = sys.cm.comps[c];
                        if (comp.n != ns) continue;
                        const auto& prof = comp.is_b ? cur.b[ns] : cur.a[ns];
                        for (int i = 0; i < sys.grid.N; ++i)
                            grad[sys.idx(i, c)] = 2.0 * sys.grid.x[i] * prof[i] * sys.grid.h;
                    }
                }
                BandedMatrix J2 = J;
                std::vector<double> wdir = t;
                J.solve(delta);
                J2.solve(wdir);
                double cz = 0.0, cw = 0.0;
                for (size_t k = 0; k < delta.size(); ++k) {
                    cz += grad[k] * delta[k];
                    cw += grad[k] * wdir[k];
                }
                if (std::abs(cw) > 1e-14 * (1.0 + std::abs(cz))) {
                    const double nu = cz / cw;
                    for (size_t k = 0; k < delta.size(); ++k) delta[k] -= nu * wdir[k];
                }
            }
        } catch (const SingularMatrixError&) {
            throw GaugeError("newton_solve: singular Jacobian; check the gauge flags "
                             "(pin_b_fundamental / even_x / centroid_anchor)");
        }
        if (cfg.even_x) sys.symmetrize_even(delta);

        double dinf = 0.0;
        for (double v : delta) dinf = std::max(dinf, std::abs(v));

        // backtracking on the global residual norm
        double frac = cfg.damping;
        std::vector<double> u_try(u.size());
        std::vector<double> R_try;
        double rnorm_try = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < 8; ++bt) {
            for (size_t k = 0; k < u.size(); ++k) u_try[k] = u[k] + frac * delta[k];
            R_try = sys.residual(u_try);
            rnorm_try = sys.norm2(R_try);
            if (rnorm_try <= rnorm || rnorm <= cfg.tol) {
                accepted = true;
                break;
            }
            frac *= 0.5;
        }
        u = u_try;
        R = std::move(R_try);
        rnorm = rnorm_try;
        sol.residual_history.push_back(rnorm);
        sol.newton_iterations = it + 1;
        (void)accepted;

        if (dinf < cfg.tol) {
            sol.converged = true;
            break;
        }
    }

    sol.stack = sys.unpack(u);
    sol.residual_norm = stack_residual(sol.stack, model);
    return sol;
}

// ---------------------------------------------------------------------------
// Parameter continuation in eps at fixed grid policy.

struct GridPolicy {
    double h = 0.1;
    double L_min = 30.0;
    double L_over_eps = 28.0;  // keeps eps Q(eps L) below ~3e-13 at the boundary
};

inline Grid auto_grid(double eps, const GridPolicy& policy = {}) {
    const double L = std::max(policy.L_min, policy.L_over_eps / eps);
    int N = 2 * static_cast<int>(std::ceil(L / policy.h)) + 1;
    if (N < 17) N = 17;
    return make_grid(L, N);
}

/// Stack rescaled from amplitude eps_old to eps_new on a new grid:
/// every profile follows the dominant scaling  c(x) -> r c(r x), r = eps_new/eps_old.
inline ModeStack rescale_stack(const ModeStack& old_stack, double eps_old, double eps_new,
                               const Grid& new_grid) {
    const double r = eps_new / eps_old;
    ModeStack st = make_stack(new_grid, std::sqrt(1.0 - eps_new * eps_new), old_stack.n_max);
    for (int n = 0; n <= old_stack.n_max; ++n)
        for (int i = 0; i < new_grid.N; ++i) {
            st.a[n][i] = r * interp_linear(old_stack.grid, old_stack.a[n], r * new_grid.x[i]);
            st.b[n][i] = r * interp_linear(old_stack.grid, old_stack.b[n], r * new_grid.x[i]);
        }
    return st;
}

struct FamilyEntry {
    double eps = 0.0;
    BreatherSolution sol;
    double alpha = 0.0;    // measured sup-in-time squared H1 norm
    double T = 0.0;
    int n_star = 0;
    bool has_split = false;
    DominantSplit split;
    std::string error;        // nonempty when the solve raised instead of reporting
    std::string split_error;  // diagnostics-only failure (e.g. ambiguous dominance)
};

/// One solve per eps, each seeded by the rescaled previous solution.
/// Per-entry errors and non-convergence are recorded, never fatal.
inline std::vector<FamilyEntry> continue_family(const ModelSpec& model,
                                                const std::vector<double>& eps_list,
                                                const NewtonConfig& cfg, int n_max,
                                                const GridPolicy& policy = {}) {
    for (size_t k = 1; k < eps_list.size(); ++k)
        if (!(eps_list[k] < eps_list[k - 1]))
            throw std::invalid_argument("continue_family: eps_list must be strictly decreasing");
    std::vector<FamilyEntry> out;
    out.reserve(eps_list.size());
    int prev_idx = -1;
    for (double eps : eps_list) {
        FamilyEntry e;
        e.eps = eps;
        try {
            const Grid g = auto_grid(eps, policy);
            const BreatherParams bp = BreatherParams::from_eps(eps);
            ModeStack s0 = (prev_idx >= 0)
                               ? rescale_stack(out[prev_idx].sol.stack, out[prev_idx].eps, eps, g)
                               : seed(bp, g, n_max);
            e.sol = newton_solve(s0, model, cfg);
            e.T = 2.0 * std::numbers::pi / e.sol.omega;
            e.alpha = measure_alpha(e.sol.stack);
            try {
                e.split = dominant_split(e.sol.stack, e.alpha);
                e.n_star = e.split.n_star;
                e.has_split = true;
            } catch (const std::exception& ex) {
                e.split_error = ex.what();
            }
        } catch (const std::exception& ex) {
            e.error = ex.what();
        }
        out.push_back(std::move(e));
        if (out.back().sol.converged && out.back().error.empty()) prev_idx = static_cast<int>(out.size()) - 1;
    }
    return out;
}

/// Max relative error between the analytic Jacobian action and central
/// finite differences of the residual on random directions.
inline double jacobian_fd_check(const ModeStack& base, const ModelSpec& model,
                                const NewtonConfig& cfg, std::uint64_t rng_seed,
                                int n_directions, double eta = 1e-6) {
    detail::GalerkinSystem sys(model, base, cfg);
    std::vector<double> u;
    sys.pack(base, u);
    const BandedMatrix J = sys.jacobian(u);

    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < n_directions; ++k) {
        std::vector<double> d(sys.dim());
        for (double& v : d) v = dist(rng);
        const double dn = sys.norm2(d);
        for (double& v : d) v /= dn;

        std::vector<double> up(u), um(u);
        for (size_t i = 0; i < u.size(); ++i) {
            up[i] += eta * d[i];
            um[i] -= eta * d[i];
        }
        const std::vector<double> Rp = sys.residual(up);
        const std::vector<double> Rm = sys.residual(um);
        const std::vector<double> jd = J.apply(d);

        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < u.size(); ++i) {
            const double fd = (Rp[i] - Rm[i]) / (2.0 * eta);
            num += (jd[i] - fd) * (jd[i] - fd);
            den += jd[i] * jd[i];
        }
        worst = std::max(worst, std::sqrt(num / std::max(den, 1e-300)));
    }
    return worst;
}

}  // namespace breatherlab
