// Linearization about a Delaunay orbit: spherical-harmonic mode operators,
// geometric Jacobi fields, monodromy/Floquet analysis, and indicial roots.
//
// The mode-j linearized equation is
//   w'''' - b_j w'' + V_j(t) w = 0,
//   b_j = (n(n-4)+8+4*lambda_j)/2,
//   V_j(t) = c0 + (n(n-4)/2) lambda_j + lambda_j^2 - c_lin v(t)^{8/(n-4)},
// with lambda_j the j-th eigenvalue of -Laplacian on S^{n-1}.  Floquet
// multipliers of the periodic system encode the indicial (growth/decay) rates
// of Jacobi fields on a Delaunay end.

#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qclab/cylinder_ode.hpp"

namespace qclab {

struct ModeOperator {
    const DelaunaySolution* sol = nullptr;
    int j = 0;
    double lambda_j = 0;
    double b_j = 0;
    double v_shift = 0; // c0 + (n(n-4)/2) lambda_j + lambda_j^2

    // Periodic, even potential V_j(t).
    double potential(double t) const {
        const auto& d = sol->params;
        return v_shift - d.c_lin * pow_exponent(sol->v(t), d.p_exp - 1.0);
    }
};

inline ModeOperator mode_operator(const DelaunaySolution& sol, int j) {
    if (j < 0) throw std::invalid_argument("mode_operator: j must be >= 0");
    ModeOperator op;
    op.sol = &sol;
    op.j = j;
    const auto& d = sol.params;
    op.lambda_j = sphere_eigenvalue(d.n, j).lambda;
    op.b_j = (d.n * (d.n - 4.0) + 8.0 + 4.0 * op.lambda_j) / 2.0;
    op.v_shift = d.c0 + (d.n * (d.n - 4.0) / 2.0) * op.lambda_j + op.lambda_j * op.lambda_j;
    return op;
}

enum class JacobiKind { translation, necksize, generic };

struct JacobiField {
    JacobiKind kind = JacobiKind::generic;
    std::vector<CylState> samples; // (t, w, w', w'', w''')
    double fd_slope = 0;           // linear-growth coefficient (necksize field)
    double fd_s = 0;               // s = d v''(0) / d eps used in the IC
};

namespace detail {

template <class Real>
struct ModeRhs {
    const DelaunaySolution* sol;
    double b_j;
    double v_shift;
    State<Real, 4> operator()(Real t, const State<Real, 4>& w) const {
        const auto& d = sol->params;
        const Real V =
            Real(v_shift) - Real(d.c_lin) * pow_exponent(Real(sol->v(to_double(t))), d.p_exp - 1.0);
        return {w[1], w[2], w[3], Real(b_j) * w[2] - V * w[0]};
    }
};

} // namespace detail

// Translation Jacobi field w0+ = dv/dt, read off the solution interpolant.
inline JacobiField w0_plus(const DelaunaySolution& sol, std::size_t n_samples = 512) {
    if (sol.is_constant())
        throw std::invalid_argument("w0_plus: degenerate at eps = eps_bar; use w0_cylinder");
    JacobiField f;
    f.kind = JacobiKind::translation;
    const auto& d = sol.params;
    f.samples.reserve(n_samples + 1);
    for (std::size_t i = 0; i <= n_samples; ++i) {
        const double t = sol.period * static_cast<double>(i) / static_cast<double>(n_samples);
        const CylState s = sol.at(t);
        const auto r = ode_rhs(s, d);
        f.samples.push_back({t, {s.y[1], s.y[2], s.y[3], r[3]}});
    }
    return f;
}

// d v''(0) / d eps by centered differencing of the shooting value with one
// Richardson level (h and h/2).
inline double vpp0_eps_derivative(double eps, double h, const ToleranceConfig& tol,
                                  const DimensionParams& d) {
    if (!(eps - h > 0) || !(eps + h < d.eps_bar))
        throw std::invalid_argument("vpp0_eps_derivative: eps +/- h outside (0, eps_bar)");
    auto slope = [&](double hh) {
        const double ap = shoot_delaunay(eps + hh, tol, d).vpp0;
        const double am = shoot_delaunay(eps - hh, tol, d).vpp0;
        return (ap - am) / (2.0 * hh);
    };
    const double sh = slope(h), sh2 = slope(h / 2);
    return (4.0 * sh2 - sh) / 3.0;
}

// Necksize Jacobi field w0- = dv/d eps, integrated from (1, 0, s, 0); grows
// linearly in t.  Sampled over [0, 2 T].
inline JacobiField w0_minus(const DelaunaySolution& sol, double h = 0,
                            std::size_t n_samples = 512,
                            const ToleranceConfig& tol = ToleranceConfig{}) {
    if (sol.is_constant())
        throw std::invalid_argument("w0_minus: degenerate at eps = eps_bar; use w0_cylinder");
    const auto& d = sol.params;
    if (h <= 0) h = 1e-4 * d.eps_bar;
    JacobiField f;
    f.kind = JacobiKind::necksize;
    f.fd_s = vpp0_eps_derivative(sol.eps, h, tol, d);

    // Sampled over one period: beyond ~T the finite-difference seed error in s
    // is amplified along the orbit's unstable Floquet direction.
    const auto op = mode_operator(sol, 0);
    detail::ModeRhs<double> rhs{&sol, op.b_j, op.v_shift};
    const double t_span = sol.period;
    State<double, 4> w{1.0, 0.0, f.fd_s, 0.0};
    f.samples.reserve(n_samples + 1);
    f.samples.push_back({0.0, w});
    for (std::size_t i = 1; i <= n_samples; ++i) {
        const double t0 = t_span * static_cast<double>(i - 1) / static_cast<double>(n_samples);
        const double t1 = t_span * static_cast<double>(i) / static_cast<double>(n_samples);
        integrate_to<double, 4>(rhs, w, t0, t1, tol.ode_rel, tol.ode_abs);
        f.samples.push_back({t1, w});
    }
    // Linear growth enters through the Jordan relation
    //   w0-(t + T) = w0-(t) + c w0+(t);
    // at t = 0 the translation field is (0, v''(0), 0, ...), so the coupling
    // c is read off the first-derivative component after one period.
    f.fd_slope = f.samples.back().y[1] / sol.vpp0;
    return f;
}

// Cylindrical Jacobi fields sin(sqrt(mu) t) / cos(sqrt(mu) t) at eps = eps_bar.
inline JacobiField w0_cylinder(const DimensionParams& d, int sign, std::size_t n_samples = 512) {
    if (sign != +1 && sign != -1)
        throw std::invalid_argument("w0_cylinder: sign must be +1 or -1");
    JacobiField f;
    f.kind = sign > 0 ? JacobiKind::translation : JacobiKind::necksize;
    const double om = std::sqrt(d.mu);
    const double T = 2.0 * M_PI / om;
    for (std::size_t i = 0; i <= n_samples; ++i) {
        const double t = T * static_cast<double>(i) / static_cast<double>(n_samples);
        const double s = std::sin(om * t), c = std::cos(om * t);
        if (sign > 0)
            f.samples.push_back({t, {s, om * c, -om * om * s, -om * om * om * c}});
        else
            f.samples.push_back({t, {c, -om * s, -om * om * c, om * om * om * s}});
    }
    return f;
}

// Fundamental solution matrix of the mode-j system over one period, columns
// integrated simultaneously from the identity.
inline Eigen::Matrix4d monodromy(const DelaunaySolution& sol, int j, const ToleranceConfig& tol) {
    tol.validate();
    const auto op = mode_operator(sol, j);
    const auto& period = sol.period;
    struct Rhs16 {
        const DelaunaySolution* sol;
        double b_j, v_shift;
        State<double, 16> operator()(double t, const State<double, 16>& y) const {
            const auto& d = sol->params;
            const double V =
                v_shift - d.c_lin * pow_exponent(sol->v(t), d.p_exp - 1.0);
            State<double, 16> dy;
            for (int c = 0; c < 4; ++c) {
                const double* w = &y[4 * c];
                double* dw = &dy[4 * c];
                dw[0] = w[1];
                dw[1] = w[2];
                dw[2] = w[3];
                dw[3] = b_j * w[2] - V * w[0];
            }
            return dy;
        }
    } rhs{&sol, op.b_j, op.v_shift};
    State<double, 16> y{};
    for (int c = 0; c < 4; ++c) y[4 * c + c] = 1.0;
    integrate_to<double, 16>(rhs, y, 0.0, period, tol.ode_rel, tol.ode_abs);
    Eigen::Matrix4d M;
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r) M(r, c) = y[4 * c + r];
    return M;
}

// Closed-form indicial exponents at eps = eps_bar: the four roots gamma of
//   gamma^4 - b_j gamma^2 + (v_shift - c_lin n(n-4)/(n^2-4)) = 0.
inline std::array<std::complex<double>, 4> cylinder_indicial_closed_form(const DimensionParams& d,
                                                                         int j) {
    if (j < 0) throw std::invalid_argument("cylinder_indicial_closed_form: j must be >= 0");
    const auto lam = sphere_eigenvalue(d.n, j).lambda;
    const double b_j = (d.n * (d.n - 4.0) + 8.0 + 4.0 * lam) / 2.0;
    const double C = d.c0 + (d.n * (d.n - 4.0) / 2.0) * lam + lam * lam -
                     d.c_lin * d.n * (d.n - 4.0) / (d.n * d.n - 4.0);
    const std::complex<double> disc = std::sqrt(std::complex<double>(b_j * b_j - 4.0 * C, 0.0));
    const std::complex<double> g2a = (b_j + disc) / 2.0, g2b = (b_j - disc) / 2.0;
    const std::complex<double> ga = std::sqrt(g2a), gb = std::sqrt(g2b);
    return {ga, -ga, gb, -gb};
}

struct IndicialRoot {
    double gamma = 0;
    int j = 0;
    int multiplicity = 0;
};

struct IndicialSet {
    double eps = 0;
    std::vector<IndicialRoot> roots; // positive gammas, sorted ascending
    double gamma_1 = 0;              // min positive root over all modes
    double gamma_1_j0 = 0;           // min positive root of mode 0
    double gamma_1_excl_j0 = 0;      // min positive root over modes j >= 1
    bool near_defective_warning = false;
};

namespace detail {

// Magnitudes of the two Floquet multipliers on or outside the unit circle.
// The reversible quartic symbol forces reciprocal pairs {rho, 1/rho}; the
// in-circle partners underflow numerically for large modes and must not be
// read off the eigensolver directly.
inline std::array<double, 2> dominant_multiplier_magnitudes(const Eigen::Matrix4d& M) {
    Eigen::EigenSolver<Eigen::Matrix4d> es(M);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("monodromy eigenvalue computation failed");
    std::array<double, 4> mags;
    for (int k = 0; k < 4; ++k) mags[k] = std::abs(es.eigenvalues()[k]);
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    return {mags[0], mags[1]};
}

} // namespace detail

// Indicial roots via Floquet multipliers: gamma = log|rho| / T for the
// multipliers with |rho| >= 1 (the reciprocal-pair structure supplies the
// mirror -gamma).  Multipliers on the unit circle carry exponent 0 and are
// excluded from the positive roots; for j = 0 these are the Jordan pair of
// the geometric Jacobi fields.
inline IndicialSet indicial_roots(const DelaunaySolution& sol, int j_max, double gamma_max,
                                  const ToleranceConfig& tol) {
    if (j_max < 1) throw std::invalid_argument("indicial_roots: j_max must be >= 1");
    IndicialSet out;
    out.eps = sol.eps;
    const double T = sol.period;
    const double unit_tol = 1e-3; // | |rho| - 1 | below this counts as exponent 0
    for (int j = 0; j <= j_max; ++j) {
        std::vector<double> gammas;
        if (sol.is_constant()) {
            for (const auto& g : cylinder_indicial_closed_form(sol.params, j))
                if (g.real() > 1e-9) gammas.push_back(g.real());
        } else {
            const Eigen::Matrix4d M = monodromy(sol, j, tol);
            for (double mag : detail::dominant_multiplier_magnitudes(M)) {
                if (std::fabs(mag - 1.0) < unit_tol) {
                    if (j > 0) out.near_defective_warning = true;
                    continue; // zero exponent (Jordan pair for j = 0)
                }
                if (mag > 1.0) gammas.push_back(std::log(mag) / T);
            }
        }
        std::sort(gammas.begin(), gammas.end());
        for (std::size_t i = 0; i < gammas.size();) {
            std::size_t m = 1;
            while (i + m < gammas.size() && gammas[i + m] - gammas[i] < 1e-7) ++m;
            double g = 0;
            for (std::size_t q = 0; q < m; ++q) g += gammas[i + q];
            g /= static_cast<double>(m);
            if (g <= gamma_max)
                out.roots.push_back({g, j, static_cast<int>(m)});
            i += m;
        }
    }
    std::sort(out.roots.begin(), out.roots.end(),
              [](const IndicialRoot& a, const IndicialRoot& b) { return a.gamma < b.gamma; });
    out.gamma_1 = 0;
    out.gamma_1_j0 = 0;
    out.gamma_1_excl_j0 = 0;
    for (const auto& r : out.roots) {
        if (out.gamma_1 == 0) out.gamma_1 = r.gamma;
        if (out.gamma_1_j0 == 0 && r.j == 0) out.gamma_1_j0 = r.gamma;
        if (out.gamma_1_excl_j0 == 0 && r.j >= 1) out.gamma_1_excl_j0 = r.gamma;
    }
    return out;
}

struct NondegeneracyResult {
    bool nondegenerate = false;
    double margin = 0; // min |log|rho|| / T over the mode's multipliers
};

// No Floquet multiplier of mode j >= 1 lies on the unit circle: the mode
// carries no bounded Jacobi field.
inline NondegeneracyResult verify_mode_nondegeneracy(const DelaunaySolution& sol, int j,
                                                     const ToleranceConfig& tol) {
    if (j < 1)
        throw std::invalid_argument("verify_mode_nondegeneracy: j must be >= 1 (mode 0 is "
                                    "degenerate by the geometric Jacobi fields)");
    NondegeneracyResult res;
    const double T = sol.period;
    double min_dist = std::numeric_limits<double>::infinity();
    double margin = std::numeric_limits<double>::infinity();
    if (sol.is_constant()) {
        for (const auto& g : cylinder_indicial_closed_form(sol.params, j)) {
            margin = std::min(margin, std::fabs(g.real()));
            min_dist = std::min(min_dist, std::fabs(std::exp(g.real() * T) - 1.0));
        }
    } else {
        const Eigen::Matrix4d M = monodromy(sol, j, tol);
        // By reciprocal-pair symmetry the two dominant multipliers carry the
        // full unit-circle information.
        for (double mag : detail::dominant_multiplier_magnitudes(M)) {
            margin = std::min(margin, std::fabs(std::log(mag)) / T);
            min_dist = std::min(min_dist, std::fabs(mag - 1.0));
        }
    }
    res.margin = margin;
    res.nondegenerate = min_dist > 1e-6;
    return res;
}

#ifdef QCLAB_HAVE_FLOAT128

struct MonodromyInvariants {
    double trace = 0;          // A = sum of multipliers
    double det = 1;            // should be exactly 1 (trace-free system)
    double x_hyperbolic = 0;   // x = rho + 1/rho for the real pair, = 2 cosh(gamma T)
    double x_unit = 0;         // x for the unit pair; Jordan structure iff x -> 2
    double gamma = 0;          // log of the large multiplier / T
    double unit_defect = 0;    // |rho - 1| for the unit-pair multipliers
    double period = 0;         // quad-polished period (rounded to double)
};

namespace detail {

// Quad-precision shot: fixed-step CV8 to the neighbourhood of the first
// maximum (known from the double solution), then Newton in t on v'.  Returns
// the symmetry residual v''' at the maximum and the maximum's time.
struct QuadShot {
    quad t_max = 0;
    quad residual = 0;
};

inline QuadShot quad_shot(quad eps, quad a, const DelaunaySolution& sol, quad h) {
    const auto& d = sol.params;
    OrbitRhs<quad> rhs{&d};
    State<quad, 4> y{eps, quad(0), a, quad(0)};
    const quad t_half = quad(sol.period) / 2;
    quad t = 0;
    const long n = std::max(16L, static_cast<long>(to_double(t_half / h)) + 1);
    cv8_integrate<quad, 4>(rhs, y, t, t_half, n);
    t = t_half;
    // Newton on v'(t) = 0 with derivative v''; each correction is integrated
    // from the current state (forward or backward).
    for (int it = 0; it < 24; ++it) {
        if (y[2] == quad(0)) break;
        quad dt = -y[1] / y[2];
        const quad cap = quad(sol.period) / 8;
        if (fabs(dt) > cap) dt = (dt > quad(0)) ? cap : -cap;
        const long m = std::max(4L, static_cast<long>(to_double(fabs(dt) / h)) + 1);
        cv8_integrate<quad, 4>(rhs, y, t, t + dt, m);
        t += dt;
        if (fabs(dt) < fabs(t) * quad(1e-31)) break;
    }
    return QuadShot{t, y[3]};
}

// Quad-precision re-polish of the shooting unknown by secant iteration on the
// symmetry residual v''' at the first maximum.
inline quad polish_vpp0_quad(const DelaunaySolution& sol, quad h, quad* t_max_out = nullptr) {
    const quad eps = quad(sol.eps);
    // The double-precision root is already accurate to ~1e-16 relative; the
    // secant only refines the remaining quad digits, so steps beyond 1e-9
    // relative indicate a bad objective value and are clamped.
    quad a0 = quad(sol.vpp0);
    quad a1 = a0 * (quad(1) + quad(1e-14));
    QuadShot s0 = quad_shot(eps, a0, sol, h);
    QuadShot s1 = quad_shot(eps, a1, sol, h);
    for (int it = 0; it < 16 && s1.residual != s0.residual; ++it) {
        quad step = -s1.residual * (a1 - a0) / (s1.residual - s0.residual);
        const quad cap = fabs(a1) * quad(1e-9);
        if (fabs(step) > cap) step = (step > quad(0)) ? cap : -cap;
        const quad a2 = a1 + step;
        a0 = a1;
        s0 = s1;
        a1 = a2;
        s1 = quad_shot(eps, a1, sol, h);
        if (fabs(a1 - a0) < fabs(a1) * quad(1e-30)) break;
    }
    if (t_max_out) *t_max_out = s1.t_max;
    return a1;
}

} // namespace detail

// High-precision monodromy invariants for mode j.  The orbit and the 16
// variational components are integrated simultaneously in __float128 at the
// quad-polished shooting value, so the defective unit pair of mode 0 and
// det = 1 are resolved far below double roundoff.  Multipliers are extracted
// through the palindromic characteristic polynomial
//   lambda^4 - A lambda^3 + B lambda^2 - A lambda + 1,   x = lambda + 1/lambda,
// which is exact for the trace-free reversible system.
inline MonodromyInvariants monodromy_refined(const DelaunaySolution& sol, int j,
                                             double tol_quad = 1e-24) {
    const auto& d = sol.params;
    const auto op = mode_operator(sol, j);
    // Fixed-step CV8: local error ~ C h^8 per unit time, so h = tol^{1/8}
    // meets the target; the Butcher table is exact in quad, so there is no
    // coefficient-precision floor.
    quad h = quad(std::pow(std::max(tol_quad, 1e-30), 1.0 / 8.0));
    if (h > quad(0.005)) h = quad(0.005);
    if (h < quad(2e-4)) h = quad(2e-4);

    quad t_max = 0;
    const quad a = detail::polish_vpp0_quad(sol, h, &t_max);
    if (!(t_max > quad(0)))
        throw std::runtime_error("monodromy_refined: quad re-shoot lost the event");
    const quad T = 2 * t_max;

    struct Rhs20 {
        const DimensionParams* d;
        double b_j, v_shift;
        State<quad, 20> operator()(quad, const State<quad, 20>& y) const {
            State<quad, 20> dy;
            const State<quad, 4> orbit{y[0], y[1], y[2], y[3]};
            const auto dorb = ode_rhs_t<quad>(orbit, *d);
            for (int i = 0; i < 4; ++i) dy[i] = dorb[i];
            const quad V =
                quad(v_shift) - quad(d->c_lin) * pow_exponent(y[0], d->p_exp - 1.0);
            for (int c = 0; c < 4; ++c) {
                const quad* w = &y[4 + 4 * c];
                quad* dw = &dy[4 + 4 * c];
                dw[0] = w[1];
                dw[1] = w[2];
                dw[2] = w[3];
                dw[3] = quad(b_j) * w[2] - V * w[0];
            }
            return dy;
        }
    } rhs{&d, op.b_j, op.v_shift};

    // Integrate the period in segments, restarting the variational block from
    // the identity each time.  The full monodromy is the ordered product of
    // the segment matrices; the determinant is the product of the per-segment
    // determinants.  Each segment matrix has modest norm e^{gamma T/k}, so the
    // per-segment determinants avoid the ||M||-conditioned cancellation of a
    // direct determinant of the full matrix.
    auto det4 = [](quad m[4][4]) {
        quad lu[4][4];
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) lu[i][k] = m[i][k];
        quad dv = 1;
        for (int col = 0; col < 4; ++col) {
            int piv = col;
            for (int r = col + 1; r < 4; ++r)
                if (fabs(lu[r][col]) > fabs(lu[piv][col])) piv = r;
            if (piv != col) {
                for (int k = 0; k < 4; ++k) std::swap(lu[piv][k], lu[col][k]);
                dv = -dv;
            }
            dv *= lu[col][col];
            if (lu[col][col] == quad(0)) return quad(0);
            for (int r = col + 1; r < 4; ++r) {
                const quad f = lu[r][col] / lu[col][col];
                for (int k = col; k < 4; ++k) lu[r][k] -= f * lu[col][k];
            }
        }
        return dv;
    };

    const int n_seg = 8;
    State<quad, 20> y{};
    y[0] = quad(sol.eps);
    y[2] = a;
    quad M[4][4] = {}, seg[4][4], tmp[4][4];
    for (int i = 0; i < 4; ++i) M[i][i] = quad(1);
    quad det = 1;
    const long steps_per_seg =
        std::max(16L, static_cast<long>(to_double(T / (n_seg * h))) + 1);
    for (int s = 0; s < n_seg; ++s) {
        for (int c = 0; c < 4; ++c)
            for (int r = 0; r < 4; ++r) y[4 + 4 * c + r] = (r == c) ? quad(1) : quad(0);
        cv8_integrate<quad, 20>(rhs, y, T * s / n_seg, T * (s + 1) / n_seg, steps_per_seg);
        for (int c = 0; c < 4; ++c)
            for (int r = 0; r < 4; ++r) seg[r][c] = y[4 + 4 * c + r];
        det *= det4(seg);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                quad acc = 0;
                for (int k = 0; k < 4; ++k) acc += seg[r][k] * M[k][c];
                tmp[r][c] = acc;
            }
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) M[r][c] = tmp[r][c];
    }

    // Invariants: trace and sum of principal 2x2 minors of the full matrix.
    quad A = 0;
    for (int i = 0; i < 4; ++i) A += M[i][i];
    quad B = 0;
    for (int i = 0; i < 4; ++i)
        for (int k = i + 1; k < 4; ++k) B += M[i][i] * M[k][k] - M[i][k] * M[k][i];

    // x^2 - A x + (B - 2) = 0 gives x = rho + 1/rho for the two pairs.
    const quad disc = sqrt(A * A - 4 * (B - 2));
    quad x1 = (A + disc) / 2, x2 = (A - disc) / 2;
    if (fabs(x2 - 2) > fabs(x1 - 2)) std::swap(x1, x2); // x2 = unit pair

    MonodromyInvariants inv;
    inv.trace = to_double(A);
    inv.det = to_double(det);
    inv.x_hyperbolic = to_double(x1);
    inv.x_unit = to_double(x2);
    inv.period = to_double(T);
    // Large multiplier of the hyperbolic pair: rho = (x1 + sqrt(x1^2-4))/2.
    const quad rho = (x1 + sqrt(x1 * x1 - 4)) / 2;
    inv.gamma = to_double(log(rho) / T);
    // Distance of the unit-pair multipliers from 1: roots of l^2 - x2 l + 1.
    const quad e = x2 - 2;
    if (e >= quad(0)) {
        const quad r1 = (x2 + sqrt(e * (x2 + 2))) / 2; // real pair around 1
        inv.unit_defect = to_double(fabs(r1 - 1));
    } else {
        inv.unit_defect = to_double(sqrt(-e)); // conjugate pair on the circle
    }
    return inv;
}

#endif // QCLAB_HAVE_FLOAT128

} // namespace qclab
