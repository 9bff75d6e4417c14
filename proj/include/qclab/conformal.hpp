// Gauge transforms between the Euclidean radial profile u(r) and the
// cylindrical profile v(t) with t = -log r, u = r^{(4-n)/2} v; Q-curvature
// verification of computed profiles by radial finite differences; recovery of
// the asymptotic parameters (eps, T) from a profile; weighted-norm decay
// classification.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qclab/cylinder_ode.hpp"
#include "qclab/dimension.hpp"

namespace qclab {

struct RadialProfile {
    std::vector<double> r_grid; // strictly decreasing toward 0
    std::vector<double> u;      // positive values u(r)
    std::string origin = "0";   // puncture location label
};

struct AsymptoteData {
    double eps = 0;
    double T = 0;          // translation parameter, reduced mod the period
    double residual = 0;   // sup-distance over the last sampled period
    double hamiltonian = 0;
};

// v(t) = r^{(n-4)/2} u(r) with t = -log r.
inline double emden_fowler_forward(double u_at_point, double r, const DimensionParams& d) {
    if (!(r > 0)) throw std::domain_error("emden_fowler_forward: r must be positive");
    if (!(u_at_point > 0)) throw std::domain_error("emden_fowler_forward: u must be positive");
    return std::pow(r, (d.n - 4.0) / 2.0) * u_at_point;
}

inline double emden_fowler_inverse(double v_value, double r, const DimensionParams& d) {
    if (!(r > 0)) throw std::domain_error("emden_fowler_inverse: r must be positive");
    if (!(v_value > 0)) throw std::domain_error("emden_fowler_inverse: v must be positive");
    return std::pow(r, (4.0 - d.n) / 2.0) * v_value;
}

// u_eps(r) = r^{(4-n)/2} v_eps(-log r) through the periodic interpolant.
inline RadialProfile delaunay_euclidean_profile(const DelaunaySolution& sol,
                                                const std::vector<double>& r_grid) {
    RadialProfile prof;
    prof.r_grid = r_grid;
    prof.u.reserve(r_grid.size());
    const double kappa = (sol.params.n - 4.0) / 2.0;
    for (double r : r_grid) {
        if (!(r > 0)) throw std::domain_error("delaunay_euclidean_profile: r must be positive");
        const double t = -std::log(r);
        prof.u.push_back(std::exp(kappa * t) * sol.v(t));
    }
    return prof;
}

namespace detail {

// Fornberg's algorithm: weights of the m-th derivative at z on the nodes x.
inline std::vector<double> fd_weights(double z, const std::vector<double>& x, int m) {
    const int n = static_cast<int>(x.size());
    if (n < m + 1) throw std::invalid_argument("fd_weights: too few nodes");
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = x[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0, c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = c[i][m];
    return w;
}

// Centered stencil of half-width hw for derivative order m on a uniform grid
// of spacing h (offsets -hw..hw).
inline std::vector<double> centered_weights(int hw, int m, double h) {
    std::vector<double> x;
    for (int i = -hw; i <= hw; ++i) x.push_back(i * h);
    return fd_weights(0.0, x, m);
}

struct CylindricalSamples {
    std::vector<double> t; // uniform, increasing
    std::vector<double> v;
    double dt = 0;
};

// Transform a radial profile to cylindrical samples, requiring a log-uniform
// radial grid (uniform t-grid).
inline CylindricalSamples to_cylindrical(const RadialProfile& prof, const DimensionParams& d) {
    const std::size_t n = prof.r_grid.size();
    if (n < 9 || prof.u.size() != n)
        throw std::invalid_argument("profile needs >= 9 matching (r, u) samples");
    CylindricalSamples cs;
    cs.t.reserve(n);
    cs.v.reserve(n);
    const double kappa = (d.n - 4.0) / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = prof.r_grid[i];
        if (!(r > 0)) throw std::domain_error("profile radius must be positive");
        if (!(prof.u[i] > 0)) throw std::domain_error("profile values must be positive");
        cs.t.push_back(-std::log(r));
        cs.v.push_back(std::exp(kappa * std::log(r)) * prof.u[i]);
    }
    if (cs.t.front() > cs.t.back()) {
        std::reverse(cs.t.begin(), cs.t.end());
        std::reverse(cs.v.begin(), cs.v.end());
    }
    cs.dt = (cs.t.back() - cs.t.front()) / static_cast<double>(n - 1);
    if (!(cs.dt > 0)) throw std::invalid_argument("profile radii must be strictly monotone");
    for (std::size_t i = 1; i < n; ++i) {
        const double step = cs.t[i] - cs.t[i - 1];
        if (std::fabs(step - cs.dt) > 1e-8 * std::max(1.0, std::fabs(cs.dt)))
            throw std::invalid_argument("profile grid must be log-uniform");
    }
    return cs;
}

} // namespace detail

struct QCurvatureResult {
    std::vector<double> q;        // aligned with the profile grid; NaN at margins
    bool coarse_grid_warning = false; // < 9 points per oscillation detected
    std::size_t margin = 3;       // stencil half-width eaten at each end
};

// Q(r) = (2/(n-4)) u^{-(n+4)/(n-4)} (d^2/dr^2 + (n-1)/r d/dr)^2 u evaluated in
// the cylindrical variables, where with u = e^{kappa t} v, kappa = (n-4)/2,
// each radial Laplacian acts as v -> v'' + (2 kappa + 2 - n) v' +
// kappa (kappa + 2 - n) v with kappa advanced by 2 for the second
// application; the exponential prefactors cancel exactly against u^{-p}.
inline QCurvatureResult q_curvature_radial(const RadialProfile& prof, const DimensionParams& d) {
    const auto cs = detail::to_cylindrical(prof, d);
    const std::size_t n = cs.v.size();
    const double kappa = (d.n - 4.0) / 2.0;
    const double a1 = 2 * kappa + 2 - d.n, a0 = kappa * (kappa + 2 - d.n);
    const double b1 = 2 * kappa + 6 - d.n, b0 = (kappa + 2) * (kappa + 4 - d.n);
    // Composite 4th-order operator v'''' + (a1+b1) v''' + (a0 + a1 b1 + b0) v''
    //   + (a0 b1 + a1 b0) v' + a0 b0 v, discretized with centered 4th-order
    // stencils (half-width 3 for the 3rd/4th derivatives).
    const double c3 = a1 + b1, c2 = a0 + a1 * b1 + b0, c1 = a0 * b1 + a1 * b0, c0 = a0 * b0;
    const auto w1 = detail::centered_weights(3, 1, cs.dt);
    const auto w2 = detail::centered_weights(3, 2, cs.dt);
    const auto w3 = detail::centered_weights(3, 3, cs.dt);
    const auto w4 = detail::centered_weights(3, 4, cs.dt);

    QCurvatureResult res;
    res.q.assign(n, std::numeric_limits<double>::quiet_NaN());
    res.margin = 3;
    const double p = d.p_exp;
    for (std::size_t i = 3; i + 3 < n; ++i) {
        double d1 = 0, d2 = 0, d3 = 0, d4 = 0;
        for (int k = -3; k <= 3; ++k) {
            const double vv = cs.v[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + k)];
            d1 += w1[static_cast<std::size_t>(k + 3)] * vv;
            d2 += w2[static_cast<std::size_t>(k + 3)] * vv;
            d3 += w3[static_cast<std::size_t>(k + 3)] * vv;
            d4 += w4[static_cast<std::size_t>(k + 3)] * vv;
        }
        const double bil = d4 + c3 * d3 + c2 * d2 + c1 * d1 + c0 * cs.v[i];
        const double qv = (2.0 / (d.n - 4.0)) * std::pow(cs.v[i], -p) * bil;
        // grid index in profile order (may have been reversed)
        const std::size_t idx =
            (-std::log(prof.r_grid.front()) <= -std::log(prof.r_grid.back())) ? i : n - 1 - i;
        res.q[idx] = qv;
    }
    // Oscillation sampling check: successive local minima of v closer than 9
    // grid points mean the 4th derivative is under-resolved.
    std::ptrdiff_t last_min = -1;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (cs.v[i] < cs.v[i - 1] && cs.v[i] <= cs.v[i + 1]) {
            if (last_min >= 0 && static_cast<std::ptrdiff_t>(i) - last_min < 9)
                res.coarse_grid_warning = true;
            last_min = static_cast<std::ptrdiff_t>(i);
        }
    }
    return res;
}

// Recover (eps, T) from a radial profile: eps from the conserved Hamiltonian
// of the cylindrical tail (6th-order finite-difference derivatives, inverted
// through necksize_of_hamiltonian), T from the phase of the last minimum,
// then refined by minimizing the sup-distance to the recomputed orbit over
// the last sampled period.
inline AsymptoteData fit_asymptote(const RadialProfile& prof, const DimensionParams& d,
                                   const ToleranceConfig& tol = ToleranceConfig{}) {
    const auto cs = detail::to_cylindrical(prof, d);
    const std::size_t n = cs.v.size();
    if (n < 32) throw std::invalid_argument("fit_asymptote: too few samples");

    // Hamiltonian over the late-t quarter of the samples (median of pointwise
    // evaluations; 6th-order 7-point stencils).
    const auto w1 = detail::centered_weights(3, 1, cs.dt);
    const auto w2 = detail::centered_weights(3, 2, cs.dt);
    const auto w3 = detail::centered_weights(3, 3, cs.dt);
    std::vector<double> hs;
    const std::size_t lo = std::max<std::size_t>(3, (3 * n) / 4);
    for (std::size_t i = lo; i + 3 < n; ++i) {
        double d1 = 0, d2 = 0, d3 = 0;
        for (int k = -3; k <= 3; ++k) {
            const double vv = cs.v[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + k)];
            d1 += w1[static_cast<std::size_t>(k + 3)] * vv;
            d2 += w2[static_cast<std::size_t>(k + 3)] * vv;
            d3 += w3[static_cast<std::size_t>(k + 3)] * vv;
        }
        hs.push_back(hamiltonian_t<double>({cs.v[i], d1, d2, d3}, d));
    }
    if (hs.empty()) throw std::invalid_argument("fit_asymptote: tail window empty");
    std::nth_element(hs.begin(), hs.begin() + static_cast<std::ptrdiff_t>(hs.size() / 2), hs.end());
    const double H = hs[hs.size() / 2];

    // Energy of the constant orbit: the lower endpoint of the admissible range.
    const double H_min = hamiltonian_t<double>({d.eps_bar, 0, 0, 0}, d);
    if (!(H >= H_min * (1 + 1e-9) - 1e-12) || !(H < 0))
        throw std::domain_error("fit_asymptote: Hamiltonian outside [H_const, 0)");

    AsymptoteData out;
    out.hamiltonian = H;
    // Constant-orbit tail: eps = eps_bar, phase undefined.
    if (H <= H_min * (1 - 1e-9)) {
        out.eps = d.eps_bar;
        out.T = 0;
        double sup = 0;
        for (std::size_t i = lo; i < n; ++i) sup = std::max(sup, std::fabs(cs.v[i] - d.eps_bar));
        out.residual = sup;
        return out;
    }
    out.eps = necksize_of_hamiltonian(H, d, tol);
    const DelaunaySolution fit = shoot_delaunay(out.eps, tol, d);
    if (fit.is_constant()) {
        out.T = 0;
        out.residual = 0;
        return out;
    }
    const double Tper = fit.period;
    if (cs.t.back() - cs.t.front() < 2 * Tper - cs.dt)
        throw std::invalid_argument("fit_asymptote: profile covers fewer than two periods");

    // Last-period window.
    std::size_t i0 = n - 1;
    while (i0 > 0 && cs.t.back() - cs.t[i0 - 1] <= Tper) --i0;
    // Discrete minimum of v in the window -> initial phase.
    std::size_t imin = i0;
    for (std::size_t i = i0; i < n; ++i)
        if (cs.v[i] < cs.v[imin]) imin = i;
    // v(t) ~ v_fit(t + T): minima of v sit at t = -T mod period.
    double T_est = -cs.t[imin];

    auto sup_dist = [&](double T) {
        double s = 0;
        for (std::size_t i = i0; i < n; ++i)
            s = std::max(s, std::fabs(cs.v[i] - fit.v(cs.t[i] + T)));
        return s;
    };
    // Golden-section refinement around the discrete estimate.
    double a = T_est - 1.5 * cs.dt, b = T_est + 1.5 * cs.dt;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = sup_dist(x1), f2 = sup_dist(x2);
    for (int it = 0; it < 80 && (b - a) > 1e-12; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = sup_dist(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = sup_dist(x2);
        }
    }
    const double T_opt = (f1 < f2) ? x1 : x2;
    out.T = std::fmod(std::fmod(T_opt, Tper) + Tper, Tper);
    out.residual = std::min(f1, f2);
    return out;
}

struct WeightedNormResult {
    double value = 0;       // |S^{n-1}| * integral of e^{-2 delta t} v^2 over [T0, T1]
    double growth_rate = 0; // slope of log windowed norms per unit t
    bool member = false;    // windowed norms decay
    bool borderline = false; // log-growth indistinguishable from linear (critical rate)
};

// Truncated L^2_delta norm of a radial v on a uniform grid over [T0, T1] and
// a windowed-decay classification of membership in L^2_delta on [T0, inf).
inline WeightedNormResult weighted_norm(const std::vector<double>& t,
                                        const std::vector<double>& v, double delta,
                                        const DimensionParams& d) {
    const std::size_t n = t.size();
    if (n < 16 || v.size() != n)
        throw std::invalid_argument("weighted_norm: need >= 16 matching samples");
    const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
    if (!(dt > 0)) throw std::invalid_argument("weighted_norm: grid must increase");
    // |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)
    const double sphere_area =
        2.0 * std::pow(M_PI, d.n / 2.0) / std::tgamma(d.n / 2.0);

    auto integrand = [&](std::size_t i) {
        return std::exp(-2.0 * delta * t[i]) * v[i] * v[i];
    };
    double total = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) total += 0.5 * (integrand(i) + integrand(i + 1)) * dt;

    WeightedNormResult res;
    res.value = sphere_area * total;

    // Eight equal windows; least-squares slope of log(window integral).
    const int W = 8;
    std::vector<double> xs, ys;
    for (int w = 0; w < W; ++w) {
        const std::size_t a = static_cast<std::size_t>(w) * (n - 1) / W;
        const std::size_t b = static_cast<std::size_t>(w + 1) * (n - 1) / W;
        double s = 0;
        for (std::size_t i = a; i < b; ++i) s += 0.5 * (integrand(i) + integrand(i + 1)) * dt;
        if (s <= 0) s = std::numeric_limits<double>::min();
        xs.push_back(0.5 * (t[a] + t[b]));
        ys.push_back(std::log(s));
    }
    double mx = 0, my = 0;
    for (int w = 0; w < W; ++w) {
        mx += xs[static_cast<std::size_t>(w)];
        my += ys[static_cast<std::size_t>(w)];
    }
    mx /= W;
    my /= W;
    double num = 0, den = 0;
    for (int w = 0; w < W; ++w) {
        num += (xs[static_cast<std::size_t>(w)] - mx) * (ys[static_cast<std::size_t>(w)] - my);
        den += (xs[static_cast<std::size_t>(w)] - mx) * (xs[static_cast<std::size_t>(w)] - mx);
    }
    res.growth_rate = num / den;
    const double thresh = 0.02;
    res.member = res.growth_rate < -thresh;
    res.borderline = std::fabs(res.growth_rate) <= thresh;
    return res;
}

} // namespace qclab
