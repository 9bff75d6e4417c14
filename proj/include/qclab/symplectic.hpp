// Boundary (Wronskian-type) pairing on Jacobi fields, the conserved quantity
// A_eps = S(w0+, w0-), the identity A_eps(0) = -dH/d eps, and the 2k x 2k
// symplectic matrix on a deficiency-space basis (two geometric Jacobi fields
// per end).

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qclab/cylinder_ode.hpp"
#include "qclab/linearization.hpp"

namespace qclab {

// S(a,b)(t) = a b''' - b a''' + b' a'' - a' b'' + c2 (b a' - a b'),
// constant in t whenever a and b solve the same mode-0 linearized equation.
inline double boundary_pairing(const State<double, 4>& a, const State<double, 4>& b,
                               const DimensionParams& d) {
    return a[0] * b[3] - b[0] * a[3] + b[1] * a[2] - a[1] * b[2] +
           d.c2 * (b[0] * a[1] - a[0] * b[1]);
}

// Convenience overload: fields sampled at a common index.
inline double boundary_pairing(const JacobiField& a, const JacobiField& b, std::size_t i,
                               const DimensionParams& d) {
    if (i >= a.samples.size() || i >= b.samples.size())
        throw std::out_of_range("boundary_pairing: sample index out of range");
    if (std::fabs(a.samples[i].t - b.samples[i].t) > 1e-12)
        throw std::invalid_argument("boundary_pairing: fields sampled at different times");
    return boundary_pairing(a.samples[i].y, b.samples[i].y, d);
}

struct AEpsResult {
    double value = 0;     // mean of S(w0+, w0-) over the sample points
    double spread = 0;    // max |S - mean|
    bool conserved = true; // spread/|value| below 1e-6
    double s_deriv = 0;   // the finite-difference s = d v''(0)/d eps used
};

// A_eps = S(w0+, w0-), sampled at n_samples points over one period.  Both
// fields are advanced through the same discrete mode-0 equation in a single
// 8-dimensional integration, so the pairing is conserved to integrator
// accuracy even along the orbit's unstable Floquet direction.
inline AEpsResult a_epsilon(const DelaunaySolution& sol, double h = 0, int n_samples = 32,
                            const ToleranceConfig& tol = ToleranceConfig{}) {
    if (n_samples < 2) throw std::invalid_argument("a_epsilon: n_samples must be >= 2");
    const auto& d = sol.params;
    AEpsResult res;

    if (sol.is_constant()) {
        // Cylindrical fields sin/cos(sqrt(mu) t): S is constant in closed form.
        const double om = std::sqrt(d.mu);
        const State<double, 4> a{0, om, 0, -om * om * om};
        const State<double, 4> b{1, 0, -om * om, 0};
        res.value = boundary_pairing(a, b, d);
        res.spread = 0;
        return res;
    }

    if (h <= 0) h = 1e-4 * d.eps_bar;
    const double s = vpp0_eps_derivative(sol.eps, h, tol, d);
    res.s_deriv = s;

    const auto op = mode_operator(sol, 0);
    struct Rhs8 {
        const DelaunaySolution* sol;
        double b_j, v_shift;
        State<double, 8> operator()(double t, const State<double, 8>& y) const {
            const auto& d = sol->params;
            const double V = v_shift - d.c_lin * pow_exponent(sol->v(t), d.p_exp - 1.0);
            State<double, 8> dy;
            for (int c = 0; c < 2; ++c) {
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

    // w0+ = (0, v''(0), 0, v''''(0));  w0- = (1, 0, s, 0).
    const auto r0 = ode_rhs(sol.at(0.0), d);
    State<double, 8> y{0, sol.vpp0, 0, r0[3], 1, 0, s, 0};

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(n_samples));
    values.push_back(boundary_pairing({y[0], y[1], y[2], y[3]}, {y[4], y[5], y[6], y[7]}, d));
    for (int i = 1; i < n_samples; ++i) {
        const double t0 = sol.period * (i - 1) / static_cast<double>(n_samples - 1);
        const double t1 = sol.period * i / static_cast<double>(n_samples - 1);
        integrate_to<double, 8>(rhs, y, t0, t1, tol.ode_rel, tol.ode_abs);
        values.push_back(boundary_pairing({y[0], y[1], y[2], y[3]}, {y[4], y[5], y[6], y[7]}, d));
    }
    double mean = 0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double spread = 0;
    for (double v : values) spread = std::max(spread, std::fabs(v - mean));
    res.value = mean;
    res.spread = spread;
    res.conserved = spread <= 1e-6 * std::fabs(mean);
    return res;
}

// Centered finite difference of H(eps) with one Richardson level (h, h/2).
inline double dH_deps(double eps, double h, const DimensionParams& d, const ToleranceConfig& tol) {
    if (!(eps - h > 0) || !(eps + h < d.eps_bar))
        throw std::invalid_argument("dH_deps: eps +/- h outside (0, eps_bar)");
    auto slope = [&](double hh) {
        return (hamiltonian_of_necksize(eps + hh, d, tol) -
                hamiltonian_of_necksize(eps - hh, d, tol)) /
               (2.0 * hh);
    };
    const double sh = slope(h), sh2 = slope(h / 2);
    return (4.0 * sh2 - sh) / 3.0;
}

struct OmegaMatrix {
    int k = 0;
    std::vector<double> eps_list;
    std::vector<double> blocks; // A_{eps_i} per end
    std::vector<std::vector<double>> matrix; // 2k x 2k, basis (w0+_1, w0-_1, ..., w0+_k, w0-_k)
};

// Per-end 2x2 blocks [[0, A_i], [-A_i, 0]] on the deficiency basis; cross-end
// entries are exactly zero (fields at distinct ends have disjoint supports).
inline OmegaMatrix omega_matrix(const std::vector<double>& eps_list, double h,
                                const DimensionParams& d,
                                const ToleranceConfig& tol = ToleranceConfig{}) {
    OmegaMatrix om;
    om.k = static_cast<int>(eps_list.size());
    om.eps_list = eps_list;
    if (om.k < 1) throw std::invalid_argument("omega_matrix: need at least one end");
    om.matrix.assign(2 * om.k, std::vector<double>(2 * om.k, 0.0));
    for (int i = 0; i < om.k; ++i) {
        if (!(eps_list[i] > 0) || eps_list[i] > d.eps_bar * (1 + 1e-12))
            throw std::invalid_argument("omega_matrix: eps outside (0, eps_bar]");
        const DelaunaySolution sol = shoot_delaunay(eps_list[i], tol, d);
        const double A = a_epsilon(sol, h, 32, tol).value;
        om.blocks.push_back(A);
        om.matrix[2 * i][2 * i + 1] = A;
        om.matrix[2 * i + 1][2 * i] = -A;
    }
    return om;
}

// True iff all pairwise omega entries over the selected basis indices vanish
// (below 1e-10); the translation span and the necksize span are isotropic.
inline bool isotropic_check(const std::vector<int>& subset, const OmegaMatrix& om) {
    if (subset.size() > static_cast<std::size_t>(om.k))
        throw std::invalid_argument("isotropic_check: subset larger than k");
    for (int a : subset)
        for (int b : subset) {
            if (a < 0 || b < 0 || a >= 2 * om.k || b >= 2 * om.k)
                throw std::out_of_range("isotropic_check: index out of range");
            if (std::fabs(om.matrix[a][b]) > 1e-10) return false;
        }
    return true;
}

} // namespace qclab
