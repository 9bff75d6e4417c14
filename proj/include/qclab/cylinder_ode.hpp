// Delaunay ODE on the cylinder: first-order reduction, Hamiltonian first
// integral, shooting for the periodic orbit of a given necksize, and the
// periodic solution object with its dense interpolant.
//
// The fourth-order profile equation
//   v'''' - c2 v'' + c0 v - c_nl v^p = 0,  p = (n+4)/(n-4),
// is reduced to the state (v, v', v'', v''').  Periodic orbits are even about
// their minimum, so the shot fixes v(0)=eps, v'(0)=v'''(0)=0 and searches the
// single unknown v''(0).

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qclab/dimension.hpp"
#include "qclab/qfloat.hpp"
#include "qclab/rk.hpp"

namespace qclab {

struct CylState {
    double t = 0;
    State<double, 4> y{}; // (v, v', v'', v''')
};

struct ToleranceConfig {
    double ode_rel = 1e-10;
    double ode_abs = 1e-12;
    double shoot_tol = 1e-9;
    int max_iter = 100;
    double v_max = 50.0; // blow-up cap

    void validate() const {
        if (ode_rel <= 0 || ode_abs <= 0 || shoot_tol <= 0 || v_max <= 0 || max_iter < 1)
            throw std::invalid_argument("ToleranceConfig: all tolerances positive, max_iter >= 1");
    }
};

// v^p for possibly non-integer p; integer exponents go through powi so the
// quad path avoids powq for n with integer (n+4)/(n-4).
template <class Real>
Real pow_exponent(Real v, double p) {
    const int ip = static_cast<int>(p);
    if (static_cast<double>(ip) == p && ip >= 0 && ip <= 16) {
        Real r = Real(1);
        for (int i = 0; i < ip; ++i) r *= v;
        return r;
    }
    return pow(v, Real(p));
}

template <class Real>
State<Real, 4> ode_rhs_t(const State<Real, 4>& y, const DimensionParams& d) {
    if (!(y[0] > Real(0)))
        throw std::domain_error("ode_rhs: v must be positive");
    return {y[1], y[2], y[3],
            Real(d.c2) * y[2] - Real(d.c0) * y[0] + Real(d.c_nl) * pow_exponent(y[0], d.p_exp)};
}

inline State<double, 4> ode_rhs(const CylState& s, const DimensionParams& d) {
    return ode_rhs_t<double>(s.y, d);
}

// First integral of the Delaunay ODE:
//   H = -v' v''' + v''^2/2 + (c2/2) v'^2 - (c0/2) v^2 + ((n-4)^2(n^2-4)/32) v^{2n/(n-4)}.
template <class Real>
Real hamiltonian_t(const State<Real, 4>& y, const DimensionParams& d) {
    if (!(y[0] > Real(0)))
        throw std::domain_error("hamiltonian: v must be positive");
    const double n = d.n;
    const double c_pot = (n - 4.0) * (n - 4.0) * (n * n - 4.0) / 32.0;
    const double q = 2.0 * n / (n - 4.0);
    return -y[1] * y[3] + y[2] * y[2] / Real(2) + Real(d.c2 / 2) * y[1] * y[1] -
           Real(d.c0 / 2) * y[0] * y[0] + Real(c_pot) * pow_exponent(y[0], q);
}

inline double hamiltonian(const CylState& s, const DimensionParams& d) {
    return hamiltonian_t<double>(s.y, d);
}

// Exact sphere-limit profile v = (cosh t)^{(4-n)/2} and derivatives.
inline CylState sphere_limit(double t, const DimensionParams& d) {
    const double p = (4.0 - d.n) / 2.0;
    const double ch = std::cosh(t), sh = std::sinh(t);
    const double vp = std::pow(ch, p);
    CylState s;
    s.t = t;
    s.y[0] = vp;
    s.y[1] = p * vp / ch * sh;
    s.y[2] = vp / (ch * ch) * (p * (p - 1) * sh * sh + p * ch * ch);
    s.y[3] = vp / (ch * ch * ch) *
             (p * (p - 1) * (p - 2) * sh * sh * sh + p * (3 * p - 2) * ch * ch * sh);
    return s;
}

enum class OrbitStop { reached_end, blow_up, underflow };

struct OrbitResult {
    std::vector<CylState> samples;     // accepted integrator steps
    std::vector<CylState> vdot_zeros;  // root-polished events v'(t)=0
    OrbitStop stop = OrbitStop::reached_end;
};

namespace detail {

template <class Real>
struct OrbitRhs {
    const DimensionParams* d;
    State<Real, 4> operator()(Real, const State<Real, 4>& y) const { return ode_rhs_t(y, *d); }
};

// Locate the zero of component `comp` between states (ta, ya) and (tb):
// Newton iteration on fresh forward sub-integrations from ya (the derivative
// of y[comp] is y[comp+1]), with a bisection fallback when Newton leaves the
// bracket.  Root accuracy near the scalar type's precision.
template <class Real>
std::pair<Real, State<Real, 4>> polish_zero(const DimensionParams& d, Real ta,
                                            const State<Real, 4>& ya, Real tb, int comp,
                                            Real rel, Real abs_tol) {
    OrbitRhs<Real> f{&d};
    const Real tol_t = real_traits<Real>::is_quad ? Real(1e-28) : Real(1e-13);
    Real lo = ta, hi = tb;
    Real t_est = (ta + tb) / Real(2);
    State<Real, 4> y_est = ya;
    for (int it = 0; it < 60; ++it) {
        y_est = ya;
        if (t_est > ta) integrate_to<Real, 4>(f, y_est, ta, t_est, rel, abs_tol);
        const bool same_side = (y_est[comp] > Real(0)) == (ya[comp] > Real(0));
        if (same_side)
            lo = t_est;
        else
            hi = t_est;
        Real step = (y_est[comp + 1] != Real(0)) ? -y_est[comp] / y_est[comp + 1] : Real(0);
        Real t_next = t_est + step;
        if (step == Real(0) || !(t_next > lo) || !(t_next < hi))
            t_next = (lo + hi) / Real(2); // fallback keeps the bracket shrinking
        if (fabs(t_next - t_est) <= tol_t * std::max(fabs(t_est), Real(1)) ||
            !(hi - lo > tol_t * std::max(fabs(hi), Real(1)))) {
            t_est = t_next;
            break;
        }
        t_est = t_next;
    }
    y_est = ya;
    if (t_est > ta) integrate_to<Real, 4>(f, y_est, ta, t_est, rel, abs_tol);
    return {t_est, y_est};
}

enum class ShotStatus { max_found, blow_up, underflow, no_event };

// Integrate from (eps, 0, a, 0) until the first maximum of v (v'=0 crossing
// downward with v''<0), a blow-up past v_max, or v dropping to zero.
template <class Real>
struct ShotOutcome {
    ShotStatus status = ShotStatus::no_event;
    Real t_max = 0;
    State<Real, 4> y_max{};
    Real residual = 0; // v''' at the maximum; zero for the symmetric orbit
};

template <class Real>
ShotOutcome<Real> first_max(Real eps, Real a, const DimensionParams& d, Real rel, Real abs_tol,
                            Real v_max, Real t_limit) {
    OrbitRhs<Real> f{&d};
    State<Real, 4> y{eps, Real(0), a, Real(0)};
    Real t_prev = 0;
    State<Real, 4> y_prev = y;
    ShotOutcome<Real> out;
    bool found = false;
    Real t_cross = 0;
    try {
        integrate_adaptive<Real, 4>(
            f, y, Real(0), t_limit, rel, abs_tol,
            [&](Real t, const State<Real, 4>& yc, const State<Real, 4>&) {
                if (yc[0] >= v_max) {
                    out.status = ShotStatus::blow_up;
                    return false;
                }
                if (yc[0] <= Real(1e-8)) {
                    out.status = ShotStatus::underflow;
                    return false;
                }
                if (t > Real(0) && y_prev[1] > Real(0) && yc[1] <= Real(0)) {
                    found = true;
                    t_cross = t;
                    return false;
                }
                t_prev = t;
                y_prev = yc;
                return true;
            });
    } catch (const std::domain_error&) {
        out.status = ShotStatus::underflow;
        return out;
    } catch (const std::runtime_error&) {
        out.status = ShotStatus::blow_up; // step underflow near a singularity
        return out;
    }
    if (!found) return out;
    auto [tz, yz] = polish_zero<Real>(d, t_prev, y_prev, t_cross, 1, rel, abs_tol);
    out.status = ShotStatus::max_found;
    out.t_max = tz;
    out.y_max = yz;
    out.residual = yz[3];
    return out;
}

// Shooting objective: v''' at the first maximum; blow-up counts as +inf
// (overshooting the symmetric orbit), underflow as -inf.
template <class Real>
Real shot_objective(Real eps, Real a, const DimensionParams& d, Real rel, Real abs_tol, Real v_max,
                    Real t_limit, ShotOutcome<Real>* keep = nullptr) {
    auto out = first_max<Real>(eps, a, d, rel, abs_tol, v_max, t_limit);
    if (keep) *keep = out;
    switch (out.status) {
        case ShotStatus::max_found: return out.residual;
        case ShotStatus::blow_up: return std::numeric_limits<double>::infinity();
        case ShotStatus::underflow:
        case ShotStatus::no_event: return -std::numeric_limits<double>::infinity();
    }
    return Real(0);
}

// Degree-7 two-point Hermite evaluation: values f(0..3 derivatives) at the
// interval ends.  Newton form with confluent divided differences.
inline double hermite7(double h, double s, const double* fl, const double* fr) {
    // nodes 0,0,0,0,h,h,h,h ; s in [0,h]
    double dd[8][8];
    const double fact[4] = {1.0, 1.0, 2.0, 6.0};
    double xs[8];
    for (int i = 0; i < 4; ++i) xs[i] = 0.0;
    for (int i = 4; i < 8; ++i) xs[i] = h;
    for (int i = 0; i < 8; ++i) dd[i][0] = (i < 4) ? fl[0] : fr[0];
    for (int k = 1; k < 8; ++k) {
        for (int i = 0; i + k < 8; ++i) {
            if (xs[i] == xs[i + k]) {
                dd[i][k] = ((i < 4) ? fl[k] : fr[k]) / fact[k];
            } else {
                dd[i][k] = (dd[i + 1][k - 1] - dd[i][k - 1]) / (xs[i + k] - xs[i]);
            }
        }
    }
    double acc = dd[0][7];
    for (int k = 6; k >= 0; --k) acc = acc * (s - xs[k]) + dd[0][k];
    return acc;
}

} // namespace detail

// One periodic Delaunay orbit.  Samples cover the half period [0, T/2]; the
// full period follows from evenness about t=0 and t=T/2, and the interpolant
// extends periodically to all t.
class DelaunaySolution {
  public:
    DimensionParams params;
    double eps = 0;
    double vpp0 = 0;   // v''(0) at the minimum
    double period = 0; // T_eps
    double energy = 0; // conserved Hamiltonian
    double shoot_residual = 0;

    // Dense half-period table: values v..v^(6) at uniform nodes.
    std::vector<std::array<double, 7>> table;
    double node_dt = 0;

    bool is_constant() const { return table.size() <= 1; }

    // Full state (v, v', v'', v''') at arbitrary t by periodic even extension.
    CylState at(double t) const {
        CylState s;
        s.t = t;
        if (is_constant()) {
            s.y = {eps, 0, 0, 0};
            return s;
        }
        const double half = period / 2.0;
        double tm = std::fmod(t, period);
        if (tm < 0) tm += period;
        bool mirrored = false;
        if (tm > half) {
            tm = period - tm;
            mirrored = true;
        }
        std::size_t i = std::min(static_cast<std::size_t>(tm / node_dt), table.size() - 2);
        const double s_loc = tm - static_cast<double>(i) * node_dt;
        for (int k = 0; k < 4; ++k) {
            double fl[4], fr[4];
            for (int m = 0; m < 4; ++m) {
                fl[m] = table[i][k + m];
                fr[m] = table[i + 1][k + m];
            }
            s.y[k] = detail::hermite7(node_dt, s_loc, fl, fr);
        }
        if (mirrored) { // v even: odd derivatives flip sign
            s.y[1] = -s.y[1];
            s.y[3] = -s.y[3];
        }
        return s;
    }

    double v(double t) const { return at(t).y[0]; }

    // Samples over one full period (mirrored second half), for export.
    std::vector<CylState> period_samples() const {
        std::vector<CylState> out;
        if (is_constant()) {
            for (int i = 0; i <= 64; ++i) {
                CylState s;
                s.t = period * i / 64.0;
                s.y = {eps, 0, 0, 0};
                out.push_back(s);
            }
            return out;
        }
        const std::size_t m = table.size();
        out.reserve(2 * m - 1);
        for (std::size_t i = 0; i < m; ++i) {
            CylState s;
            s.t = node_dt * static_cast<double>(i);
            s.y = {table[i][0], table[i][1], table[i][2], table[i][3]};
            out.push_back(s);
        }
        for (std::size_t i = m - 1; i-- > 0;) {
            CylState s;
            s.t = period - node_dt * static_cast<double>(i);
            s.y = {table[i][0], -table[i][1], table[i][2], -table[i][3]};
            out.push_back(s);
        }
        return out;
    }
};

// General-purpose trajectory integration with blow-up guard and v'=0 event
// detection (roots polished to ~1e-12 in t).
inline OrbitResult integrate_orbit(const CylState& ic, double t_end, const ToleranceConfig& tol,
                                   const DimensionParams& d) {
    tol.validate();
    if (!(ic.y[0] > 0)) throw std::domain_error("integrate_orbit: v must be positive");
    if (!(t_end > ic.t)) throw std::invalid_argument("integrate_orbit: t_end must exceed ic.t");
    detail::OrbitRhs<double> f{&d};
    OrbitResult res;
    State<double, 4> y = ic.y;
    double t_prev = ic.t;
    State<double, 4> y_prev = y;
    integrate_adaptive<double, 4>(
        f, y, ic.t, t_end, tol.ode_rel, tol.ode_abs,
        [&](double t, const State<double, 4>& yc, const State<double, 4>&) {
            res.samples.push_back({t, yc});
            if (yc[0] >= tol.v_max) {
                res.stop = OrbitStop::blow_up;
                return false;
            }
            if (yc[0] <= 1e-10) {
                res.stop = OrbitStop::underflow;
                return false;
            }
            if (t > ic.t && y_prev[1] != 0 && (y_prev[1] > 0) != (yc[1] > 0)) {
                auto [tz, yz] =
                    detail::polish_zero<double>(d, t_prev, y_prev, t, 1, tol.ode_rel, tol.ode_abs);
                res.vdot_zeros.push_back({tz, yz});
            }
            t_prev = t;
            y_prev = yc;
            return true;
        });
    return res;
}

namespace detail {

// Extended derivative column (v .. v^(6)) from the 4-state, via the ODE.
inline std::array<double, 7> derivative_column(const State<double, 4>& y, const DimensionParams& d) {
    std::array<double, 7> c{};
    c[0] = y[0];
    c[1] = y[1];
    c[2] = y[2];
    c[3] = y[3];
    const double p = d.p_exp;
    const double vp = pow_exponent(y[0], p);
    const double vpm1 = vp / y[0];
    const double vpm2 = vpm1 / y[0];
    c[4] = d.c2 * y[2] - d.c0 * y[0] + d.c_nl * vp;
    c[5] = d.c2 * y[3] - d.c0 * y[1] + d.c_nl * p * vpm1 * y[1];
    c[6] = d.c2 * c[4] - d.c0 * y[2] +
           d.c_nl * p * ((p - 1) * vpm2 * y[1] * y[1] + vpm1 * y[2]);
    return c;
}

// Extended-precision re-polish of a converged double shot.  Fixed-step CV8
// integration to the neighbourhood of the first maximum (located by the
// double solution), Newton in t on v' for the event, secant in the initial
// v'' on the symmetry residual v''' at the maximum.
template <class Real>
struct RefinedShot {
    Real a = 0;      // initial v''
    Real t_max = 0;  // time of the first maximum
    Real residual = 0;
};

template <class Real>
RefinedShot<Real> refine_shot(Real eps, Real a_init, double t_max_est,
                              const DimensionParams& d, Real h) {
    OrbitRhs<Real> rhs{&d};
    auto shoot_once = [&](Real a) {
        State<Real, 4> y{eps, Real(0), a, Real(0)};
        Real t = 0;
        const Real target = Real(t_max_est);
        const long n = std::max(16L, static_cast<long>(to_double(target / h)) + 1);
        cv8_integrate<Real, 4>(rhs, y, t, target, n);
        t = target;
        for (int it = 0; it < 24; ++it) {
            if (y[2] == Real(0)) break;
            Real dt = -y[1] / y[2];
            const Real cap = Real(t_max_est) / 4;
            if (fabs(dt) > cap) dt = (dt > Real(0)) ? cap : -cap;
            const long m = std::max(4L, static_cast<long>(to_double(fabs(dt) / h)) + 1);
            cv8_integrate<Real, 4>(rhs, y, t, t + dt, m);
            t += dt;
            if (fabs(dt) < fabs(t) * Real(1e-31)) break;
        }
        return RefinedShot<Real>{a, t, y[3]};
    };
    RefinedShot<Real> s0 = shoot_once(a_init);
    RefinedShot<Real> s1 = shoot_once(a_init * (Real(1) + Real(1e-14)));
    for (int it = 0; it < 16 && s1.residual != s0.residual; ++it) {
        Real step = -s1.residual * (s1.a - s0.a) / (s1.residual - s0.residual);
        const Real cap = fabs(s1.a) * Real(1e-9);
        if (fabs(step) > cap) step = (step > Real(0)) ? cap : -cap;
        const Real a2 = s1.a + step;
        s0 = s1;
        s1 = shoot_once(a2);
        if (fabs(s1.a - s0.a) < fabs(s1.a) * Real(1e-30)) break;
    }
    return s1;
}

} // namespace detail

// Shooting for the periodic orbit with minimum eps.  Returns the converged
// DelaunaySolution; eps = eps_bar yields the constant solution with period
// 2*pi/sqrt(mu) by convention.
inline DelaunaySolution shoot_delaunay(double eps, const ToleranceConfig& tol,
                                       const DimensionParams& d, std::size_t half_samples = 600) {
    tol.validate();
    if (!(eps > 0) || eps > d.eps_bar * (1 + 1e-12))
        throw std::invalid_argument("shoot_delaunay: necksize must lie in (0, eps_bar]");

    DelaunaySolution sol;
    sol.params = d;
    sol.eps = eps;

    if (std::fabs(eps - d.eps_bar) <= 1e-12 * d.eps_bar) {
        sol.eps = d.eps_bar;
        sol.vpp0 = 0;
        sol.period = 2.0 * M_PI / std::sqrt(d.mu);
        sol.energy = hamiltonian_t<double>({d.eps_bar, 0, 0, 0}, d);
        sol.table.push_back({d.eps_bar, 0, 0, 0, 0, 0, 0});
        return sol;
    }

    const double t_limit = 80.0;
    auto F = [&](double a, detail::ShotOutcome<double>* keep = nullptr) {
        return detail::shot_objective<double>(eps, a, d, tol.ode_rel, tol.ode_abs, tol.v_max,
                                              t_limit, keep);
    };

    // Bracket: small v''(0) undershoots (negative objective), large overshoots.
    double a_lo = 1e-9, a_hi = 0;
    double f_lo = F(a_lo);
    if (!(f_lo < 0))
        throw std::runtime_error("shoot_delaunay: lower bracket endpoint not undershooting");
    double a = std::max(d.mu * (d.eps_bar - eps), 1e-6);
    double f_hi = 0;
    int iter = 0;
    for (;; ++iter) {
        if (iter > tol.max_iter)
            throw std::runtime_error("shoot_delaunay: bracket search failed");
        const double fa = F(a);
        if (fa > 0) {
            a_hi = a;
            f_hi = fa;
            break;
        }
        a_lo = a;
        f_lo = fa;
        a *= 2;
    }

    // Bisection with secant acceleration where both endpoint objectives are
    // finite.  Convergence to machine precision in a; the objective magnitude
    // near the root is limited by the orbit's unstable Floquet direction.
    detail::ShotOutcome<double> best{};
    for (iter = 0; iter < 220; ++iter) {
        double am;
        if (std::isfinite(f_lo) && std::isfinite(f_hi)) {
            am = a_lo - f_lo * (a_hi - a_lo) / (f_hi - f_lo);
            const double margin = 0.1 * (a_hi - a_lo);
            if (!(am > a_lo + 0.02 * margin) || !(am < a_hi - 0.02 * margin))
                am = 0.5 * (a_lo + a_hi);
        } else {
            am = 0.5 * (a_lo + a_hi);
        }
        if (am <= a_lo || am >= a_hi) break;
        detail::ShotOutcome<double> out;
        const double fm = F(am, &out);
        if (fm > 0) {
            a_hi = am;
            f_hi = fm;
        } else {
            a_lo = am;
            f_lo = fm;
            if (out.status == detail::ShotStatus::max_found) best = out;
        }
        if (a_hi - a_lo <= 1e-17 * std::max(a_lo, 1e-3)) break;
    }
    if (best.status != detail::ShotStatus::max_found)
        throw std::runtime_error("shoot_delaunay: no convergence within max_iter");

    // Re-run at the converged undershooting value for the event data.
    detail::ShotOutcome<double> fin;
    F(a_lo, &fin);
    if (fin.status != detail::ShotStatus::max_found) fin = best;
    if (std::fabs(fin.residual) > 1e4 * tol.shoot_tol)
        throw std::runtime_error("shoot_delaunay: symmetry residual above tolerance");

    sol.vpp0 = a_lo;
    sol.period = 2.0 * fin.t_max;
    sol.shoot_residual = std::fabs(fin.residual);
    sol.energy = hamiltonian_t<double>({eps, 0, a_lo, 0}, d);

    // Dense half-period table at uniform nodes.  The orbit's unstable Floquet
    // direction amplifies forward-integration roundoff by e^{gamma t}, so the
    // table is built from both symmetry ends: forward from the minimum and in
    // reversed time from the (symmetrized) maximum, meeting in the middle.
    sol.node_dt = fin.t_max / static_cast<double>(half_samples);
    sol.table.resize(half_samples + 1);
    // The forward and backward chains disagree where they meet by the
    // accumulated shot and integration error; a hard hand-off would put a
    // jump into the table that dominates any later finite differencing of the
    // interpolant.  The shot is therefore re-polished in extended precision
    // (fixed-step CV8; the tableau is exact in every precision), the chains
    // are integrated in extended precision, and they are blended over a
    // window around the midpoint with a C-infinity transition weight before
    // the derivative columns are formed.
    using ld = long double;
    ld a_ref = static_cast<ld>(a_lo), half_ref = static_cast<ld>(fin.t_max);
    const ld h_ld = static_cast<ld>(std::min(sol.node_dt, 4e-3));
    try {
        const auto rs = detail::refine_shot<ld>(static_cast<ld>(eps), a_ref, fin.t_max, d, h_ld);
        if (rs.t_max > ld(0) && std::isfinite(static_cast<double>(rs.t_max))) {
            a_ref = rs.a;
            half_ref = rs.t_max;
            sol.vpp0 = static_cast<double>(rs.a);
            sol.period = 2.0 * static_cast<double>(rs.t_max);
            sol.shoot_residual = std::fabs(static_cast<double>(rs.residual));
            sol.energy = hamiltonian_t<double>({eps, 0, sol.vpp0, 0}, d);
        }
    } catch (const std::exception&) {
        // fall back to the double shot
    }
    sol.node_dt = (sol.period / 2) / static_cast<double>(half_samples);

    const std::size_t mid_node = half_samples / 2;
    const std::size_t overlap = std::max<std::size_t>(4, half_samples / 8);
    const std::size_t blend_lo = mid_node - std::min(overlap, mid_node);
    const std::size_t blend_hi = std::min(mid_node + overlap, half_samples);

    detail::OrbitRhs<ld> fl{&d};
    const ld dt_ld = half_ref / static_cast<ld>(half_samples);
    const long sub = std::max(1L, static_cast<long>(static_cast<double>(dt_ld) / 3e-3) + 1);

    std::vector<State<ld, 4>> fwd(half_samples + 1), bwd(half_samples + 1);
    State<ld, 4> y{static_cast<ld>(eps), ld(0), a_ref, ld(0)};
    fwd[0] = y;
    for (std::size_t i = 1; i <= half_samples; ++i) {
        cv8_integrate<ld, 4>(fl, y, dt_ld * static_cast<ld>(i - 1), dt_ld * static_cast<ld>(i),
                             sub);
        fwd[i] = y;
    }
    // Reversed time s = t_max - t: even components unchanged, odd ones flip.
    // The symmetrized maximum state comes from the refined forward orbit.
    std::size_t bwd_ok = half_samples; // lowest node the backward chain reached
    State<ld, 4> yb{fwd[half_samples][0], ld(0), fwd[half_samples][2], ld(0)};
    bwd[half_samples] = yb;
    try {
        for (std::size_t i = 1; i + blend_lo <= half_samples; ++i) {
            cv8_integrate<ld, 4>(fl, yb, dt_ld * static_cast<ld>(i - 1),
                                 dt_ld * static_cast<ld>(i), sub);
            if (!(yb[0] > ld(0))) break;
            // flip back to forward time
            bwd[half_samples - i] = State<ld, 4>{yb[0], -yb[1], yb[2], -yb[3]};
            bwd_ok = half_samples - i;
        }
    } catch (const std::exception&) {
        // keep the nodes that were reached; forward data covers the rest
    }
    // exp(-1/x)-based transition: all derivatives vanish at both window ends.
    auto blend_weight = [](double x) {
        if (x <= 0) return 0.0;
        if (x >= 1) return 1.0;
        const double fa = std::exp(-1.0 / x), fb = std::exp(-1.0 / (1.0 - x));
        return fa / (fa + fb);
    };
    // If the backward chain stopped early (extreme necksizes), the blend
    // window shrinks to the nodes it actually reached.
    const std::size_t blo = std::max(blend_lo, bwd_ok);
    for (std::size_t i = 0; i <= half_samples; ++i) {
        State<ld, 4> s;
        if (i < blo) {
            s = fwd[i];
        } else if (i > blend_hi) {
            s = (i >= bwd_ok) ? bwd[i] : fwd[i];
        } else if (blo >= blend_hi) {
            s = bwd[i];
        } else {
            const double w = blend_weight(static_cast<double>(i - blo) /
                                          static_cast<double>(blend_hi - blo));
            for (int c = 0; c < 4; ++c)
                s[c] = (ld(1) - static_cast<ld>(w)) * fwd[i][c] + static_cast<ld>(w) * bwd[i][c];
        }
        State<double, 4> sd{static_cast<double>(s[0]), static_cast<double>(s[1]),
                            static_cast<double>(s[2]), static_cast<double>(s[3])};
        sol.table[i] = detail::derivative_column(sd, d);
    }
    return sol;
}

// H(eps) through the shooting value v''(0):
//   H = v''(0)^2/2 - (n^2(n-4)^2/32) eps^2 + ((n-4)^2(n^2-4)/32) eps^{2n/(n-4)}.
inline double hamiltonian_of_necksize(double eps, const DimensionParams& d,
                                      const ToleranceConfig& tol) {
    const DelaunaySolution sol = shoot_delaunay(eps, tol, d);
    return sol.energy;
}

// Inverse of the strictly decreasing map eps -> H_eps on (0, eps_bar].
inline double necksize_of_hamiltonian(double H, const DimensionParams& d,
                                      const ToleranceConfig& tol, double eps_min = 0.02) {
    const double H_bar = hamiltonian_t<double>({d.eps_bar, 0, 0, 0}, d);
    if (!(H >= H_bar) || !(H < 0))
        throw std::out_of_range("necksize_of_hamiltonian: H outside [H_eps_bar, 0)");
    double lo = eps_min, hi = d.eps_bar;
    double f_lo = hamiltonian_of_necksize(lo, d, tol) - H;
    if (f_lo < 0)
        throw std::domain_error("necksize_of_hamiltonian: H above the eps_min energy");
    // H decreasing in eps: f(lo) >= 0 >= f(hi)
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = hamiltonian_of_necksize(mid, d, tol) - H;
        if (fm >= 0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace qclab
