// Adaptive explicit Runge-Kutta integrator, Dormand-Prince 8(5,3) core
// (Hairer-Norsett-Wanner DOP853 coefficients, 12 stages, 8th order with the
// combined 5th/3rd order error estimate).  Templated on the scalar type so the
// same stepper runs in double or __float128; state is a fixed-size array.

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qclab/qfloat.hpp"

namespace qclab {

template <class Real, std::size_t N>
using State = std::array<Real, N>;

struct StepStats {
    long n_steps = 0;
    long n_rejected = 0;
};

namespace dp853 {
// clang-format off
constexpr double c2=0.526001519587677318785587544488e-01, c3=0.789002279381515978178381316732e-01,
  c4=0.118350341907227396726757197510e+00, c5=0.281649658092772603273242802490e+00,
  c6=1.0/3.0, c7=0.25, c8=0.307692307692307692307692307692e+00,
  c9=0.651282051282051282051282051282e+00, c10=0.6e+00, c11=0.857142857142857142857142857142e+00;

constexpr double a21=5.26001519587677318785587544488e-2;
constexpr double a31=1.97250569845378994544595329183e-2, a32=5.91751709536136983633785987549e-2;
constexpr double a41=2.95875854768068491816892993775e-2, a43=8.87627564304205475450678981324e-2;
constexpr double a51=2.41365134159266685502369798665e-1, a53=-8.84549479328286085344864962717e-1,
  a54=9.24834003261792003115737966543e-1;
constexpr double a61=3.7037037037037037037037037037e-2, a64=1.70828608729473871279604482173e-1,
  a65=1.25467687566822425016691814123e-1;
constexpr double a71=3.7109375e-2, a74=1.70252211019544039314978060272e-1,
  a75=6.02165389804559606850219397283e-2, a76=-1.7578125e-2;
constexpr double a81=3.70920001185047927108779319836e-2, a84=1.70383925712239993810214054705e-1,
  a85=1.07262030446373284651809199168e-1, a86=-1.53194377486244017527936158236e-2,
  a87=8.27378916381402288758473766002e-3;
constexpr double a91=6.24110958716075717114429577812e-1, a94=-3.36089262944694129406857109825e0,
  a95=-8.68219346841726006818189891453e-1, a96=2.75920996994467083049415600797e1,
  a97=2.01540675504778934086186788979e1, a98=-4.34898841810699588477366255144e1;
constexpr double a101=4.77662536438264365890433908527e-1, a104=-2.48811461997166764192642586468e0,
  a105=-5.90290826836842996371446475743e-1, a106=2.12300514481811942347288949897e1,
  a107=1.52792336328824235832596922938e1, a108=-3.32882109689848629194453265587e1,
  a109=-2.03312017085086261358222928593e-2;
constexpr double a111=-9.3714243008598732571704021658e-1, a114=5.18637242884406370830023853209e0,
  a115=1.09143734899672957818500254654e0, a116=-8.14978701074692612513997267357e0,
  a117=-1.85200656599969598641566180701e1, a118=2.27394870993505042818970056734e1,
  a119=2.49360555267965238987089396762e0, a1110=-3.0467644718982195003823669022e0;
constexpr double a121=2.27331014751653820792359768449e0, a124=-1.05344954667372501984066689879e1,
  a125=-2.00087205822486249909675718444e0, a126=-1.79589318631187989172765950534e1,
  a127=2.79488845294199600508499808837e1, a128=-2.85899827713502369474065508674e0,
  a129=-8.87285693353062954433549289258e0, a1210=1.23605671757943030647266201528e1,
  a1211=6.43392746015763530355970484046e-1;

constexpr double b1=5.42937341165687622380535766363e-2, b6=4.45031289275240888144113950566e0,
  b7=1.89151789931450038304281599044e0, b8=-5.8012039600105847814672114227e0,
  b9=3.1116436695781989440891606237e-1, b10=-1.52160949662516078556178806805e-1,
  b11=2.01365400804030348374776537501e-1, b12=4.47106157277725905176885569043e-2;

constexpr double e31=0.244094488188976377952755905512e+00, e32=0.733846688281611857341361741547e+00,
  e33=0.220588235294117647058823529412e-01;
constexpr double e51=0.1312004499419488073250102996e-01, e56=-0.1225156446376204440720569753e+01,
  e57=-0.4957589496572501915214079952e+00, e58=0.1664377182454986536961530415e+01,
  e59=-0.3503288487499736816886487290e+00, e510=0.3341791187130174790297318841e+00,
  e511=0.8192320648511571246570742613e-01, e512=-0.2235530786388629525884427845e-01;
// clang-format on
} // namespace dp853

// One DP8 step from (t, y) with size h.  Writes the 8th-order result to yout
// and returns the scaled error estimate (per unit tolerance weights below).
template <class Real, std::size_t N, class Rhs>
Real dp853_step(const Rhs& f, Real t, const State<Real, N>& y, Real h,
                State<Real, N>& yout, const State<Real, N>& k1, Real rel, Real abs_tol) {
    using namespace dp853;
    State<Real, N> k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12, tmp;

    auto stage = [&](Real c, auto&&... terms) {
        (void)c;
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (... + (terms.second * terms.first[i]));
    };
    auto P = [](const State<Real, N>& k, double a) { return std::pair<const State<Real, N>&, Real>(k, Real(a)); };

    stage(Real(c2), P(k1, a21));
    k2 = f(t + Real(c2) * h, tmp);
    stage(Real(c3), P(k1, a31), P(k2, a32));
    k3 = f(t + Real(c3) * h, tmp);
    stage(Real(c4), P(k1, a41), P(k3, a43));
    k4 = f(t + Real(c4) * h, tmp);
    stage(Real(c5), P(k1, a51), P(k3, a53), P(k4, a54));
    k5 = f(t + Real(c5) * h, tmp);
    stage(Real(c6), P(k1, a61), P(k4, a64), P(k5, a65));
    k6 = f(t + Real(c6) * h, tmp);
    stage(Real(c7), P(k1, a71), P(k4, a74), P(k5, a75), P(k6, a76));
    k7 = f(t + Real(c7) * h, tmp);
    stage(Real(c8), P(k1, a81), P(k4, a84), P(k5, a85), P(k6, a86), P(k7, a87));
    k8 = f(t + Real(c8) * h, tmp);
    stage(Real(c9), P(k1, a91), P(k4, a94), P(k5, a95), P(k6, a96), P(k7, a97), P(k8, a98));
    k9 = f(t + Real(c9) * h, tmp);
    stage(Real(c10), P(k1, a101), P(k4, a104), P(k5, a105), P(k6, a106), P(k7, a107), P(k8, a108),
          P(k9, a109));
    k10 = f(t + Real(c10) * h, tmp);
    stage(Real(c11), P(k1, a111), P(k4, a114), P(k5, a115), P(k6, a116), P(k7, a117), P(k8, a118),
          P(k9, a119), P(k10, a1110));
    k11 = f(t + Real(c11) * h, tmp);
    stage(Real(1), P(k1, a121), P(k4, a124), P(k5, a125), P(k6, a126), P(k7, a127), P(k8, a128),
          P(k9, a129), P(k10, a1210), P(k11, a1211));
    k12 = f(t + h, tmp);

    Real err3 = 0, err5 = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const Real sum = Real(b1) * k1[i] + Real(b6) * k6[i] + Real(b7) * k7[i] + Real(b8) * k8[i] +
                         Real(b9) * k9[i] + Real(b10) * k10[i] + Real(b11) * k11[i] +
                         Real(b12) * k12[i];
        yout[i] = y[i] + h * sum;
        const Real sk = abs_tol + rel * std::max(fabs(y[i]), fabs(yout[i]));
        const Real e5 = Real(e51) * k1[i] + Real(e56) * k6[i] + Real(e57) * k7[i] +
                        Real(e58) * k8[i] + Real(e59) * k9[i] + Real(e510) * k10[i] +
                        Real(e511) * k11[i] + Real(e512) * k12[i];
        const Real e3 = sum - Real(e31) * k1[i] - Real(e32) * k9[i] - Real(e33) * k12[i];
        err5 += (e5 / sk) * (e5 / sk);
        err3 += (e3 / sk) * (e3 / sk);
    }
    Real den = err5 + Real(0.01) * err3;
    if (den <= Real(0)) den = Real(1);
    return fabs(h) * err5 * sqrt(Real(1) / (Real(N) * den));
}

// Integration driver.  Calls observer(t, y, dy) after every accepted step
// (and once for the initial state).  The observer may return false to stop.
template <class Real, std::size_t N, class Rhs, class Observer>
StepStats integrate_adaptive(const Rhs& f, State<Real, N>& y, Real t0, Real t1, Real rel, Real abs_tol,
                             Observer&& observer, Real h_init = Real(0), Real h_max = Real(0)) {
    if (!(t1 > t0)) throw std::invalid_argument("integrate_adaptive: t1 must exceed t0");
    StepStats stats;
    Real t = t0;
    Real h = h_init > Real(0) ? h_init : (t1 - t0) * Real(1e-4);
    if (h_max <= Real(0)) h_max = t1 - t0;
    State<Real, N> k1 = f(t, y);
    if (!observer(t, y, k1)) return stats;
    const Real hmin_factor = real_traits<Real>::is_quad ? Real(1e-30) : Real(1e-14);
    State<Real, N> ynew;
    const Real hmin = hmin_factor * std::max(std::max(fabs(t0), fabs(t1)), Real(1));
    if (h < hmin) h = t1 - t0; // interval itself is tiny: one step spans it
    while (t < t1) {
        if (h > h_max) h = h_max;
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
            if (t + h <= t) break; // remaining interval below one ulp of t
        }
        if (h < hmin && !last)
            throw std::runtime_error("integrate_adaptive: step size underflow");
        const Real err = dp853_step<Real, N>(f, t, y, h, ynew, k1, rel, abs_tol);
        if (err <= Real(1)) {
            t += h;
            y = ynew;
            k1 = f(t, y);
            ++stats.n_steps;
            Real fac = Real(0.9) * pow(err > Real(1e-30) ? err : Real(1e-30), Real(-1.0 / 8.0));
            fac = std::min(Real(6), std::max(Real(0.33), fac));
            h *= fac;
            if (!observer(t, y, k1)) break;
        } else {
            ++stats.n_rejected;
            Real fac = Real(0.9) * pow(err, Real(-1.0 / 8.0));
            h *= std::max(Real(0.1), fac);
        }
    }
    return stats;
}

// Cooper-Verner 11-stage explicit Runge-Kutta of order 8.  Unlike the DP853
// table above, every coefficient lies in Q(sqrt(21)) and is constructed here
// in the working precision, so the method retains its full order in
// __float128.  (The DP853 coefficients are double literals; their rounding
// caps any scalar type at ~1e-17 consistency.)  Fixed step size: the caller
// chooses the step from an error budget.
template <class Real>
struct CV8Tableau {
    Real a[12][12] = {};
    Real b[12] = {};
    Real c[12] = {};
    CV8Tableau() {
        const Real s = sqrt(Real(21));
        auto R = [](double num_r, double num_s, double den) {
            return [num_r, num_s, den](Real sq) {
                return (Real(num_r) + Real(num_s) * sq) / Real(den);
            };
        };
        auto E = [&](double nr, double ns, double dn) { return R(nr, ns, dn)(s); };
        c[1] = Real(0.5);
        c[2] = Real(0.5);
        c[3] = E(7, 1, 14);
        c[4] = E(7, 1, 14);
        c[5] = Real(0.5);
        c[6] = E(7, -1, 14);
        c[7] = E(7, -1, 14);
        c[8] = Real(0.5);
        c[9] = E(7, 1, 14);
        c[10] = Real(1);
        a[1][0] = Real(0.5);
        a[2][0] = Real(0.25);
        a[2][1] = Real(0.25);
        a[3][0] = E(1, 0, 7);
        a[3][1] = E(-7, -3, 98);
        a[3][2] = E(21, 5, 49);
        a[4][0] = E(11, 1, 84);
        a[4][2] = E(18, 4, 63);
        a[4][3] = E(21, -1, 252);
        a[5][0] = E(5, 1, 48);
        a[5][2] = E(9, 1, 36);
        a[5][3] = E(-231, 14, 360);
        a[5][4] = E(63, -7, 80);
        a[6][0] = E(10, -1, 42);
        a[6][2] = E(-432, 92, 315);
        a[6][3] = E(633, -145, 90);
        a[6][4] = E(-504, 115, 70);
        a[6][5] = E(63, -13, 35);
        a[7][0] = E(1, 0, 14);
        a[7][4] = E(14, -3, 126);
        a[7][5] = E(13, -3, 63);
        a[7][6] = E(1, 0, 9);
        a[8][0] = E(1, 0, 32);
        a[8][4] = E(91, -21, 576);
        a[8][5] = E(11, 0, 72);
        a[8][6] = E(-385, -75, 1152);
        a[8][7] = E(63, 13, 128);
        a[9][0] = E(1, 0, 14);
        a[9][4] = E(1, 0, 9);
        a[9][5] = E(-733, -147, 2205);
        a[9][6] = E(515, 111, 504);
        a[9][7] = E(-51, -11, 56);
        a[9][8] = E(132, 28, 245);
        a[10][4] = E(-42, 7, 18);
        a[10][5] = E(-18, 28, 45);
        a[10][6] = E(-273, -53, 72);
        a[10][7] = E(301, 53, 72);
        a[10][8] = E(28, -28, 45);
        a[10][9] = E(49, -7, 18);
        b[0] = E(1, 0, 20);
        b[7] = E(49, 0, 180);
        b[8] = E(16, 0, 45);
        b[9] = E(49, 0, 180);
        b[10] = E(1, 0, 20);
    }
};

template <class Real, std::size_t N, class Rhs>
void cv8_step(const Rhs& f, Real t, State<Real, N>& y, Real h) {
    static const CV8Tableau<Real> tb;
    State<Real, N> k[11];
    State<Real, N> tmp;
    k[0] = f(t, y);
    for (int s = 1; s < 11; ++s) {
        for (std::size_t i = 0; i < N; ++i) {
            Real acc = 0;
            for (int q = 0; q < s; ++q)
                if (tb.a[s][q] != Real(0)) acc += tb.a[s][q] * k[q][i];
            tmp[i] = y[i] + h * acc;
        }
        k[s] = f(t + tb.c[s] * h, tmp);
    }
    for (std::size_t i = 0; i < N; ++i) {
        Real acc = 0;
        for (int s = 0; s < 11; ++s)
            if (tb.b[s] != Real(0)) acc += tb.b[s] * k[s][i];
        y[i] += h * acc;
    }
}

// Fixed-step CV8 drive from t0 to t1 in n_steps equal steps.
template <class Real, std::size_t N, class Rhs>
void cv8_integrate(const Rhs& f, State<Real, N>& y, Real t0, Real t1, long n_steps) {
    const Real h = (t1 - t0) / Real(n_steps);
    for (long i = 0; i < n_steps; ++i) cv8_step<Real, N>(f, t0 + Real(i) * h, y, h);
}

// Convenience: integrate to a fixed time, no observation.
template <class Real, std::size_t N, class Rhs>
StepStats integrate_to(const Rhs& f, State<Real, N>& y, Real t0, Real t1, Real rel, Real abs_tol) {
    return integrate_adaptive<Real, N>(f, y, t0, t1, rel, abs_tol,
                                       [](Real, const State<Real, N>&, const State<Real, N>&) { return true; });
}

} // namespace qclab
