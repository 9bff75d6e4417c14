#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "qclab/linearization.hpp"

using namespace qclab;

namespace {
const DimensionParams d5 = make_params(5);
const ToleranceConfig tol{};
} // namespace

TEST_CASE("closed-form indicial exponents at the constant solution (n = 5)") {
    struct Pin {
        int j;
        double big, small; // positive real parts of the two root pairs
    };
    // Independently frozen reference values; for j = 0 the small pair is
    // purely imaginary (+- i sqrt(mu)).
    const Pin pins[] = {
        {1, 3.848662413645, 1.299152656849}, {2, 4.866195397849, 2.611540225606},
        {3, 5.881930044066, 3.728659136568}, {4, 6.894979953073, 4.791581309622},
        {5, 7.905694150421, 5.830951894845},
    };
    const auto j0 = cylinder_indicial_closed_form(d5, 0);
    CHECK(j0[0].real() == Catch::Approx(2.837665092655).epsilon(1e-10));
    CHECK(std::fabs(j0[2].real()) < 1e-12);
    CHECK(std::fabs(j0[2].imag()) == Catch::Approx(1.245930647378).epsilon(1e-10));
    CHECK(std::fabs(j0[2].imag()) == Catch::Approx(std::sqrt(d5.mu)).epsilon(1e-12));
    for (const Pin& p : pins) {
        const auto roots = cylinder_indicial_closed_form(d5, p.j);
        CHECK(roots[0].real() == Catch::Approx(p.big).epsilon(1e-10));
        CHECK(roots[2].real() == Catch::Approx(p.small).epsilon(1e-10));
        CHECK(roots[1].real() == Catch::Approx(-p.big).epsilon(1e-10));
        CHECK(roots[3].real() == Catch::Approx(-p.small).epsilon(1e-10));
    }
    CHECK_THROWS_AS(cylinder_indicial_closed_form(d5, -1), std::invalid_argument);
}

TEST_CASE("Floquet exponents of a mid-range orbit match frozen values") {
    const auto sol = shoot_delaunay(0.5, tol, d5);
    const auto set = indicial_roots(sol, 3, 20.0, tol);
    auto gamma_of = [&](int j, int rank) {
        int seen = 0;
        for (const auto& r : set.roots)
            if (r.j == j && seen++ == rank) return r.gamma;
        FAIL("missing root");
        return 0.0;
    };
    CHECK(gamma_of(0, 0) == Catch::Approx(2.7319987555).epsilon(1e-7));
    CHECK(gamma_of(1, 0) == Catch::Approx(1.3563613930).epsilon(1e-7));
    CHECK(gamma_of(1, 1) == Catch::Approx(3.8058139583).epsilon(1e-7));
    CHECK(gamma_of(2, 0) == Catch::Approx(2.6490135027).epsilon(1e-7));
    CHECK(gamma_of(2, 1) == Catch::Approx(4.8429846040).epsilon(1e-7));
    CHECK(gamma_of(3, 0) == Catch::Approx(3.7503280383).epsilon(1e-7));
    CHECK(gamma_of(3, 1) == Catch::Approx(5.8673068691).epsilon(1e-7));
    CHECK(set.gamma_1 == Catch::Approx(1.3563613930).epsilon(1e-7));
    CHECK(set.gamma_1_excl_j0 == Catch::Approx(1.3563613930).epsilon(1e-7));
    CHECK(set.eps == 0.5);
}

TEST_CASE("monodromy preserves the mode symplectic form") {
    // The mode equation conserves the Wronskian-type pairing
    //   S_j(a, b) = a b''' - b a''' + b' a'' - a' b'' + b_j (b a' - a b'),
    // so the monodromy satisfies M^T J M = J with J the matrix of S_j.  The
    // defect scales like the integration error times ||M||^2, which also
    // forces the multipliers into reciprocal pairs.  (det M - 1 itself cannot
    // be read off in double precision: the entries reach 1e8..1e11; the
    // quad-refined invariants cover the determinant exactly.)
    const auto sol = shoot_delaunay(0.5, tol, d5);
    for (int j : {0, 1, 2}) {
        const auto op = mode_operator(sol, j);
        const Eigen::Matrix4d M = monodromy(sol, j, tol);
        Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
        J(0, 1) = -op.b_j;
        J(1, 0) = op.b_j;
        J(0, 3) = 1;
        J(3, 0) = -1;
        J(1, 2) = -1;
        J(2, 1) = 1;
        const Eigen::Matrix4d defect = M.transpose() * J * M - J;
        const double scale = M.squaredNorm() * std::max(1.0, op.b_j);
        CHECK(defect.cwiseAbs().maxCoeff() < 1e-8 * scale);
    }
}

TEST_CASE("translation Jacobi field solves the linearized equation") {
    const auto sol = shoot_delaunay(0.5, tol, d5);
    const auto f = w0_plus(sol);
    REQUIRE(f.kind == JacobiKind::translation);
    const auto op = mode_operator(sol, 0);
    // Finite-difference fourth derivative of w against the mode-0 operator.
    double max_res = 0;
    const double h = 1e-2;
    for (double t : {0.9, 2.1, 3.3, 5.0}) {
        auto w = [&](double s) { return sol.at(s).y[1]; };
        const double d4 =
            (w(t - 2 * h) - 4 * w(t - h) + 6 * w(t) - 4 * w(t + h) + w(t + 2 * h)) / (h * h * h * h);
        const double d2 = (w(t - h) - 2 * w(t) + w(t + h)) / (h * h);
        const double res = d4 - op.b_j * d2 + op.potential(t) * w(t);
        max_res = std::max(max_res, std::fabs(res));
    }
    CHECK(max_res < 1e-3); // limited by the FD truncation, not the field
    // Exact structural checks at t = 0.
    CHECK(f.samples.front().y[0] == Catch::Approx(0.0).margin(1e-14));
    CHECK(f.samples.front().y[1] == Catch::Approx(sol.vpp0).epsilon(1e-12));
}

TEST_CASE("necksize Jacobi field satisfies the Jordan coupling") {
    const auto sol = shoot_delaunay(0.5, tol, d5);
    const auto f = w0_minus(sol, 0, 256, tol);
    REQUIRE(f.kind == JacobiKind::necksize);
    CHECK(f.samples.front().y[0] == 1.0);
    CHECK(f.samples.front().y[1] == 0.0);
    CHECK(f.samples.front().y[2] == Catch::Approx(f.fd_s).epsilon(1e-14));
    // After one period: w0-(T) = w0-(0) + c w0+(0); the value component is
    // unchanged because w0+(0) has zero value component.
    CHECK(f.samples.back().y[0] == Catch::Approx(1.0).epsilon(1e-5));
    CHECK(std::isfinite(f.fd_slope));
    CHECK(f.fd_slope != 0.0);
}

TEST_CASE("constant-solution Jacobi fields are trigonometric") {
    const auto fp = w0_cylinder(d5, +1);
    const auto fm = w0_cylinder(d5, -1);
    const double om = std::sqrt(d5.mu);
    for (std::size_t i : {std::size_t(0), fp.samples.size() / 3, fp.samples.size() - 1}) {
        const double t = fp.samples[i].t;
        CHECK(fp.samples[i].y[0] == Catch::Approx(std::sin(om * t)).margin(1e-12));
        CHECK(fm.samples[i].y[0] == Catch::Approx(std::cos(om * t)).margin(1e-12));
    }
    CHECK_THROWS_AS(w0_cylinder(d5, 0), std::invalid_argument);
}

TEST_CASE("mode nondegeneracy holds for j >= 1") {
    const auto sol = shoot_delaunay(0.4, tol, d5);
    for (int j = 1; j <= 4; ++j) {
        const auto res = verify_mode_nondegeneracy(sol, j, tol);
        CHECK(res.nondegenerate);
        CHECK(res.margin > 0);
    }
    CHECK_THROWS_AS(verify_mode_nondegeneracy(sol, 0, tol), std::invalid_argument);
}

#ifdef QCLAB_HAVE_FLOAT128
TEST_CASE("refined monodromy resolves the unit Jordan pair") {
    const auto sol = shoot_delaunay(0.5 * d5.eps_bar, tol, d5);
    const auto inv = monodromy_refined(sol, 0);
    CHECK(std::fabs(inv.det - 1.0) < 1e-10);
    CHECK(std::fabs(inv.x_unit - 2.0) < 1e-9);
    CHECK(inv.unit_defect < 1e-9);
    CHECK(inv.period == Catch::Approx(7.516782606603).epsilon(1e-9));
    CHECK(inv.gamma == Catch::Approx(2.707250413).epsilon(1e-6));
}
#endif

TEST_CASE("linearization guards") {
    const auto sol = shoot_delaunay(0.5, tol, d5);
    CHECK_THROWS_AS(mode_operator(sol, -2), std::invalid_argument);
    CHECK_THROWS_AS(indicial_roots(sol, 0, 10.0, tol), std::invalid_argument);
    const auto cyl = shoot_delaunay(d5.eps_bar, tol, d5);
    CHECK_THROWS_AS(w0_plus(cyl), std::invalid_argument);
    CHECK_THROWS_AS(w0_minus(cyl), std::invalid_argument);
}
