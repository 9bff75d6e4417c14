#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qclab/dimension.hpp"

using namespace qclab;

TEST_CASE("dimension constants for n = 5") {
    const auto d = make_params(5);
    CHECK(d.n == 5);
    CHECK(d.p_exp == Catch::Approx(9.0).epsilon(1e-15));
    CHECK(d.c2 == Catch::Approx(6.5).epsilon(1e-15));
    CHECK(d.c0 == Catch::Approx(1.5625).epsilon(1e-15));
    CHECK(d.c_nl == Catch::Approx(6.5625).epsilon(1e-15));
    CHECK(d.c_lin == Catch::Approx(59.0625).epsilon(1e-15));
    CHECK(d.q_target == Catch::Approx(13.125).epsilon(1e-15));
    CHECK(d.eps_bar == Catch::Approx(0.83578358781326264).epsilon(1e-13));
    CHECK(d.mu == Catch::Approx(1.5523431780746365).epsilon(1e-13));
}

TEST_CASE("dimension guard rejects n <= 4") {
    CHECK_THROWS_AS(make_params(4), std::invalid_argument);
    CHECK_THROWS_AS(make_params(0), std::invalid_argument);
    CHECK_THROWS_AS(make_params(-3), std::invalid_argument);
}

TEST_CASE("constant solution balances the ODE coefficients for n = 5..8") {
    // c0 eps_bar = c_nl eps_bar^p, i.e. eps_bar^{p-1} = c0 / c_nl.
    for (int n = 5; n <= 8; ++n) {
        const auto d = make_params(n);
        CHECK(std::pow(d.eps_bar, d.p_exp - 1.0) == Catch::Approx(d.c0 / d.c_nl).epsilon(1e-13));
        CHECK(d.eps_bar > 0);
        CHECK(d.eps_bar < 1.0);
        CHECK(d.mu > 0);
    }
}

TEST_CASE("small-oscillation frequency solves the linearized quartic") {
    // mu satisfies mu^2 + (c2 - 2 c0/eps-bar-independent shift) ... directly:
    // gamma = i sqrt(mu) must be a root of gamma^4 - c2 gamma^2 + (c_lin - c0)
    // evaluated at the constant solution, where the linear potential is
    // c0 - c_lin eps_bar^{p-1} = c0 (1 - c_lin/c_nl).
    for (int n = 5; n <= 8; ++n) {
        const auto d = make_params(n);
        const double V = d.c0 - d.c_lin * (d.c0 / d.c_nl);
        const double res = d.mu * d.mu + d.c2 * d.mu + V;
        CHECK(std::fabs(res) < 1e-9 * std::max(1.0, std::fabs(V)));
    }
}

TEST_CASE("sphere eigenvalues and multiplicities for n = 5") {
    CHECK(sphere_eigenvalue(5, 0).lambda == 0.0);
    CHECK(sphere_eigenvalue(5, 0).multiplicity == 1);
    CHECK(sphere_eigenvalue(5, 1).lambda == 5.0);
    CHECK(sphere_eigenvalue(5, 1).multiplicity == 5);
    CHECK(sphere_eigenvalue(5, 2).lambda == 12.0);
    CHECK(sphere_eigenvalue(5, 2).multiplicity == 16);
    CHECK(sphere_eigenvalue(5, 3).lambda == 21.0);
    CHECK(sphere_eigenvalue(5, 3).multiplicity == 40);
    CHECK_THROWS_AS(sphere_eigenvalue(5, -1), std::invalid_argument);
}
