#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qclab/cylinder_ode.hpp"

using namespace qclab;

namespace {
const DimensionParams d5 = make_params(5);
const ToleranceConfig tol{};
} // namespace

TEST_CASE("shooting reproduces frozen necksize orbits (n = 5)") {
    struct Pin {
        double eps, vpp0, period, energy;
    };
    // Independently frozen reference values.
    const Pin pins[] = {
        {0.1, 0.02499951727749, 13.3610004752, -0.00750001200232},
        {0.5, 0.12009899953156, 6.7590978225, -0.18745974601513},
        {0.8, 0.04773675853733, 5.0782067903, -0.42839629374217},
    };
    for (const Pin& p : pins) {
        const auto sol = shoot_delaunay(p.eps, tol, d5);
        CHECK(sol.vpp0 == Catch::Approx(p.vpp0).epsilon(1e-9));
        CHECK(sol.period == Catch::Approx(p.period).epsilon(1e-9));
        CHECK(sol.energy == Catch::Approx(p.energy).epsilon(1e-9));
        CHECK(std::fabs(sol.shoot_residual) < 1e-8);
        CHECK_FALSE(sol.is_constant());
    }
}

TEST_CASE("constant solution at the necksize endpoint") {
    const auto sol = shoot_delaunay(d5.eps_bar, tol, d5);
    CHECK(sol.is_constant());
    CHECK(sol.period == Catch::Approx(5.0429655297463949).epsilon(1e-12));
    CHECK(sol.energy == Catch::Approx(-0.43658387853625606).epsilon(1e-12));
    CHECK(sol.vpp0 == Catch::Approx(0.0).margin(1e-14));
    for (double t : {0.0, 0.7, 2.9, 11.3}) CHECK(sol.v(t) == Catch::Approx(d5.eps_bar).epsilon(1e-13));
}

TEST_CASE("sphere-limit profile has exactly zero Hamiltonian") {
    for (int n = 5; n <= 8; ++n) {
        const auto d = make_params(n);
        for (int i = 0; i < 100; ++i) {
            const double t = -5.0 + 10.0 * i / 99.0;
            CHECK(std::fabs(hamiltonian(sphere_limit(t, d), d)) < 1e-10);
        }
    }
}

TEST_CASE("interpolant conserves the first integral along the orbit") {
    const auto sol = shoot_delaunay(0.5, tol, d5);
    const double H0 = sol.energy;
    for (int i = 0; i <= 200; ++i) {
        const double t = sol.period * 2.0 * i / 200.0; // two periods, folds + mirror
        CHECK(std::fabs(hamiltonian(sol.at(t), d5) - H0) < 1e-12 * std::fabs(H0) + 1e-13);
    }
}

TEST_CASE("orbit interpolant is periodic and even") {
    const auto sol = shoot_delaunay(0.3, tol, d5);
    const double T = sol.period;
    for (double t : {0.37, 1.91, 2.83}) {
        CHECK(sol.v(t) == Catch::Approx(sol.v(t + T)).epsilon(1e-11));
        CHECK(sol.v(-t) == Catch::Approx(sol.v(t)).epsilon(1e-11));
    }
    CHECK(sol.v(0.0) == Catch::Approx(0.3).epsilon(1e-11));
    CHECK(std::fabs(sol.at(0.0).y[1]) < 1e-12);
    CHECK(std::fabs(sol.at(T).y[1]) < 1e-11);
}

TEST_CASE("necksize <-> Hamiltonian inversion round-trips") {
    for (double eps : {0.25, 0.5, 0.75}) {
        const double H = hamiltonian_of_necksize(eps, d5, tol);
        CHECK(necksize_of_hamiltonian(H, d5, tol) == Catch::Approx(eps).epsilon(1e-8));
    }
}

TEST_CASE("energy is strictly decreasing in the necksize") {
    double prev = 0.0;
    bool first = true;
    for (double eps : {0.1, 0.3, 0.5, 0.7, 0.8}) {
        const double H = hamiltonian_of_necksize(eps, d5, tol);
        CHECK(H < 0);
        if (!first) CHECK(H < prev);
        prev = H;
        first = false;
    }
}

TEST_CASE("input guards") {
    CHECK_THROWS_AS(shoot_delaunay(0.0, tol, d5), std::invalid_argument);
    CHECK_THROWS_AS(shoot_delaunay(-0.2, tol, d5), std::invalid_argument);
    CHECK_THROWS_AS(shoot_delaunay(0.9, tol, d5), std::invalid_argument); // above eps_bar
    CHECK_THROWS_AS(hamiltonian_t<double>({-1.0, 0, 0, 0}, d5), std::domain_error);
    CHECK_THROWS_AS(ode_rhs_t<double>({0.0, 0, 0, 0}, d5), std::domain_error);
    ToleranceConfig bad;
    bad.ode_rel = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("periods shrink toward the constant-solution period") {
    const auto near_const = shoot_delaunay(0.99 * d5.eps_bar, tol, d5);
    CHECK(near_const.period == Catch::Approx(5.0429655297463949).epsilon(0.01));
    const auto mid = shoot_delaunay(0.5, tol, d5);
    CHECK(mid.period > near_const.period);
}
