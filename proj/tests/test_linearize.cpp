#include <doctest.h>

#include <cmath>

#include "hyplyap/linearize.hpp"

using namespace hyplyap;

namespace {

PhysicalSystem constant_system(int n, int nx, std::vector<double> F_c,
                               std::vector<double> ystar_row) {
    PhysicalSystem p;
    p.n = n;
    p.nx = nx;
    p.L = 1.0;
    p.F = [F_c](const std::vector<double>&) { return F_c; };
    p.D = [n](const std::vector<double>&) { return std::vector<double>(n, 0.0); };
    p.ystar.resize(static_cast<std::size_t>(n) * nx);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < nx; ++j) p.ystar[static_cast<std::size_t>(i) * nx + j] = ystar_row[i];
    return p;
}

} // namespace

TEST_CASE("already-diagonal F gives identity N") {
    PhysicalSystem p = constant_system(2, 11, {1, 0, 0, -1}, {0.3, -0.2});
    const Diagonalization d = diagonalize(p);
    CHECK(d.m_pos == 1);
    for (int j = 0; j < 11; ++j) {
        CHECK(d.lambda[0 * 11 + j] == doctest::Approx(1.0));
        CHECK(d.lambda[1 * 11 + j] == doctest::Approx(-1.0));
        CHECK(d.n_at(0, 0, j) == doctest::Approx(1.0));
        CHECK(d.n_at(0, 1, j) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("swap matrix diagonalizes with tight residuals") {
    PhysicalSystem p = constant_system(2, 7, {0, 1, 1, 0}, {0.0, 0.0});
    const Diagonalization d = diagonalize(p);
    CHECK(d.max_offdiag_residual <= 1e-10);
    for (int j = 0; j < 7; ++j) {
        CHECK(d.lambda[0 * 7 + j] == doctest::Approx(1.0));
        CHECK(d.lambda[1 * 7 + j] == doctest::Approx(-1.0));
        // N N^{-1} = Id within 1e-12
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double s = 0.0;
                for (int k = 0; k < 2; ++k) s += d.n_at(a, k, j) * d.ninv_at(k, b, j);
                CHECK(s == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
            }
    }
}

TEST_CASE("failure modes") {
    SUBCASE("complex eigenvalues") {
        PhysicalSystem p = constant_system(2, 5, {0, -1, 1, 0}, {0.0, 0.0}); // rotation
        CHECK_THROWS_AS(diagonalize(p), EigenFailure);
    }
    SUBCASE("repeated eigenvalues") {
        PhysicalSystem p = constant_system(2, 5, {1, 0, 0, 1}, {0.0, 0.0});
        CHECK_THROWS_AS(diagonalize(p), EigenFailure);
    }
    SUBCASE("vanishing eigenvalue") {
        PhysicalSystem p = constant_system(2, 5, {0, 0, 0, 1}, {0.0, 0.0});
        CHECK_THROWS_AS(diagonalize(p), EigenFailure);
    }
}

TEST_CASE("x-dependent family keeps continuous eigenvectors") {
    // smoothly varying symmetric matrix with distinct nonzero eigenvalues
    PhysicalSystem p;
    p.n = 2;
    p.nx = 51;
    p.L = 1.0;
    p.F = [](const std::vector<double>& y) {
        const double t = y[0]; // encode x through the steady state
        return std::vector<double>{2.0 + 0.2 * std::sin(t), 0.3 * std::cos(t),
                                   0.3 * std::cos(t), -1.0 - 0.2 * t};
    };
    p.D = [](const std::vector<double>&) { return std::vector<double>{0.0, 0.0}; };
    p.ystar.resize(2 * 51);
    for (int j = 0; j < 51; ++j) {
        p.ystar[j] = static_cast<double>(j) / 50.0;
        p.ystar[51 + j] = 0.0;
    }
    const Diagonalization d = diagonalize(p);
    for (int j = 1; j < 51; ++j) {
        for (int c = 0; c < 2; ++c) {
            // node-to-node angle below pi/2: positive dot product of columns
            double dot = 0.0, na = 0.0, nb = 0.0;
            for (int i = 0; i < 2; ++i) {
                const double va = d.ninv_at(i, c, j - 1);
                const double vb = d.ninv_at(i, c, j);
                dot += va * vb;
                na += va * va;
                nb += vb * vb;
            }
            CHECK(dot / std::sqrt(na * nb) > 0.0);
        }
    }
}

TEST_CASE("linearized_source") {
    SUBCASE("no source, uniform steady state: M = 0") {
        PhysicalSystem p = constant_system(2, 11, {1, 0, 0, -1}, {0.0, 0.0});
        const Diagonalization d = diagonalize(p);
        const std::vector<double> M = linearized_source(p, d);
        for (double v : M) CHECK(std::abs(v) <= 1e-9);
    }
    SUBCASE("linear drag D = cY recovers M = c") {
        const double c = 0.8;
        PhysicalSystem p;
        p.n = 1;
        p.nx = 21;
        p.L = 1.0;
        p.F = [](const std::vector<double>&) { return std::vector<double>{1.0}; };
        p.D = [c](const std::vector<double>& y) { return std::vector<double>{c * y[0]}; };
        p.ystar.assign(21, 0.0);
        const Diagonalization d = diagonalize(p);
        const std::vector<double> M = linearized_source(p, d);
        for (int j = 0; j < 21; ++j) CHECK(M[j] == doctest::Approx(c).epsilon(1e-8));
    }
    SUBCASE("forward-difference cross-check at h/2") {
        // nonlinear D, nonuniform-ish but steady: Y* = 0 keeps F(Y*) Y*_x + D(Y*) = 0
        PhysicalSystem p;
        p.n = 2;
        p.nx = 31;
        p.L = 1.0;
        p.F = [](const std::vector<double>& y) {
            return std::vector<double>{1.5 + 0.1 * y[1], 0.0, 0.0, -0.8};
        };
        p.D = [](const std::vector<double>& y) {
            return std::vector<double>{0.4 * y[0] + 0.2 * std::sin(y[1]),
                                       0.1 * y[0] * y[0] - 0.3 * y[1]};
        };
        p.ystar.assign(2 * 31, 0.0);
        const Diagonalization d = diagonalize(p);
        const std::vector<double> M = linearized_source(p, d);
        // analytic Jacobian of D at 0: [[0.4, 0.2], [0, -0.3]]
        for (int j = 0; j < 31; ++j) {
            CHECK(M[(0 * 2 + 0) * 31 + j] == doctest::Approx(0.4).epsilon(1e-5));
            CHECK(M[(0 * 2 + 1) * 31 + j] == doctest::Approx(0.2).epsilon(1e-5));
            CHECK(M[(1 * 2 + 0) * 31 + j] == doctest::Approx(0.0).epsilon(1e-5));
            CHECK(M[(1 * 2 + 1) * 31 + j] == doctest::Approx(-0.3).epsilon(1e-5));
        }
    }
    SUBCASE("assembled spec validates") {
        PhysicalSystem p = constant_system(2, 11, {0, 1, 1, 0}, {0.0, 0.0});
        const Diagonalization d = diagonalize(p);
        const std::vector<double> M = linearized_source(p, d);
        const SystemSpec s = to_system_spec(p, d, M, {0.0, 0.0, 0.0, 0.0});
        CHECK(s.m_pos == 1);
        CHECK(s.lam(0, 5) == doctest::Approx(1.0));
    }
    SUBCASE("steady-state violation is caught") {
        PhysicalSystem p;
        p.n = 1;
        p.nx = 11;
        p.L = 1.0;
        p.F = [](const std::vector<double>&) { return std::vector<double>{1.0}; };
        p.D = [](const std::vector<double>&) { return std::vector<double>{0.5}; }; // not steady
        p.ystar.assign(11, 0.0);
        const Diagonalization d = diagonalize(p);
        CHECK(steady_state_residual(p) > tol_steady(p));
        CHECK_THROWS_AS(linearized_source(p, d), SteadyStateViolation);
    }
}
