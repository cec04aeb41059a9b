#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "hyplyap/lyapunov.hpp"

using namespace hyplyap;
using hyplyap::testing::bump;
using hyplyap::testing::const_spec;
using hyplyap::testing::two_by_two;
using hyplyap::testing::unit_profile;

TEST_CASE("w1p closed forms") {
    const SystemSpec s = const_spec(1, 1, 1.0, 1001, {1.0}, {0.0}, {0.0});
    const WeightProfile prof = unit_profile(s);
    SUBCASE("zero state") {
        CHECK(w1p(s, prof, GridFunction(1, 1001, 1.0), 8) == 0.0);
    }
    SUBCASE("constant one") {
        GridFunction u(1, 1001, 1.0);
        for (double& v : u.v) v = 1.0;
        for (int p : {1, 4, 64, 512}) CHECK(w1p(s, prof, u, p) == doctest::Approx(1.0));
    }
    SUBCASE("plateau of height 2 on half the domain") {
        GridFunction u(1, 1001, 1.0);
        for (int j = 0; j < 1001; ++j)
            if (s.x(j) <= 0.5) u.at(0, j) = 2.0;
        for (int p : {4, 32, 128}) {
            const double expected = 2.0 * std::pow(0.5, 1.0 / (2.0 * p));
            CHECK(w1p(s, prof, u, p) == doctest::Approx(expected).epsilon(1e-3));
        }
    }
}

TEST_CASE("w2p uses the derived time derivative") {
    const double pi = 3.14159265358979323846;
    const SystemSpec s = const_spec(1, 1, 1.0, 2001, {1.0}, {0.0}, {0.0});
    const WeightProfile prof = unit_profile(s);
    SUBCASE("equilibrium gives a small value") {
        const SystemSpec se = const_spec(1, 1, 1.0, 2001, {1.0}, {1.0}, {0.0});
        GridFunction u(1, 2001, 1.0);
        for (int j = 0; j < 2001; ++j) u.at(0, j) = std::exp(-se.x(j));
        CHECK(w2p(se, prof, u, 16) < 1e-5);
    }
    SUBCASE("sin state matches w1p of the analytic derivative") {
        GridFunction u(1, 2001, 1.0), du(1, 2001, 1.0);
        for (int j = 0; j < 2001; ++j) {
            u.at(0, j) = std::sin(pi * s.x(j));
            du.at(0, j) = pi * std::cos(pi * s.x(j)); // -Lambda u_x
        }
        CHECK(w2p(s, prof, u, 16) == doctest::Approx(w1p(s, prof, du, 16)).epsilon(1e-4));
    }
}

TEST_CASE("v_c1 direct evaluation") {
    const SystemSpec s = const_spec(1, 1, 1.0, 101, {1.0}, {0.0}, {0.0});
    WeightProfile prof(1, 101, 1.0, 4.0);
    GridFunction u(1, 101, 1.0);
    for (double& v : u.v) v = 3.0;
    CHECK(v_c1(s, prof, u) == doctest::Approx(6.0)); // sqrt(4)*3 + 0
}

TEST_CASE("w1p is positively homogeneous in u") {
    const SystemSpec s = two_by_two(1.0, 301, {0, 1, 1, 0}, {0, 0, 0, 0});
    const WeightProfile prof = unit_profile(s);
    const GridFunction u = bump(s, 0, 0.4, 0.2, 0.7);
    GridFunction cu = u;
    for (double& v : cu.v) v *= -12.5;
    CHECK(w1p(s, prof, cu, 32) == doctest::Approx(12.5 * w1p(s, prof, u, 32)).epsilon(1e-13));
}

TEST_CASE("W_p climbs towards the sup-norm pair as p grows") {
    const SystemSpec s = two_by_two(1.0, 801, {0, 0.5, 0.25, 0}, {0, 0, 0, 0});
    WeightProfile prof = unit_profile(s);
    for (int j = 0; j < s.nx; ++j) {
        prof.at(0, j) = 1.0 + 0.5 * std::sin(3.0 * s.x(j));
        prof.at(1, j) = 2.0 - s.x(j);
    }
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unif(0.3, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        GridFunction u = bump(s, 0, 0.35, 0.25, unif(rng));
        const GridFunction u2 = bump(s, 1, 0.6, 0.2, -unif(rng));
        for (std::size_t i = 0; i < u.v.size(); ++i) u.v[i] += u2.v[i];
        const double target = v_c1(s, prof, u);
        double prev_gap = 1e300;
        for (int p : {8, 16, 32, 64, 128, 256}) {
            const double wp = w1p(s, prof, u, p) + w2p(s, prof, u, p);
            const double gap = std::abs(wp - target);
            CHECK(gap < prev_gap * 1.02); // monotone within quadrature noise
            prev_gap = gap;
        }
    }
}

TEST_CASE("v_c1 is equivalent to the C0 pair with the explicit constant") {
    const SystemSpec s = two_by_two(1.0, 401, {0, 1, 0.5, 0}, {0, 0, 0, 0});
    WeightProfile prof = unit_profile(s);
    for (int j = 0; j < s.nx; ++j) {
        prof.at(0, j) = 0.5 + s.x(j);
        prof.at(1, j) = 2.5 - s.x(j);
    }
    prof.mu = 0.1;
    const GridFunction u = bump(s, 0, 0.5, 0.2, 1.3);
    const GridFunction ut = derived_ut(s, u);
    const double pair = u.max_abs() + ut.max_abs();
    const double c = std::max(std::sqrt(prof.max_f()), 1.0 / std::sqrt(prof.min_f())) *
                     std::exp(prof.mu * s.L);
    const double v = v_c1(s, prof, u);
    CHECK(v <= c * pair * (1.0 + 1e-12));
    CHECK(v >= pair / c * (1.0 - 1e-12));
}

TEST_CASE("fit_gamma") {
    SUBCASE("exact exponential") {
        LyapunovSeries ser;
        for (int k = 0; k <= 100; ++k) {
            const double t = 0.1 * k;
            ser.times.push_back(t);
            ser.V.push_back(std::exp(-2.0 * t));
        }
        const GammaFit fit = fit_gamma(ser, 0.0, 10.0);
        CHECK(fit.gamma == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("DecayedToZero") {
        LyapunovSeries ser;
        ser.times = {0.0, 1.0, 2.0};
        ser.V = {1.0, 0.0, 0.0};
        CHECK_THROWS_AS(fit_gamma(ser, 0.0, 2.0), DecayedToZero);
    }
}

TEST_CASE("verify_decrease") {
    LyapunovSeries mono;
    mono.times = {0, 1, 2, 3};
    mono.V = {4.0, 2.0, 1.0, 0.5};
    CHECK(verify_decrease(mono, 1e-3).ok);

    LyapunovSeries bad = mono;
    bad.V = {4.0, 2.0, 2.5, 0.5};
    const DecreaseVerdict v = verify_decrease(bad, 1e-3);
    CHECK_FALSE(v.ok);
    CHECK(v.worst_time == doctest::Approx(2.0));
    CHECK(v.worst_violation == doctest::Approx(0.25));
}
