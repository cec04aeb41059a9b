#include <doctest.h>

#include <cmath>
#include <random>

#include "hyplyap/lemma.hpp"

using namespace hyplyap;

namespace {

LemmaInstance const_inst(int n, const std::vector<double>& a, const std::vector<double>& b) {
    LemmaInstance in;
    in.n = n;
    in.nx = 1;
    in.a = a;
    in.b = b;
    return in;
}

} // namespace

TEST_CASE("check_iii / check_ii arithmetic") {
    SUBCASE("decoupled") {
        const auto v = check_iii(const_inst(2, {1, 1}, {0, 0, 0, 0}));
        CHECK(v.holds);
        CHECK(v.min_margin == doctest::Approx(1.0));
    }
    SUBCASE("symmetric half coupling") {
        const auto v = check_iii(const_inst(2, {1, 1}, {0, 0.5, 0.5, 0}));
        CHECK(v.holds);
        CHECK(v.min_margin == doctest::Approx(0.5));
    }
    SUBCASE("fails on the weak row") {
        const auto v = check_iii(const_inst(2, {0.4, 1}, {0, 0.5, 0.5, 0}));
        CHECK_FALSE(v.holds);
        CHECK(v.margins[0] == doctest::Approx(-0.1));
    }
}

TEST_CASE("brute_force_i") {
    SUBCASE("n = 1 single-term sum") {
        const auto r = brute_force_i(const_inst(1, {1}, {-0.5}), 4);
        CHECK(r.min_value == doctest::Approx(0.5));
        CHECK(std::abs(r.argmin_y[0]) == doctest::Approx(1.0));
    }
    SUBCASE("strict (iii) instance is positive at p = 8") {
        const auto r = brute_force_i(const_inst(2, {1, 1}, {0, 0.5, 0.5, 0}), 8);
        CHECK(r.min_value > 0.0);
    }
    SUBCASE("(ii)-violating instance is negative at p = 32, argmin near the proof's vector") {
        const auto r = brute_force_i(const_inst(2, {1, 1}, {0, 1.5, 1.5, 0}), 32);
        CHECK(r.min_value < 0.0);
        // argmin pattern: one coordinate at 1, the other near -sgn(b) m/(m+1)
        const double a0 = std::abs(r.argmin_y[0]), a1 = std::abs(r.argmin_y[1]);
        const double hi = std::max(a0, a1), lo = std::min(a0, a1);
        CHECK(hi == doctest::Approx(1.0));
        CHECK(lo > 0.8);
        CHECK(lo < 1.0 + 1e-12);
        CHECK(r.argmin_y[0] * r.argmin_y[1] < 0.0); // opposite signs against b > 0
    }
    SUBCASE("permutation invariance") {
        const LemmaInstance in = const_inst(3, {1.0, 0.7, 1.3},
                                            {0, 0.2, -0.1, 0.3, 0, 0.15, -0.25, 0.1, 0});
        LemmaInstance perm = const_inst(3, {0.7, 1.3, 1.0},
                                        {0, 0.15, 0.3, 0.1, 0, -0.25, 0.2, -0.1, 0});
        const auto r1 = brute_force_i(in, 8, 101);
        const auto r2 = brute_force_i(perm, 8, 101);
        CHECK(r1.min_value == doctest::Approx(r2.min_value).epsilon(1e-12));
    }
    SUBCASE("cost guard") {
        LemmaInstance big;
        big.n = 7;
        big.nx = 1;
        big.a.assign(7, 1.0);
        big.b.assign(49, 0.0);
        CHECK_THROWS_AS(brute_force_i(big, 2), CombinatorialLimit);
    }
}

TEST_CASE("monotone in p once positive") {
    const LemmaInstance in = const_inst(2, {1, 1}, {0, 0.5, 0.5, 0});
    const auto r = find_p1(in, 64, 101);
    REQUIRE(r.p_found.has_value());
    const int p = *r.p_found;
    for (int q : {p, 2 * p, 4 * p}) CHECK(brute_force_i(in, q, 101).min_value > 0.0);
}

TEST_CASE("find_p1") {
    SUBCASE("b = 0 gives p = 1") {
        const auto r = find_p1(const_inst(2, {1, 1}, {0, 0, 0, 0}), 16);
        CHECK(r.p_found == 1);
        CHECK(r.p_analytic == 1);
    }
    SUBCASE("symmetric half coupling: analytic bound 1") {
        const auto r = find_p1(const_inst(2, {1, 1}, {0, 0.5, 0.5, 0}), 64);
        REQUIRE(r.p_found.has_value());
        CHECK(r.p_analytic == 1);
        CHECK(*r.p_found <= r.p_analytic);
    }
    SUBCASE("requires strict (iii)") {
        CHECK_THROWS_AS(find_p1(const_inst(2, {0.4, 1}, {0, 0.5, 0.5, 0}), 16), DomainError);
    }
    SUBCASE("random strict 3x3 instances stay within the analytic bound") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> au(1.2, 2.2), bu(-0.4, 0.4);
        for (int trial = 0; trial < 10; ++trial) {
            LemmaInstance in;
            in.n = 3;
            in.nx = 1;
            in.a.resize(3);
            in.b.assign(9, 0.0);
            for (double& a : in.a) a = au(rng);
            for (int i = 0; i < 3; ++i)
                for (int k = 0; k < 3; ++k)
                    if (i != k) in.b_at(i, k, 0) = bu(rng);
            REQUIRE(check_iii(in).holds);
            const auto r = find_p1(in, 256, 101);
            REQUIRE(r.p_found.has_value());
            // doubling ladder: found p is within a factor 2 of the smallest
            CHECK(*r.p_found <= 2 * r.p_analytic);
            CHECK(brute_force_i(in, r.p_analytic, 101).min_value > 0.0);
        }
    }
}

TEST_CASE("contrapositive: a (ii) violation shows up at p = 64") {
    LemmaInstance in = const_inst(3, {1.5, 0.3, 1.5},
                                  {0, 0.1, 0.1, 1.0, 0, 1.0, 0.1, 0.1, 0});
    REQUIRE_FALSE(check_ii(in).holds);
    const auto r = brute_force_i(in, 64);
    CHECK(r.min_value < 0.0);
    CHECK(r.exact_negative);
}
