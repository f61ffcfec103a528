#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ctsynth/grid1d.hpp"
#include "oracle.hpp"

#include <random>

using namespace ctsynth;

namespace {

Interval1D rat_interval(const mpq_class &lo, const mpq_class &hi) {
    return {Endpoint::exact(lo), Endpoint::exact(hi)};
}

mpq_class random_rational(std::mt19937_64 &rng, long range) {
    std::uniform_int_distribution<long> num(-range * 8, range * 8);
    return mpq_class(num(rng), 8);
}

std::vector<ZRootTwo> solve_rat(const mpq_class &a0, const mpq_class &a1, const mpq_class &b0,
                                const mpq_class &b1) {
    return enumerate_grid_1d(rat_interval(a0, a1), rat_interval(b0, b1));
}

} // namespace

TEST_CASE("first non-negative grid points of [-1,1]") {
    auto sol = solve_rat(0, 6, -1, 1);
    std::vector<ZRootTwo> expected = {
        ZRootTwo(mpz_class(0), mpz_class(0)), ZRootTwo(mpz_class(1), mpz_class(0)),
        ZRootTwo(mpz_class(1), mpz_class(1)), ZRootTwo(mpz_class(2), mpz_class(1)),
        ZRootTwo(mpz_class(2), mpz_class(2)), ZRootTwo(mpz_class(3), mpz_class(2))};
    CHECK(sol == expected);
}

TEST_CASE("narrow symmetric pair has no solution") {
    // alpha + alpha_bullet = 2a forces an integer in [0.8, 1.2]
    auto sol = solve_rat(mpq_class(2, 5), mpq_class(3, 5), mpq_class(2, 5), mpq_class(3, 5));
    CHECK(sol.empty());
}

TEST_CASE("unit interval against [-1,1]") {
    auto sol = solve_rat(0, 1, -1, 1);
    std::vector<ZRootTwo> expected = {ZRootTwo(mpz_class(0), mpz_class(0)),
                                      ZRootTwo(mpz_class(1), mpz_class(0))};
    CHECK(sol == expected);
}

TEST_CASE("matches brute force on random rational instances") {
    std::mt19937_64 rng(2024);
    int tested = 0;
    while (tested < 600) {
        mpq_class a0 = random_rational(rng, 10), b0 = random_rational(rng, 10);
        mpq_class w1 = abs(random_rational(rng, 4)), w2 = abs(random_rational(rng, 4));
        mpq_class a1 = a0 + w1, b1 = b0 + w2;
        if (w1 * w2 > 50)
            continue;
        ++tested;
        auto got = solve_rat(a0, a1, b0, b1);
        auto expected =
            oracle::grid1d_brute(QRootTwo(a0), QRootTwo(a1), QRootTwo(b0), QRootTwo(b1), 40);
        CHECK(got == expected);
    }
}

TEST_CASE("count bounds from the interval widths") {
    std::mt19937_64 rng(99);
    int small_checked = 0, large_checked = 0;
    while (small_checked < 500 || large_checked < 500) {
        mpq_class a0 = random_rational(rng, 10), b0 = random_rational(rng, 10);
        mpq_class w1 = abs(random_rational(rng, 3)) + mpq_class(1, 8);
        mpq_class w2 = abs(random_rational(rng, 3)) + mpq_class(1, 8);
        mpq_class prod = w1 * w2;
        // (1+sqrt2)^2 = 3 + 2 sqrt2 < 5.83
        if (prod < 1 && small_checked < 500) {
            ++small_checked;
            CHECK(solve_rat(a0, a0 + w1, b0, b0 + w2).size() <= 1);
        } else if (prod >= 6 && large_checked < 500) {
            ++large_checked;
            CHECK(solve_rat(a0, a0 + w1, b0, b0 + w2).size() >= 1);
        }
    }
}

TEST_CASE("rescaling equivalence") {
    std::mt19937_64 rng(5150);
    const ZRootTwo lam = ZRootTwo::lambda();
    const ZRootTwo lam_inv = ZRootTwo::lambda_inv();
    for (int it = 0; it < 50; ++it) {
        mpq_class a0 = random_rational(rng, 6), b0 = random_rational(rng, 6);
        mpq_class a1 = a0 + abs(random_rational(rng, 3));
        mpq_class b1 = b0 + abs(random_rational(rng, 3));
        auto base = solve_rat(a0, a1, b0, b1);

        // scaled problem: A' = lambda^-1 A, B' = -lambda B
        QRootTwo li(lam_inv), nl(-lam);
        Interval1D As{Endpoint::exact(QRootTwo(a0) * li), Endpoint::exact(QRootTwo(a1) * li)};
        QRootTwo c0 = QRootTwo(b0) * nl, c1 = QRootTwo(b1) * nl;
        if (c1 < c0)
            std::swap(c0, c1);
        Interval1D Bs{Endpoint::exact(c0), Endpoint::exact(c1)};
        auto scaled = enumerate_grid_1d(As, Bs);

        REQUIRE(scaled.size() == base.size());
        for (size_t i = 0; i < base.size(); ++i)
            CHECK(scaled[i] * lam == base[i]);
    }
}

TEST_CASE("approximate endpoints give a superset of the exact solution set") {
    std::mt19937_64 rng(31337);
    for (int it = 0; it < 100; ++it) {
        mpq_class a0 = random_rational(rng, 8), b0 = random_rational(rng, 8);
        mpq_class a1 = a0 + abs(random_rational(rng, 3)), b1 = b0 + abs(random_rational(rng, 3));
        auto exact_set = solve_rat(a0, a1, b0, b1);
        const long prec = 96;
        Interval1D A{Endpoint::approx(RealInterval::from_mpq(a0, prec)),
                     Endpoint::approx(RealInterval::from_mpq(a1, prec))};
        Interval1D B{Endpoint::approx(RealInterval::from_mpq(b0, prec)),
                     Endpoint::approx(RealInterval::from_mpq(b1, prec))};
        auto approx_set = enumerate_grid_1d(A, B, prec);
        for (const auto &alpha : exact_set)
            CHECK(std::find(approx_set.begin(), approx_set.end(), alpha) != approx_set.end());
    }
}
