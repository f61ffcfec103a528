#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ctsynth/grid2d.hpp"
#include "oracle.hpp"

#include <cmath>
#include <random>

using namespace ctsynth;

namespace {

std::mt19937_64 &rng() {
    static std::mt19937_64 r(20240817);
    return r;
}

double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng());
}

RealInterval iv_from_double(double x, long prec) {
    BigFloat l(prec), h(prec);
    mpfr_set_d(l.raw(), x, MPFR_RNDD);
    mpfr_set_d(h.raw(), x, MPFR_RNDU);
    return {l, h};
}

// random determinant-1 pair with z, zeta in [-zr, zr] and given b, beta
State make_state(double b1, double z1, double b2, double z2, long prec) {
    auto side = [&](double b, double z) {
        double e = std::sqrt(1.0 + b * b);
        double lam = 1.0 + std::sqrt(2.0);
        SymMat m;
        m.a = iv_from_double(e * std::pow(lam, -z), prec);
        m.b = iv_from_double(b, prec);
        m.d = iv_from_double(e * std::pow(lam, z), prec);
        return m;
    };
    State s;
    s.d1 = side(b1, z1);
    s.d2 = side(b2, z2);
    s.prec = prec;
    return s;
}

GridOperator random_grid_operator(int depth) {
    GridOperator g = GridOperator::identity();
    std::uniform_int_distribution<int> pick(0, 5);
    std::uniform_int_distribution<int> npick(1, 3);
    for (int i = 0; i < depth; ++i) {
        switch (pick(rng())) {
        case 0:
            g = g * GridOperator::R();
            break;
        case 1:
            g = g * GridOperator::K();
            break;
        case 2:
            g = g * GridOperator::A_pow(npick(rng()));
            break;
        case 3:
            g = g * GridOperator::B_pow(npick(rng()));
            break;
        case 4:
            g = g * GridOperator::X();
            break;
        default:
            g = g * GridOperator::Z();
            break;
        }
    }
    return g;
}

ZOmega random_zomega(long bound) {
    std::uniform_int_distribution<long> d(-bound, bound);
    return {mpz_class(d(rng())), mpz_class(d(rng())), mpz_class(d(rng())), mpz_class(d(rng()))};
}

bool in_disk(const ZOmega &u, const DRootTwo &r2) {
    return DOmega::from_zomega(u).abs_sq() <= r2;
}

} // namespace

TEST_CASE("step constants satisfy the full inequality ledger") {
    auto bad = verify_step_constants(1e-9);
    for (const auto &name : bad)
        MESSAGE("violated: ", name);
    CHECK(bad.empty());
}

TEST_CASE("uprightness closed forms") {
    const long prec = 128;
    Ellipse disk = Ellipse::unit_disk(prec);
    CHECK(disk.uprightness(prec).mid_double() == doctest::Approx(3.14159265 / 4).epsilon(1e-6));

    // diag(lambda^-z, lambda^z) is as upright as a disk
    State s = make_state(0.0, 1.7, 0.0, 0.0, prec);
    Ellipse e{s.d1, RealInterval::point_long(0, prec), RealInterval::point_long(0, prec)};
    CHECK(e.uprightness(prec).mid_double() == doctest::Approx(3.14159265 / 4).epsilon(1e-6));

    Ellipse f;
    f.mat.a = iv_from_double(3.0, prec);
    f.mat.b = iv_from_double(4.0, prec);
    f.mat.d = iv_from_double(5.5, prec);
    f.cx = RealInterval::point_long(0, prec);
    f.cy = RealInterval::point_long(0, prec);
    CHECK(f.uprightness(prec).mid_double() ==
          doctest::Approx((3.14159265 / 4) * std::sqrt(0.5 / 16.5)).epsilon(1e-6));

    // bounding boxes
    auto bx = disk.bbox_x(prec), by = disk.bbox_y(prec);
    CHECK(bx.lo.enclosure(prec).mid_double() == doctest::Approx(-1.0));
    CHECK(by.hi.enclosure(prec).mid_double() == doctest::Approx(1.0));

    Ellipse g;
    g.mat.a = iv_from_double(0.25, prec);
    g.mat.b = RealInterval::point_long(0, prec);
    g.mat.d = RealInterval::point_long(1, prec);
    g.cx = RealInterval::point_long(0, prec);
    g.cy = RealInterval::point_long(0, prec);
    CHECK(g.bbox_x(prec).hi.enclosure(prec).mid_double() == doctest::Approx(2.0));
    CHECK(g.bbox_y(prec).hi.enclosure(prec).mid_double() == doctest::Approx(1.0));

    CHECK(f.bbox_x(prec).hi.enclosure(prec).mid_double() == doctest::Approx(std::sqrt(11.0)));
    CHECK(f.bbox_y(prec).hi.enclosure(prec).mid_double() == doctest::Approx(std::sqrt(6.0)));
}

TEST_CASE("grid operators: parity conditions and closure") {
    std::vector<GridOperator> basics = {GridOperator::identity(), GridOperator::R(),
                                        GridOperator::K(),        GridOperator::X(),
                                        GridOperator::Z(),        GridOperator::A_pow(3),
                                        GridOperator::B_pow(2)};
    for (const auto &g : basics) {
        CHECK(g.is_grid_operator());
        CHECK(g.is_special());
        CHECK(g.bullet().is_grid_operator());
        CHECK((g * g.inverse()) == GridOperator::identity());
        CHECK(g.inverse().is_grid_operator());
    }
    for (int it = 0; it < 200; ++it) {
        GridOperator g = random_grid_operator(6);
        CHECK(g.is_grid_operator());
        CHECK(g.is_special());
        CHECK((g * g.inverse()) == GridOperator::identity());
    }
}

TEST_CASE("grid operators act on the lattice and commute with bullet") {
    for (int it = 0; it < 1000; ++it) {
        GridOperator g = random_grid_operator(5);
        ZOmega u = random_zomega(50);
        ZOmega gu = g.apply(u);
        CHECK(g.bullet().apply(u.bullet()) == gu.bullet());
    }
    // lattice preservation round trip
    for (int it = 0; it < 200; ++it) {
        GridOperator g = random_grid_operator(5);
        ZOmega u = random_zomega(50);
        CHECK(g.inverse().apply(g.apply(u)) == u);
    }
}

TEST_CASE("shift conjugation law") {
    for (long k = -4; k <= 4; ++k) {
        for (int it = 0; it < 40; ++it) {
            GridOperator g = random_grid_operator(4);
            GridOperator c = g.sigma_conj(k);
            CHECK(c.is_grid_operator());
            CHECK(c.is_special());
            // (sigma^k G sigma^k)^bullet = (-tau)^k G^bullet tau^k, whose
            // entries are [[(-1)^k l^-k w~, x~], [y~, (-1)^k l^k v~]]
            GridOperator lhs = c.bullet();
            ZRootTwo lk = ZRootTwo::lambda().pow(k);
            ZRootTwo lnk = ZRootTwo::lambda().pow(-k);
            ZRootTwo sign = k % 2 == 0 ? ZRootTwo::one() : -ZRootTwo::one();
            GridOperator rhs{g.m00.bullet() * DRootTwo::from_zroottwo(lnk * sign), g.m01.bullet(),
                             g.m10.bullet(), g.m11.bullet() * DRootTwo::from_zroottwo(lk * sign)};
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("shift changes the bias by 2k and keeps the skew") {
    const long prec = 160;
    for (int it = 0; it < 50; ++it) {
        State s = make_state(uniform(-5, 5), uniform(-3, 3), uniform(-5, 5), uniform(-3, 3), prec);
        double sk = s.skew().mid_double();
        double bias = s.bias().mid_double();
        for (long k : {-2L, 1L, 3L}) {
            // shift = conjugation by sigma^k / tau^k on the two sides
            State sh;
            sh.prec = prec;
            RealInterval lk = iv_exp(
                iv_mul(RealInterval::point_long(k, prec),
                       iv_log(iv_add(RealInterval::point_long(1, prec), RealInterval::sqrt2(prec),
                                     prec),
                              prec),
                       prec),
                prec);
            sh.d1.a = iv_mul(s.d1.a, lk, prec);
            sh.d1.b = s.d1.b;
            sh.d1.d = iv_div(s.d1.d, lk, prec);
            sh.d2.a = iv_div(s.d2.a, lk, prec);
            sh.d2.b = s.d2.b;
            sh.d2.d = iv_mul(s.d2.d, lk, prec);
            CHECK(sh.skew().mid_double() == doctest::Approx(sk).epsilon(1e-9));
            CHECK(sh.bias().mid_double() == doctest::Approx(bias + 2 * k).epsilon(1e-9));
        }
    }
}

TEST_CASE("X and Z symmetries of states") {
    const long prec = 160;
    for (int it = 0; it < 100; ++it) {
        State s = make_state(uniform(-5, 5), uniform(-3, 3), uniform(-5, 5), uniform(-3, 3), prec);
        State sz = s.applied(GridOperator::Z());
        CHECK(sz.d1.b.mid_double() == doctest::Approx(-s.d1.b.mid_double()).epsilon(1e-9));
        CHECK(sz.d2.b.mid_double() == doctest::Approx(-s.d2.b.mid_double()).epsilon(1e-9));
        CHECK(sz.bias().mid_double() == doctest::Approx(s.bias().mid_double()).epsilon(1e-8));
        State sx = s.applied(GridOperator::X());
        CHECK(sx.d1.a.mid_double() == doctest::Approx(s.d1.d.mid_double()).epsilon(1e-9));
        CHECK(sx.d1.d.mid_double() == doctest::Approx(s.d1.a.mid_double()).epsilon(1e-9));
        CHECK(sx.bias().mid_double() == doctest::Approx(-s.bias().mid_double()).epsilon(1e-8));
    }
}

TEST_CASE("Step Lemma: one step contracts the skew by Q") {
    const long prec = 192;
    const StepConstants &C = step_constants();
    const double P = C.P.get_d(), Q = C.Q.get_d();
    int done = 0;
    while (done < 1000) {
        double target = std::pow(10.0, uniform(std::log10(P), 8.0));
        double b1 = std::sqrt(target) * uniform(0.05, 0.95);
        double b2 = std::sqrt(target - b1 * b1);
        if (uniform(0, 1) < 0.5)
            b1 = -b1;
        if (uniform(0, 1) < 0.5)
            b2 = -b2;
        State s = make_state(b1, uniform(-4, 4), b2, uniform(-4, 4), prec);
        double sk = s.skew().mid_double();
        if (sk < P)
            continue;
        ++done;
        GridOperator g = step_operator(s);
        CHECK(g.is_special());
        State s2 = s.applied(g);
        RealInterval sk2 = s2.skew();
        RealInterval bound = iv_mul(RealInterval::from_mpq(C.Q, prec), s.skew(), prec);
        // certified: upper enclosure of the new skew below Q * skew
        CHECK(sk2.hi.to_double() <= bound.hi.to_double() * (1 + 1e-12));
        (void)Q;
    }
}

TEST_CASE("reduce_skew terminates within the contraction bound") {
    const long prec = 192;
    const StepConstants &C = step_constants();
    const double P = C.P.get_d(), Q = C.Q.get_d();
    for (int it = 0; it < 10; ++it) {
        double target = 1e6;
        double b1 = std::sqrt(target) * 0.8, b2 = std::sqrt(target - b1 * b1);
        Ellipse A, B;
        State s = make_state(b1, uniform(-2, 2), b2, uniform(-2, 2), prec);
        A.mat = s.d1;
        B.mat = s.d2;
        A.cx = A.cy = B.cx = B.cy = RealInterval::point_long(0, prec);
        SkewReduction red = reduce_skew(A, B, prec);
        double sk0 = s.skew().mid_double();
        long bound = static_cast<long>(std::ceil(std::log(sk0 / P) / std::log(1 / Q))) + 1;
        CHECK(red.iterations <= bound);
        CHECK(red.final_skew.mid_double() <= P + 1e-9);
        // uprightness guarantee on the transformed ellipses
        auto [TA, TB] = apply_grid_operator(A, B, red.G, prec);
        double up_min = (3.141592653589793 / 4) / std::sqrt(P + 1);
        CHECK(TA.uprightness(prec).mid_double() >= up_min - 1e-9);
        CHECK(TB.uprightness(prec).mid_double() >= up_min - 1e-9);
    }
    // already-upright pair: identity operator, zero iterations
    Ellipse D1 = Ellipse::unit_disk(prec), D2 = Ellipse::unit_disk(prec);
    SkewReduction red = reduce_skew(D1, D2, prec);
    CHECK(red.iterations == 0);
    CHECK(red.G == GridOperator::identity());
}

TEST_CASE("upright rectangle enumeration matches brute force") {
    Rect A{{Endpoint::exact(mpq_class(-1)), Endpoint::exact(mpq_class(1))},
           {Endpoint::exact(mpq_class(-1)), Endpoint::exact(mpq_class(1))}};
    auto got = enumerate_upright_rects(A, A);
    auto in_box = [](const ZOmega &u) {
        auto d = decompose_real_imag(u);
        QRootTwo x(d.alpha), y(d.beta);
        if (d.omega_offset) {
            x = x + QRootTwo(mpq_class(0), mpq_class(1, 2));
            y = y + QRootTwo(mpq_class(0), mpq_class(1, 2));
        }
        QRootTwo one(mpq_class(1));
        return -one <= x && x <= one && -one <= y && y <= one;
    };
    auto expected = oracle::grid2d_brute(4, in_box, in_box);
    CHECK(got.size() == expected.size());
    for (const auto &u : expected)
        CHECK(std::find(got.begin(), got.end(), u) != got.end());

    // a tiny box pair only admits the origin
    Rect T{{Endpoint::exact(mpq_class(-1, 10)), Endpoint::exact(mpq_class(1, 10))},
           {Endpoint::exact(mpq_class(-1, 10)), Endpoint::exact(mpq_class(1, 10))}};
    auto tiny = enumerate_upright_rects(T, T);
    REQUIRE(tiny.size() == 1);
    CHECK(tiny[0] == ZOmega(0));
}

TEST_CASE("translation equivariance of rectangle problems") {
    // translating A by an integer and B by its conjugate preserves counts
    Rect A{{Endpoint::exact(mpq_class(-1)), Endpoint::exact(mpq_class(1))},
           {Endpoint::exact(mpq_class(-1)), Endpoint::exact(mpq_class(1))}};
    auto base = enumerate_upright_rects(A, A);
    QRootTwo ten(mpq_class(10));
    Rect A2{{Endpoint::exact(QRootTwo(mpq_class(-1)) + ten), Endpoint::exact(QRootTwo(mpq_class(1)) + ten)},
            {Endpoint::exact(mpq_class(-1)), Endpoint::exact(mpq_class(1))}};
    Rect B2{{Endpoint::exact(QRootTwo(mpq_class(-1)) + ten), Endpoint::exact(QRootTwo(mpq_class(1)) + ten)},
            {Endpoint::exact(mpq_class(-1)), Endpoint::exact(mpq_class(1))}};
    auto shifted = enumerate_upright_rects(A2, B2);
    CHECK(shifted.size() == base.size());
}

TEST_CASE("enumerate_convex: disk examples") {
    const long prec = 128;
    // Both regions the disk of radius sqrt2: the 17-point configuration
    DiskRegion big(DRootTwo(2));
    auto got = enumerate_convex(big, big, prec);
    auto pred = [](const ZOmega &u) { return in_disk(u, DRootTwo(2)); };
    auto expected = oracle::grid2d_brute(3, pred, pred);
    CHECK(got.size() == 17);
    CHECK(got.size() == expected.size());
    for (const auto &u : expected)
        CHECK(std::find(got.begin(), got.end(), u) != got.end());

    // tiny disk against the unit disk: only the origin
    DiskRegion tiny(DRootTwo(ZRootTwo(mpz_class(1), mpz_class(0)), 26)); // 2^-13
    DiskRegion unit;
    auto small = enumerate_convex(tiny, unit, prec);
    REQUIRE(small.size() == 1);
    CHECK(small[0] == ZOmega(0));
}

TEST_CASE("enumerate_convex matches brute force on random disk pairs") {
    const long prec = 128;
    int tested = 0;
    while (tested < 40) {
        // rational radii^2 in [1/2, 9]
        mpq_class r1(std::uniform_int_distribution<long>(1, 18)(rng()), 2);
        mpq_class r2(std::uniform_int_distribution<long>(1, 18)(rng()), 2);
        ++tested;
        DRootTwo rr1(ZRootTwo(r1.get_num(), mpz_class(0)), 0);
        // encode rational r/2 = (2 r)/4 ... use DRootTwo over power of sqrt2: r1 = num/2
        // simpler: scale to quarters: radius^2 = num/2 = 2*num / 4 = (2 num)/sqrt2^4
        DRootTwo rad1(ZRootTwo(2 * r1.get_num(), mpz_class(0)), 4);
        DRootTwo rad2(ZRootTwo(2 * r2.get_num(), mpz_class(0)), 4);
        DiskRegion A(rad1), B(rad2);
        auto got = enumerate_convex(A, B, prec);
        auto predA = [&](const ZOmega &u) { return in_disk(u, rad1); };
        auto predB = [&](const ZOmega &u) { return in_disk(u, rad2); };
        auto expected = oracle::grid2d_brute(8, predA, predB);
        CHECK(got.size() == expected.size());
        for (const auto &u : expected)
            CHECK(std::find(got.begin(), got.end(), u) != got.end());
    }
}

TEST_CASE("scaled stream: level structure over disk pairs") {
    const long prec = 128;
    DiskRegion unit;
    ScaledGridStream stream(unit, unit, prec);

    // level 0 of the unit disk pair: 0 and the eight omega powers
    auto l0 = stream.level(0);
    CHECK(l0.size() == 9);
    for (const auto &u : l0) {
        CHECK(u.k() == 0);
        bool ok = u == DOmega(0);
        for (long j = 0; j < 8 && !ok; ++j)
            ok = u == DOmega(ZOmega::omega_power(j), 0);
        CHECK(ok);
    }

    // levels partition by least denominator exponent; no duplicates across k
    std::vector<DOmega> all;
    for (long k = 0; k <= 6; ++k) {
        for (const auto &u : stream.level(k)) {
            CHECK(u.k() == k);
            CHECK(std::find(all.begin(), all.end(), u) == all.end());
            all.push_back(u);
        }
    }

    // Lemma on solution counts: rR >= (1+sqrt2)^2 / 2^k gives >= 2 solutions
    for (long k = 3; k <= 8; ++k)
        CHECK(stream.level(k).size() >= 2);

    // exponential growth: level k+2l has at least 2^l + 1 solutions
    size_t base = stream.level(0).size();
    CHECK(base >= 2);
    for (long l = 1; l <= 4; ++l) {
        size_t n = stream.level(2 * l).size();
        CHECK(n >= (1u << l) + 1);
    }
}

TEST_CASE("grid operator transport is a bijection on solutions") {
    // Proposition: u solves (A, B) iff G u solves (G(A), G_bullet(B)).
    // With A = B = disk(2) and G = [[1, sqrt2], [0, 1]], check the
    // transported solution sets agree elementwise via pullback membership.
    GridOperator G(DRootTwo(1), DRootTwo(ZRootTwo(mpz_class(0), mpz_class(1)), 0), DRootTwo(0),
                   DRootTwo(1));
    REQUIRE(G.is_grid_operator());
    REQUIRE(G.is_special());
    DRootTwo r2(2);
    auto pred = [&](const ZOmega &u) { return in_disk(u, r2); };
    auto sols = oracle::grid2d_brute(3, pred, pred);
    GridOperator Gi = G.inverse();
    GridOperator Gb = G.bullet();
    // image problem: v in G(A) iff G^-1 v in A; v_bullet in G_bullet(B) iff
    // (G_bullet)^-1 v_bullet in B
    auto predA2 = [&](const ZOmega &v) { return in_disk(Gi.apply(v), r2); };
    auto predB2 = [&](const ZOmega &v) { return in_disk(Gb.inverse().apply(v), r2); };
    auto sols2 = oracle::grid2d_brute(8, predA2, predB2);
    CHECK(sols.size() == sols2.size());
    for (const auto &u : sols) {
        ZOmega gu = G.apply(u);
        CHECK(std::find(sols2.begin(), sols2.end(), gu) != sols2.end());
    }
}
