#include "ctsynth/grid2d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ctsynth {

const StepConstants &step_constants() {
    static const StepConstants c;
    return c;
}

// ----------------------------------------------------------- constant ledger

namespace {

RealInterval iv_rational(const mpq_class &q, long prec) { return RealInterval::from_mpq(q, prec); }

RealInterval lambda_iv(long prec) {
    return iv_add(RealInterval::point_long(1, prec), RealInterval::sqrt2(prec), prec);
}

RealInterval log_lambda(long prec) { return iv_log(lambda_iv(prec), prec); }

// lambda^x for rational x
RealInterval lambda_pow(const mpq_class &x, long prec) {
    return iv_exp(iv_mul(iv_rational(x, prec), log_lambda(prec), prec), prec);
}

RealInterval iv_max(const RealInterval &a, const RealInterval &b) {
    BigFloat lo = a.lo >= b.lo ? a.lo : b.lo;
    BigFloat hi = a.hi >= b.hi ? a.hi : b.hi;
    return {lo, hi};
}

} // namespace

std::vector<std::string> verify_step_constants(double tol) {
    const long prec = 256;
    const StepConstants &C = step_constants();
    std::vector<std::string> bad;

    RealInterval lam = lambda_iv(prec);
    RealInterval one = RealInterval::point_long(1, prec);
    RealInterval two = RealInterval::point_long(2, prec);
    RealInterval s2 = RealInterval::sqrt2(prec);
    RealInterval Q = iv_rational(C.Q, prec);
    RealInterval P = iv_rational(C.P, prec);

    auto lpow = [&](const mpq_class &x) { return lambda_pow(x, prec); };
    auto sinl = [&](const mpq_class &x) {
        return iv_mul(iv_sub(lpow(x), lpow(-x), prec), iv_rational(mpq_class(1, 2), prec), prec);
    };
    auto cosl = [&](const mpq_class &x) {
        return iv_mul(iv_add(lpow(x), lpow(-x), prec), iv_rational(mpq_class(1, 2), prec), prec);
    };
    auto sqr = [&](const RealInterval &x) { return iv_sqr(x, prec); };
    auto g = [&](const RealInterval &x) { return sqr(iv_sub(one, iv_mul(two, x, prec), prec)); };
    auto h = [&](const RealInterval &x) { return sqr(iv_sub(one, iv_mul(s2, x, prec), prec)); };
    auto kone = [&](const mpq_class &x) { return sqr(iv_sub(s2, cosl(x), prec)); };

    BigFloat tolbf(64);
    mpfr_set_d(tolbf.raw(), tol, MPFR_RNDU);
    auto leq = [&](const char *name, const RealInterval &lhs, const RealInterval &rhs) {
        BigFloat bound(prec);
        mpfr_add(bound.raw(), rhs.lo.raw(), tolbf.raw(), MPFR_RNDD);
        if (!(lhs.hi <= bound))
            bad.push_back(name);
    };

    mpq_class rr = C.r, aa = C.a, bb = C.b, PP = C.P;
    RealInterval twoP = iv_div(two, P, prec);

    // R step: (1 + 2/P) sinl(r)^2 <= Q
    leq("R-bound", iv_mul(iv_add(one, twoP, prec), sqr(sinl(rr)), prec), Q);

    // K step interval sanity: r - 1 <= 0 <= 1 - a
    leq("K-interval-left", iv_rational(rr - 1, prec), RealInterval::point_long(0, prec));
    leq("K-interval-right", RealInterval::point_long(0, prec), iv_rational(1 - aa, prec));

    // K step: max over the cosl window plus the cosh term
    {
        RealInterval kmax = iv_max(kone(rr - 1), iv_max(kone(1 - aa), kone(0)));
        RealInterval cmax = iv_max(sqr(cosl(rr - 1)), sqr(cosl(1 - aa)));
        leq("K-bound", iv_add(kmax, iv_mul(cmax, twoP, prec), prec), Q);
    }

    // A step, case n >= 1: g(1/(4 lambda)) + 2/P <= Q
    {
        RealInterval x = iv_div(one, iv_mul(RealInterval::point_long(4, prec), lam, prec), prec);
        leq("A-bound-large-n", iv_add(g(x), twoP, prec), Q);
    }
    // A step requires lambda^a >= 1/2
    leq("A-a-low", iv_rational(mpq_class(1, 2), prec), lpow(aa));
    // A step, case n = 1: g max location and bound
    {
        RealInterval ga = g(lpow(aa));
        RealInterval ghalf = g(iv_div(one, iv_mul(two, lam, prec), prec));
        leq("A-max-location", ga, ghalf);
        RealInterval l2a = lpow(2 * aa);
        RealInterval bound = iv_add(iv_max(ga, ghalf),
                                    iv_mul(iv_div(RealInterval::point_long(8, prec), P, prec), l2a, prec), prec);
        leq("A-bound-n1", bound, Q);
    }

    // B step, case n >= 1: h(1/(2 sqrt2 lambda)) + 2/P <= Q
    {
        RealInterval den = iv_mul(iv_mul(two, s2, prec), lam, prec);
        leq("B-bound-large-n", iv_add(h(iv_div(one, den, prec)), twoP, prec), Q);
    }
    // B step, case n = 1
    {
        RealInterval hx = h(iv_div(one, iv_mul(s2, lam, prec), prec));
        RealInterval hb = h(lpow(bb));
        leq("B-max-location", hx, hb);
        RealInterval l2b = lpow(2 * bb);
        RealInterval bound = iv_add(iv_max(hx, hb),
                                    iv_mul(iv_div(RealInterval::point_long(4, prec), P, prec), l2b, prec), prec);
        leq("B-bound-n1", bound, Q);
    }

    // covering constraints
    leq("cover-r-a", iv_rational(-rr, prec), iv_rational(aa, prec));
    leq("cover-b-r", iv_rational(-bb, prec), iv_rational(rr - 1, prec));

    // skew threshold vs target uprightness M = pi/(4 sqrt(P+1)):
    // P <= pi^2/(16 M^2) - 1 (an identity for this M)
    {
        RealInterval pi = RealInterval::pi(prec);
        RealInterval M = iv_div(pi, iv_mul(RealInterval::point_long(4, prec),
                                           iv_sqrt(iv_add(P, one, prec), prec), prec), prec);
        RealInterval rhs = iv_sub(iv_div(iv_sqr(pi, prec),
                                         iv_mul(RealInterval::point_long(16, prec), iv_sqr(M, prec), prec), prec),
                                  one, prec);
        leq("P-vs-M", P, rhs);
    }

    (void)PP;
    return bad;
}

// ------------------------------------------------------------- GridOperator

GridOperator::GridOperator()
    : m00(DRootTwo(1)), m01(DRootTwo(0)), m10(DRootTwo(0)), m11(DRootTwo(1)) {}

GridOperator::GridOperator(DRootTwo e00, DRootTwo e01, DRootTwo e10, DRootTwo e11)
    : m00(std::move(e00)), m01(std::move(e01)), m10(std::move(e10)), m11(std::move(e11)) {}

GridOperator GridOperator::identity() { return {}; }

namespace {
DRootTwo inv_sqrt2_times(const ZRootTwo &x) { return DRootTwo(x, 1); }
} // namespace

GridOperator GridOperator::R() {
    return {inv_sqrt2_times(ZRootTwo::one()), inv_sqrt2_times(-ZRootTwo::one()),
            inv_sqrt2_times(ZRootTwo::one()), inv_sqrt2_times(ZRootTwo::one())};
}

GridOperator GridOperator::K() {
    return {inv_sqrt2_times(-ZRootTwo::lambda_inv()), inv_sqrt2_times(-ZRootTwo::one()),
            inv_sqrt2_times(ZRootTwo::lambda()), inv_sqrt2_times(ZRootTwo::one())};
}

GridOperator GridOperator::X() { return {DRootTwo(0), DRootTwo(1), DRootTwo(1), DRootTwo(0)}; }

GridOperator GridOperator::Z() { return {DRootTwo(1), DRootTwo(0), DRootTwo(0), DRootTwo(-1)}; }

GridOperator GridOperator::A_pow(const mpz_class &n) {
    return {DRootTwo(1), DRootTwo(ZRootTwo(-2 * n, 0), 0), DRootTwo(0), DRootTwo(1)};
}

GridOperator GridOperator::B_pow(const mpz_class &n) {
    return {DRootTwo(1), DRootTwo(ZRootTwo(0, n), 0), DRootTwo(0), DRootTwo(1)};
}

namespace {

// Decompose a grid-operator entry as x + x'/sqrt2 with integer x, x'.
bool entry_parts(const DRootTwo &e, mpz_class &x, mpz_class &xp) {
    if (e.k() == 0) {
        x = e.alpha().a;
        xp = 2 * e.alpha().b;
        return true;
    }
    if (e.k() == 1) {
        x = e.alpha().b;
        xp = e.alpha().a;
        return true;
    }
    return false;
}

} // namespace

bool GridOperator::is_grid_operator() const {
    mpz_class x[4], xp[4];
    const DRootTwo *es[4] = {&m00, &m01, &m10, &m11};
    for (int i = 0; i < 4; ++i)
        if (!entry_parts(*es[i], x[i], xp[i]))
            return false;
    mpz_class sum = x[0] + x[1] + x[2] + x[3];
    if (mpz_odd_p(sum.get_mpz_t()))
        return false;
    int par = mpz_odd_p(xp[0].get_mpz_t());
    for (int i = 1; i < 4; ++i)
        if (mpz_odd_p(xp[i].get_mpz_t()) != par)
            return false;
    return true;
}

DRootTwo GridOperator::det() const { return m00 * m11 - m01 * m10; }

bool GridOperator::is_special() const {
    DRootTwo d = det();
    return d == DRootTwo(1) || d == DRootTwo(-1);
}

GridOperator GridOperator::operator*(const GridOperator &o) const {
    return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
            m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
}

GridOperator GridOperator::inverse() const {
    DRootTwo d = det();
    if (d == DRootTwo(1))
        return {m11, -m01, -m10, m00};
    if (d == DRootTwo(-1))
        return {-m11, m01, m10, -m00};
    throw std::domain_error("GridOperator::inverse: operator is not special");
}

GridOperator GridOperator::bullet() const {
    return {m00.bullet(), m01.bullet(), m10.bullet(), m11.bullet()};
}

GridOperator GridOperator::transpose() const { return {m00, m10, m01, m11}; }

bool GridOperator::operator==(const GridOperator &o) const {
    return m00 == o.m00 && m01 == o.m01 && m10 == o.m10 && m11 == o.m11;
}

GridOperator GridOperator::sigma_conj(long j) const {
    ZRootTwo lj = ZRootTwo::lambda().pow(j);
    ZRootTwo lnj = ZRootTwo::lambda().pow(-j);
    return {m00 * DRootTwo::from_zroottwo(lj), m01, m10, m11 * DRootTwo::from_zroottwo(lnj)};
}

ZOmega GridOperator::apply(const ZOmega &u) const {
    DRootTwo x(ZRootTwo(u.c - u.a, u.d), 1);
    DRootTwo y(ZRootTwo(u.c + u.a, u.b), 1);
    DRootTwo xt = m00 * x + m01 * y;
    DRootTwo yt = m10 * x + m11 * y;
    if (xt.k() > 1 || yt.k() > 1)
        throw std::logic_error("GridOperator::apply: image leaves the lattice");
    ZRootTwo nx = xt.numerator_at(1);
    ZRootTwo ny = yt.numerator_at(1);
    // value = (nx.a + nx.b sqrt2)/sqrt2 = nx.b + nx.a/sqrt2
    mpz_class x2 = nx.a, y2 = ny.a;
    if (mpz_odd_p(mpz_class(x2 - y2).get_mpz_t()))
        throw std::logic_error("GridOperator::apply: parity violation");
    return {(y2 - x2) / 2, ny.b, (x2 + y2) / 2, nx.b};
}

std::pair<RealInterval, RealInterval>
GridOperator::apply(const std::pair<RealInterval, RealInterval> &p, long prec) const {
    RealInterval e00 = eval_ring_element(m00, prec), e01 = eval_ring_element(m01, prec);
    RealInterval e10 = eval_ring_element(m10, prec), e11 = eval_ring_element(m11, prec);
    RealInterval x = iv_add(iv_mul(e00, p.first, prec), iv_mul(e01, p.second, prec), prec);
    RealInterval y = iv_add(iv_mul(e10, p.first, prec), iv_mul(e11, p.second, prec), prec);
    return {x, y};
}

std::string GridOperator::to_string() const {
    std::ostringstream os;
    os << "[[" << m00 << ", " << m01 << "], [" << m10 << ", " << m11 << "]]";
    return os.str();
}

// ------------------------------------------------------------------ SymMat

RealInterval SymMat::det(long prec) const {
    return iv_sub(iv_mul(a, d, prec), iv_sqr(b, prec), prec);
}

SymMat SymMat::congruence(const GridOperator &g, long prec) const {
    RealInterval g00 = eval_ring_element(g.m00, prec), g01 = eval_ring_element(g.m01, prec);
    RealInterval g10 = eval_ring_element(g.m10, prec), g11 = eval_ring_element(g.m11, prec);
    auto mul = [&](const RealInterval &x, const RealInterval &y) { return iv_mul(x, y, prec); };
    auto add = [&](const RealInterval &x, const RealInterval &y) { return iv_add(x, y, prec); };
    RealInterval two = RealInterval::point_long(2, prec);
    SymMat r;
    r.a = add(add(mul(iv_sqr(g00, prec), a), mul(mul(two, mul(g00, g10)), b)), mul(iv_sqr(g10, prec), d));
    r.b = add(add(mul(mul(g00, g01), a), mul(add(mul(g00, g11), mul(g01, g10)), b)), mul(mul(g10, g11), d));
    r.d = add(add(mul(iv_sqr(g01, prec), a), mul(mul(two, mul(g01, g11)), b)), mul(iv_sqr(g11, prec), d));
    return r;
}

SymMat SymMat::scaled_det1(long prec) const {
    RealInterval s = iv_sqrt(det(prec), prec);
    SymMat r;
    r.a = iv_div(a, s, prec);
    r.b = iv_div(b, s, prec);
    r.d = iv_div(d, s, prec);
    return r;
}

// ----------------------------------------------------------------- Ellipse

Ellipse Ellipse::unit_disk(long prec) {
    Ellipse e;
    e.mat.a = RealInterval::point_long(1, prec);
    e.mat.b = RealInterval::point_long(0, prec);
    e.mat.d = RealInterval::point_long(1, prec);
    e.cx = RealInterval::point_long(0, prec);
    e.cy = RealInterval::point_long(0, prec);
    return e;
}

RealInterval Ellipse::area(long prec) const {
    return iv_div(RealInterval::pi(prec), iv_sqrt(mat.det(prec), prec), prec);
}

RealInterval Ellipse::uprightness(long prec) const {
    RealInterval ratio = iv_div(mat.det(prec), iv_mul(mat.a, mat.d, prec), prec);
    RealInterval quarter_pi = iv_div(RealInterval::pi(prec), RealInterval::point_long(4, prec), prec);
    return iv_mul(quarter_pi, iv_sqrt(ratio, prec), prec);
}

RealInterval uprightness(const Ellipse &E, long prec) { return E.uprightness(prec); }

Interval1D Ellipse::bbox_x(long prec) const {
    RealInterval hw = iv_sqrt(iv_div(mat.d, mat.det(prec), prec), prec);
    return {Endpoint::approx(iv_sub(cx, hw, prec)), Endpoint::approx(iv_add(cx, hw, prec))};
}

Interval1D Ellipse::bbox_y(long prec) const {
    RealInterval hw = iv_sqrt(iv_div(mat.a, mat.det(prec), prec), prec);
    return {Endpoint::approx(iv_sub(cy, hw, prec)), Endpoint::approx(iv_add(cy, hw, prec))};
}

namespace {

RealInterval scale_sqrt2_pow_iv(const RealInterval &v, long k, long prec) {
    RealInterval r = v;
    mpfr_mul_2si(r.lo.raw(), r.lo.raw(), k / 2, MPFR_RNDD);
    mpfr_mul_2si(r.hi.raw(), r.hi.raw(), k / 2, MPFR_RNDU);
    if (k % 2 != 0)
        r = iv_mul(r, RealInterval::sqrt2(prec), prec);
    return r;
}

} // namespace

Ellipse Ellipse::scaled_sqrt2_pow(long k, bool negate, long prec) const {
    Ellipse e = *this;
    mpfr_mul_2si(e.mat.a.lo.raw(), e.mat.a.lo.raw(), -k, MPFR_RNDD);
    mpfr_mul_2si(e.mat.a.hi.raw(), e.mat.a.hi.raw(), -k, MPFR_RNDU);
    mpfr_mul_2si(e.mat.b.lo.raw(), e.mat.b.lo.raw(), -k, MPFR_RNDD);
    mpfr_mul_2si(e.mat.b.hi.raw(), e.mat.b.hi.raw(), -k, MPFR_RNDU);
    mpfr_mul_2si(e.mat.d.lo.raw(), e.mat.d.lo.raw(), -k, MPFR_RNDD);
    mpfr_mul_2si(e.mat.d.hi.raw(), e.mat.d.hi.raw(), -k, MPFR_RNDU);
    e.cx = scale_sqrt2_pow_iv(cx, k, prec);
    e.cy = scale_sqrt2_pow_iv(cy, k, prec);
    if (negate && k % 2 != 0) {
        e.cx = iv_neg(e.cx);
        e.cy = iv_neg(e.cy);
    }
    return e;
}

Ellipse Ellipse::transformed(const GridOperator &G, long prec) const {
    Ellipse e;
    e.mat = mat.congruence(G.inverse(), prec);
    auto c = G.apply(std::make_pair(cx, cy), prec);
    e.cx = c.first;
    e.cy = c.second;
    return e;
}

// ------------------------------------------------------------------- State

State State::from_ellipses(const Ellipse &A, const Ellipse &B, long prec) {
    State s;
    s.d1 = A.mat.scaled_det1(prec);
    s.d2 = B.mat.scaled_det1(prec);
    s.prec = prec;
    return s;
}

RealInterval State::skew() const {
    return iv_add(iv_sqr(d1.b, prec), iv_sqr(d2.b, prec), prec);
}

namespace {
RealInterval lambda_exponent_of_ratio(const RealInterval &num, const RealInterval &den, long prec) {
    RealInterval ratio = iv_div(num, den, prec);
    return iv_div(iv_log(ratio, prec), iv_mul(RealInterval::point_long(2, prec), log_lambda(prec), prec),
                  prec);
}
} // namespace

RealInterval State::z() const { return lambda_exponent_of_ratio(d1.d, d1.a, prec); }

RealInterval State::zeta() const { return lambda_exponent_of_ratio(d2.d, d2.a, prec); }

RealInterval State::bias() const { return iv_sub(zeta(), z(), prec); }

State State::applied(const GridOperator &G) const {
    State s;
    s.d1 = d1.congruence(G, prec);
    s.d2 = d2.congruence(G.bullet(), prec);
    s.prec = prec;
    return s;
}

// ----------------------------------------------------------- step_operator

namespace {

long floor_mid_long(const RealInterval &v) {
    BigFloat m = v.mid();
    BigFloat f(m.precision());
    mpfr_floor(f.raw(), m.raw());
    return mpfr_get_si(f.raw(), MPFR_RNDN);
}

mpz_class floor_mid_mpz(const RealInterval &v) {
    BigFloat m = v.mid();
    mpz_class r;
    mpfr_get_z(r.get_mpz_t(), m.raw(), MPFR_RNDD);
    return r;
}

int cmp_mid_rational(const RealInterval &v, const mpq_class &q) {
    BigFloat m = v.mid();
    return mpfr_cmp_q(m.raw(), q.get_mpq_t());
}

} // namespace

GridOperator step_operator(const State &s) {
    const long prec = s.prec;
    const StepConstants &C = step_constants();

    RealInterval z = s.z();
    RealInterval zeta = s.zeta();
    RealInterval bias = iv_sub(zeta, z, prec);

    // shift the bias into [-1, 1]
    RealInterval t = iv_div(iv_sub(RealInterval::point_long(1, prec), bias, prec),
                            RealInterval::point_long(2, prec), prec);
    long kshift = floor_mid_long(t);
    RealInterval ks = RealInterval::point_long(kshift, prec);
    RealInterval zs = iv_sub(z, ks, prec);
    RealInterval zetas = iv_add(zeta, ks, prec);

    // symmetry normalization on the shifted state: beta >= 0 via Z,
    // z + zeta >= 0 via X. The shift flips the sign of beta when k is odd.
    int beta_sign = s.d2.b.mid().sign();
    if (kshift % 2 != 0)
        beta_sign = -beta_sign;
    bool flagZ = beta_sign < 0;
    bool flagX = iv_add(zs, zetas, prec).mid().sign() < 0;
    if (flagX) {
        zs = iv_neg(zs);
        zetas = iv_neg(zetas);
    }
    int bsign = s.d1.b.mid().sign();
    if (flagZ)
        bsign = -bsign;

    auto in_box = [&](const RealInterval &v, const mpq_class &lo, const mpq_class &hi) {
        return cmp_mid_rational(v, lo) >= 0 && cmp_mid_rational(v, hi) <= 0;
    };

    GridOperator Gc;
    bool found = false;
    if (bsign >= 0) {
        if (in_box(zs, -C.r, C.r) && in_box(zetas, -C.r, C.r)) {
            Gc = GridOperator::R();
            found = true;
        } else if (cmp_mid_rational(zs, -C.a) <= 0 && cmp_mid_rational(zetas, C.r) >= 0) {
            Gc = GridOperator::K();
            found = true;
        } else if (cmp_mid_rational(zetas, -C.a) <= 0 && cmp_mid_rational(zs, C.r) >= 0) {
            Gc = GridOperator::K().bullet();
            found = true;
        } else if (cmp_mid_rational(zs, -C.a) >= 0 && cmp_mid_rational(zetas, -C.a) >= 0) {
            RealInterval c = zs.mid() <= zetas.mid() ? zs : zetas;
            RealInterval lc = iv_exp(iv_mul(c, log_lambda(prec), prec), prec);
            mpz_class n = floor_mid_mpz(iv_div(lc, RealInterval::point_long(2, prec), prec));
            if (n < 1)
                n = 1;
            Gc = GridOperator::A_pow(n);
            found = true;
        }
    } else {
        if (in_box(zs, -C.r, C.r) && in_box(zetas, -C.r, C.r)) {
            Gc = GridOperator::R();
            found = true;
        } else if (cmp_mid_rational(zs, -C.b) >= 0 && cmp_mid_rational(zetas, -C.b) >= 0) {
            RealInterval c = zs.mid() <= zetas.mid() ? zs : zetas;
            RealInterval lc = iv_exp(iv_mul(c, log_lambda(prec), prec), prec);
            mpz_class n = floor_mid_mpz(iv_div(lc, RealInterval::sqrt2(prec), prec));
            if (n < 1)
                n = 1;
            Gc = GridOperator::B_pow(n);
            found = true;
        }
    }
    if (!found)
        throw std::logic_error("step_operator: case dispatch fell through the covering");

    GridOperator G = Gc;
    if (flagX)
        G = GridOperator::X() * G;
    if (flagZ)
        G = GridOperator::Z() * G;
    return G.sigma_conj(kshift);
}

// ------------------------------------------------------------- reduce_skew

SkewReduction reduce_skew(const Ellipse &A, const Ellipse &B, long prec) {
    static const bool ledger_checked = [] {
        auto bad = verify_step_constants();
        if (!bad.empty())
            throw std::logic_error("step constants violate ledger inequality: " + bad.front());
        return true;
    }();
    (void)ledger_checked;

    const StepConstants &C = step_constants();
    long p = prec;
    GridOperator acc = GridOperator::identity();

    auto make_state = [&](long pp) {
        State s = State::from_ellipses(A, B, pp);
        return s.applied(acc);
    };

    State s = make_state(p);
    RealInterval sk = s.skew();

    long max_iter = 64;
    if (mpfr_cmp_q(sk.hi.raw(), C.P.get_mpq_t()) > 0) {
        RealInterval lg = iv_log(iv_div(sk, iv_rational(C.P, p), p), p);
        double steps = lg.hi.to_double() / std::log(1.0 / C.Q.get_d());
        max_iter = static_cast<long>(steps) + 64;
    }

    long iter = 0;
    int escalations = 0;
    while (true) {
        sk = s.skew();
        if (mpfr_cmp_q(sk.hi.raw(), C.P.get_mpq_t()) <= 0)
            break;
        if (mpfr_cmp_q(sk.lo.raw(), C.P.get_mpq_t()) <= 0) {
            // enclosure straddles the threshold; refine, then accept on mid
            if (escalations < 6) {
                ++escalations;
                p *= 2;
                s = make_state(p);
                continue;
            }
            if (mpfr_cmp_q(sk.mid().raw(), C.P.get_mpq_t()) <= 0)
                break;
        }

        GridOperator g = step_operator(s);
        State s2 = s.applied(g);
        RealInterval sk2 = s2.skew();
        // measured contraction check: skew' <= (Q + 1/64) skew
        RealInterval qb = iv_mul(iv_rational(C.Q + mpq_class(1, 64), p), sk, p);
        if (!(sk2.hi <= qb.hi)) {
            if (escalations < 8) {
                ++escalations;
                p *= 2;
                s = make_state(p);
                continue;
            }
            throw std::runtime_error("reduce_skew: step failed to contract the skew");
        }

        acc = acc * g;
        s = make_state(p);
        ++iter;
        if (iter > max_iter)
            throw std::runtime_error("reduce_skew: iteration bound exceeded");
    }

    SkewReduction r;
    r.G_inv = acc;
    r.G = acc.inverse();
    r.iterations = iter;
    r.final_skew = s.skew();
    return r;
}

// -------------------------------------------------------------- DiskRegion

DiskRegion::DiskRegion(DRootTwo r2) : r2_(std::move(r2)) {
    if (r2_.sign() <= 0)
        throw std::domain_error("DiskRegion: radius squared must be positive");
}

bool DiskRegion::contains(const DOmega &u, long prec) const {
    (void)prec;
    return u.abs_sq() <= r2_;
}

Ellipse DiskRegion::enclosing_ellipse(long prec) const {
    Ellipse e = Ellipse::unit_disk(prec);
    RealInterval inv = iv_div(RealInterval::point_long(1, prec), eval_ring_element(r2_, prec), prec);
    e.mat.a = inv;
    e.mat.d = inv;
    return e;
}

std::optional<Interval1D> DiskRegion::line_intersect(const DOmega &p, const DOmega &q,
                                                     long prec) const {
    // |p + t q|^2 <= r2: A t^2 + 2 B t + C <= 0 with exact coefficients
    DRootTwo A = q.abs_sq();
    DRootTwo B = (p.dagger() * q).real();
    DRootTwo Cc = p.abs_sq() - r2_;
    if (A.is_zero())
        return std::nullopt;
    RealInterval ia = eval_ring_element(A, prec);
    RealInterval ib = eval_ring_element(B, prec);
    RealInterval ic = eval_ring_element(Cc, prec);
    RealInterval disc = iv_sub(iv_sqr(ib, prec), iv_mul(ia, ic, prec), prec);
    if (disc.hi.sign() < 0)
        return std::nullopt;
    RealInterval sq = iv_sqrt(disc, prec);
    RealInterval lo = iv_div(iv_sub(iv_neg(ib), sq, prec), ia, prec);
    RealInterval hi = iv_div(iv_add(iv_neg(ib), sq, prec), ia, prec);
    return Interval1D{Endpoint::approx(lo), Endpoint::approx(hi)};
}

// --------------------------------------------------- rectangle enumeration

namespace {

ZOmega assemble(const ZRootTwo &alpha, const ZRootTwo &beta, bool omega_offset) {
    // u = alpha + beta i (+ omega)
    ZOmega u = ZOmega::from_zroottwo(alpha) + ZOmega::from_zroottwo(beta) * ZOmega::omega_power(2);
    if (omega_offset)
        u = u + ZOmega::omega();
    return u;
}

bool zomega_lex_less(const ZOmega &x, const ZOmega &y) {
    if (x.a != y.a)
        return x.a < y.a;
    if (x.b != y.b)
        return x.b < y.b;
    if (x.c != y.c)
        return x.c < y.c;
    return x.d < y.d;
}

Interval1D shift_interval(const Interval1D &iv, const QRootTwo &delta, long prec) {
    return {iv.lo.shifted(delta, prec), iv.hi.shifted(delta, prec)};
}

} // namespace

std::vector<ZOmega> enumerate_upright_rects(const Rect &A, const Rect &B, long prec) {
    std::vector<ZOmega> out;

    auto xs = enumerate_grid_1d(A.x, B.x, prec);
    auto ys = enumerate_grid_1d(A.y, B.y, prec);
    for (const auto &beta : ys)
        for (const auto &alpha : xs)
            out.push_back(assemble(alpha, beta, false));

    // second residue class: u = alpha + beta i + omega, with the grid
    // constraints shifted by -1/sqrt2 on the A side and +1/sqrt2 on B
    const QRootTwo half_sqrt2(mpq_class(0), mpq_class(1, 2));
    Rect A2{shift_interval(A.x, -half_sqrt2, prec), shift_interval(A.y, -half_sqrt2, prec)};
    Rect B2{shift_interval(B.x, half_sqrt2, prec), shift_interval(B.y, half_sqrt2, prec)};
    auto xs2 = enumerate_grid_1d(A2.x, B2.x, prec);
    auto ys2 = enumerate_grid_1d(A2.y, B2.y, prec);
    for (const auto &beta : ys2)
        for (const auto &alpha : xs2)
            out.push_back(assemble(alpha, beta, true));

    std::sort(out.begin(), out.end(), zomega_lex_less);
    return out;
}

std::pair<Ellipse, Ellipse> apply_grid_operator(const Ellipse &A, const Ellipse &B,
                                                const GridOperator &G, long prec) {
    if (!G.is_special())
        throw std::domain_error("apply_grid_operator: operator must be special");
    return {A.transformed(G, prec), B.transformed(G.bullet(), prec)};
}

// --------------------------------------------------------- ScaledGridStream

ScaledGridStream::ScaledGridStream(const ConvexRegion &A, const ConvexRegion &B, long prec)
    : A_(A), B_(B), prec_(prec), encA_(A.enclosing_ellipse(prec)), encB_(B.enclosing_ellipse(prec)),
      red_(reduce_skew(encA_, encB_, prec)) {}

std::vector<DOmega> ScaledGridStream::level(long k) const {
    Ellipse E1 = encA_.scaled_sqrt2_pow(k, false, prec_).transformed(red_.G, prec_);
    Ellipse E2 = encB_.scaled_sqrt2_pow(k, true, prec_).transformed(red_.G.bullet(), prec_);

    Rect box1{E1.bbox_x(prec_), E1.bbox_y(prec_)};
    Rect box2{E2.bbox_x(prec_), E2.bbox_y(prec_)};
    std::vector<ZOmega> cands = enumerate_upright_rects(box1, box2, prec_);

    std::vector<DOmega> out;
    for (const ZOmega &vp : cands) {
        if (k > 0 && vp.divisible_by_sqrt2())
            continue; // belongs to an earlier level
        ZOmega v = red_.G_inv.apply(vp);
        DOmega u(v, k);
        if (u.k() != k)
            continue;
        if (A_.contains(u, prec_) && B_.contains(u.bullet(), prec_))
            out.push_back(u);
    }
    return out;
}

std::vector<ZOmega> enumerate_convex(const ConvexRegion &A, const ConvexRegion &B, long prec) {
    ScaledGridStream stream(A, B, prec);
    std::vector<ZOmega> out;
    for (const DOmega &u : stream.level(0))
        out.push_back(u.u());
    return out;
}

} // namespace ctsynth
