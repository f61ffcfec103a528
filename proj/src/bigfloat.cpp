#include "ctsynth/bigfloat.hpp"

#include <algorithm>
#include <stdexcept>

namespace ctsynth {

namespace {

BigFloat bf_min(const BigFloat &a, const BigFloat &b) { return a <= b ? a : b; }
BigFloat bf_max(const BigFloat &a, const BigFloat &b) { return a >= b ? a : b; }

} // namespace

RealInterval RealInterval::point_long(long x, long prec) {
    BigFloat l(prec), h(prec);
    mpfr_set_si(l.raw(), x, MPFR_RNDD);
    mpfr_set_si(h.raw(), x, MPFR_RNDU);
    return {l, h};
}

RealInterval RealInterval::from_mpz(const mpz_class &x, long prec) {
    return {BigFloat::from_mpz(x, prec, MPFR_RNDD), BigFloat::from_mpz(x, prec, MPFR_RNDU)};
}

RealInterval RealInterval::from_mpq(const mpq_class &x, long prec) {
    return {BigFloat::from_mpq(x, prec, MPFR_RNDD), BigFloat::from_mpq(x, prec, MPFR_RNDU)};
}

RealInterval RealInterval::sqrt2(long prec) {
    BigFloat l(prec), h(prec);
    mpfr_sqrt_ui(l.raw(), 2, MPFR_RNDD);
    mpfr_sqrt_ui(h.raw(), 2, MPFR_RNDU);
    return {l, h};
}

RealInterval RealInterval::pi(long prec) {
    BigFloat l(prec), h(prec);
    mpfr_const_pi(l.raw(), MPFR_RNDD);
    mpfr_const_pi(h.raw(), MPFR_RNDU);
    return {l, h};
}

RealInterval RealInterval::hull(const RealInterval &a, const RealInterval &b) {
    return {bf_min(a.lo, b.lo), bf_max(a.hi, b.hi)};
}

BigFloat RealInterval::mid() const {
    BigFloat m(precision());
    mpfr_add(m.raw(), lo.raw(), hi.raw(), MPFR_RNDN);
    mpfr_div_2si(m.raw(), m.raw(), 1, MPFR_RNDN);
    return m;
}

BigFloat RealInterval::width() const {
    BigFloat w(precision());
    mpfr_sub(w.raw(), hi.raw(), lo.raw(), MPFR_RNDU);
    return w;
}

RealInterval iv_add(const RealInterval &a, const RealInterval &b, long prec) {
    BigFloat l(prec), h(prec);
    mpfr_add(l.raw(), a.lo.raw(), b.lo.raw(), MPFR_RNDD);
    mpfr_add(h.raw(), a.hi.raw(), b.hi.raw(), MPFR_RNDU);
    return {l, h};
}

RealInterval iv_sub(const RealInterval &a, const RealInterval &b, long prec) {
    BigFloat l(prec), h(prec);
    mpfr_sub(l.raw(), a.lo.raw(), b.hi.raw(), MPFR_RNDD);
    mpfr_sub(h.raw(), a.hi.raw(), b.lo.raw(), MPFR_RNDU);
    return {l, h};
}

RealInterval iv_mul(const RealInterval &a, const RealInterval &b, long prec) {
    BigFloat c[4] = {BigFloat(prec), BigFloat(prec), BigFloat(prec), BigFloat(prec)};
    BigFloat d[4] = {BigFloat(prec), BigFloat(prec), BigFloat(prec), BigFloat(prec)};
    mpfr_mul(c[0].raw(), a.lo.raw(), b.lo.raw(), MPFR_RNDD);
    mpfr_mul(c[1].raw(), a.lo.raw(), b.hi.raw(), MPFR_RNDD);
    mpfr_mul(c[2].raw(), a.hi.raw(), b.lo.raw(), MPFR_RNDD);
    mpfr_mul(c[3].raw(), a.hi.raw(), b.hi.raw(), MPFR_RNDD);
    mpfr_mul(d[0].raw(), a.lo.raw(), b.lo.raw(), MPFR_RNDU);
    mpfr_mul(d[1].raw(), a.lo.raw(), b.hi.raw(), MPFR_RNDU);
    mpfr_mul(d[2].raw(), a.hi.raw(), b.lo.raw(), MPFR_RNDU);
    mpfr_mul(d[3].raw(), a.hi.raw(), b.hi.raw(), MPFR_RNDU);
    BigFloat lo = c[0], hi = d[0];
    for (int i = 1; i < 4; ++i) {
        if (c[i] < lo)
            lo = c[i];
        if (d[i] > hi)
            hi = d[i];
    }
    return {lo, hi};
}

RealInterval iv_div(const RealInterval &a, const RealInterval &b, long prec) {
    if (b.contains_zero())
        throw std::domain_error("iv_div: divisor interval contains zero");
    BigFloat c[4] = {BigFloat(prec), BigFloat(prec), BigFloat(prec), BigFloat(prec)};
    BigFloat d[4] = {BigFloat(prec), BigFloat(prec), BigFloat(prec), BigFloat(prec)};
    mpfr_div(c[0].raw(), a.lo.raw(), b.lo.raw(), MPFR_RNDD);
    mpfr_div(c[1].raw(), a.lo.raw(), b.hi.raw(), MPFR_RNDD);
    mpfr_div(c[2].raw(), a.hi.raw(), b.lo.raw(), MPFR_RNDD);
    mpfr_div(c[3].raw(), a.hi.raw(), b.hi.raw(), MPFR_RNDD);
    mpfr_div(d[0].raw(), a.lo.raw(), b.lo.raw(), MPFR_RNDU);
    mpfr_div(d[1].raw(), a.lo.raw(), b.hi.raw(), MPFR_RNDU);
    mpfr_div(d[2].raw(), a.hi.raw(), b.lo.raw(), MPFR_RNDU);
    mpfr_div(d[3].raw(), a.hi.raw(), b.hi.raw(), MPFR_RNDU);
    BigFloat lo = c[0], hi = d[0];
    for (int i = 1; i < 4; ++i) {
        if (c[i] < lo)
            lo = c[i];
        if (d[i] > hi)
            hi = d[i];
    }
    return {lo, hi};
}

RealInterval iv_neg(const RealInterval &a) {
    BigFloat l(a.hi.precision()), h(a.lo.precision());
    mpfr_neg(l.raw(), a.hi.raw(), MPFR_RNDD);
    mpfr_neg(h.raw(), a.lo.raw(), MPFR_RNDU);
    return {l, h};
}

RealInterval iv_abs(const RealInterval &a, long prec) {
    if (a.lo.sign() >= 0)
        return a;
    if (a.hi.sign() <= 0)
        return iv_neg(a);
    BigFloat l(prec), h(prec);
    mpfr_set_zero(l.raw(), 1);
    mpfr_neg(h.raw(), a.lo.raw(), MPFR_RNDU);
    if (a.hi > h)
        h = a.hi;
    return {l, h};
}

RealInterval iv_sqr(const RealInterval &a, long prec) {
    RealInterval m = iv_mul(a, a, prec);
    if (a.contains_zero()) {
        BigFloat z(prec);
        mpfr_set_zero(z.raw(), 1);
        m.lo = z;
    }
    return m;
}

RealInterval iv_sqrt(const RealInterval &a, long prec) {
    if (a.hi.sign() < 0)
        throw std::domain_error("iv_sqrt: negative interval");
    BigFloat l(prec), h(prec);
    if (a.lo.sign() <= 0)
        mpfr_set_zero(l.raw(), 1);
    else
        mpfr_sqrt(l.raw(), a.lo.raw(), MPFR_RNDD);
    mpfr_sqrt(h.raw(), a.hi.raw(), MPFR_RNDU);
    return {l, h};
}

RealInterval iv_exp(const RealInterval &a, long prec) {
    BigFloat l(prec), h(prec);
    mpfr_exp(l.raw(), a.lo.raw(), MPFR_RNDD);
    mpfr_exp(h.raw(), a.hi.raw(), MPFR_RNDU);
    return {l, h};
}

RealInterval iv_log(const RealInterval &a, long prec) {
    if (a.lo.sign() <= 0)
        throw std::domain_error("iv_log: non-positive interval");
    BigFloat l(prec), h(prec);
    mpfr_log(l.raw(), a.lo.raw(), MPFR_RNDD);
    mpfr_log(h.raw(), a.hi.raw(), MPFR_RNDU);
    return {l, h};
}

namespace {

// Enclosure of f over [a.lo, a.hi] for 1-Lipschitz f: endpoint values
// padded by the interval width.
RealInterval lipschitz1_enclosure(const RealInterval &a, long prec,
                                  int (*f)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)) {
    BigFloat w = a.width();
    BigFloat l1(prec), l2(prec), h1(prec), h2(prec);
    f(l1.raw(), a.lo.raw(), MPFR_RNDD);
    f(l2.raw(), a.hi.raw(), MPFR_RNDD);
    f(h1.raw(), a.lo.raw(), MPFR_RNDU);
    f(h2.raw(), a.hi.raw(), MPFR_RNDU);
    BigFloat lo = l1 <= l2 ? l1 : l2;
    BigFloat hi = h1 >= h2 ? h1 : h2;
    mpfr_sub(lo.raw(), lo.raw(), w.raw(), MPFR_RNDD);
    mpfr_add(hi.raw(), hi.raw(), w.raw(), MPFR_RNDU);
    // clamp to [-1, 1]
    BigFloat one(prec), mone(prec);
    mpfr_set_si(one.raw(), 1, MPFR_RNDN);
    mpfr_set_si(mone.raw(), -1, MPFR_RNDN);
    if (lo < mone)
        lo = mone;
    if (hi > one)
        hi = one;
    return {lo, hi};
}

int mpfr_sin_shim(mpfr_ptr r, mpfr_srcptr x, mpfr_rnd_t rnd) { return mpfr_sin(r, x, rnd); }
int mpfr_cos_shim(mpfr_ptr r, mpfr_srcptr x, mpfr_rnd_t rnd) { return mpfr_cos(r, x, rnd); }

} // namespace

RealInterval iv_sin(const RealInterval &a, long prec) { return lipschitz1_enclosure(a, prec, mpfr_sin_shim); }
RealInterval iv_cos(const RealInterval &a, long prec) { return lipschitz1_enclosure(a, prec, mpfr_cos_shim); }

RealInterval iv_add(const RealInterval &a, const RealInterval &b) {
    return iv_add(a, b, std::max(a.precision(), b.precision()));
}
RealInterval iv_sub(const RealInterval &a, const RealInterval &b) {
    return iv_sub(a, b, std::max(a.precision(), b.precision()));
}
RealInterval iv_mul(const RealInterval &a, const RealInterval &b) {
    return iv_mul(a, b, std::max(a.precision(), b.precision()));
}
RealInterval iv_div(const RealInterval &a, const RealInterval &b) {
    return iv_div(a, b, std::max(a.precision(), b.precision()));
}

namespace {
mpz_class mpfr_to_mpz(const BigFloat &x, mpfr_rnd_t rnd) {
    mpz_class r;
    mpfr_get_z(r.get_mpz_t(), x.raw(), rnd);
    return r;
}
} // namespace

mpz_class floor_lo(const RealInterval &a) { return mpfr_to_mpz(a.lo, MPFR_RNDD); }
mpz_class floor_hi(const RealInterval &a) { return mpfr_to_mpz(a.hi, MPFR_RNDD); }
mpz_class ceil_lo(const RealInterval &a) { return mpfr_to_mpz(a.lo, MPFR_RNDU); }
mpz_class ceil_hi(const RealInterval &a) { return mpfr_to_mpz(a.hi, MPFR_RNDU); }

} // namespace ctsynth
