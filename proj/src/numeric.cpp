#include "ctsynth/numeric.hpp"

#include <stdexcept>

namespace ctsynth {

long working_precision(const mpq_class &epsilon) {
    if (sgn(epsilon) <= 0)
        throw std::domain_error("working_precision: epsilon must be positive");
    // log2(1/eps) <= bits(den) - bits(num) + 1
    long num_bits = static_cast<long>(mpz_sizeinbase(epsilon.get_num().get_mpz_t(), 2));
    long den_bits = static_cast<long>(mpz_sizeinbase(epsilon.get_den().get_mpz_t(), 2));
    long log2_inv = den_bits - num_bits + 1;
    if (log2_inv < 0)
        log2_inv = 0;
    long p = 2 * log2_inv + 32;
    return p < 64 ? 64 : p;
}

RealInterval eval_ring_element(const ZRootTwo &x, long prec) {
    RealInterval ia = RealInterval::from_mpz(x.a, prec);
    RealInterval ib = RealInterval::from_mpz(x.b, prec);
    return iv_add(ia, iv_mul(ib, RealInterval::sqrt2(prec), prec), prec);
}

namespace {

// Exact scaling by 2^-e on both endpoints.
RealInterval scale_by_pow2(const RealInterval &v, long e) {
    RealInterval r = v;
    mpfr_mul_2si(r.lo.raw(), r.lo.raw(), -e, MPFR_RNDD);
    mpfr_mul_2si(r.hi.raw(), r.hi.raw(), -e, MPFR_RNDU);
    return r;
}

RealInterval inv_sqrt2(long prec) {
    BigFloat l(prec), h(prec);
    mpfr_sqrt_ui(l.raw(), 2, MPFR_RNDD);
    mpfr_sqrt_ui(h.raw(), 2, MPFR_RNDU);
    BigFloat il(prec), ih(prec);
    mpfr_si_div(il.raw(), 1, h.raw(), MPFR_RNDD);
    mpfr_si_div(ih.raw(), 1, l.raw(), MPFR_RNDU);
    return {il, ih};
}

RealInterval div_by_sqrt2_pow(const RealInterval &v, long k, long prec) {
    RealInterval r = scale_by_pow2(v, k / 2);
    if (k % 2 != 0)
        r = iv_mul(r, inv_sqrt2(prec), prec);
    return r;
}

} // namespace

RealInterval eval_ring_element(const DRootTwo &x, long prec) {
    return div_by_sqrt2_pow(eval_ring_element(x.alpha(), prec), x.k(), prec);
}

RealInterval eval_ring_element(const QRootTwo &x, long prec) {
    RealInterval ia = RealInterval::from_mpq(x.a, prec);
    RealInterval ib = RealInterval::from_mpq(x.b, prec);
    return iv_add(ia, iv_mul(ib, RealInterval::sqrt2(prec), prec), prec);
}

RealInterval eval_real(const DOmega &u, long prec) { return eval_ring_element(u.real(), prec); }

RealInterval eval_imag(const DOmega &u, long prec) { return eval_ring_element(u.imag(), prec); }

namespace {

template <typename T> Ordering compare_impl(const T &x, const T &y) {
    for (long prec = 64; prec <= 256; prec *= 2) {
        RealInterval ix = eval_ring_element(x, prec);
        RealInterval iy = eval_ring_element(y, prec);
        if (ix.hi < iy.lo)
            return Ordering::Less;
        if (iy.hi < ix.lo)
            return Ordering::Greater;
    }
    int s = (x - y).sign();
    if (s < 0)
        return Ordering::Less;
    if (s > 0)
        return Ordering::Greater;
    return Ordering::Equal;
}

} // namespace

Ordering certified_compare(const QRootTwo &x, const QRootTwo &y) { return compare_impl(x, y); }

Ordering certified_compare(const DRootTwo &x, const DRootTwo &y) { return compare_impl(x, y); }

Sign certified_sign(const std::function<RealInterval(long)> &eval, long base_prec, int doublings) {
    long prec = base_prec;
    for (int i = 0; i <= doublings; ++i) {
        RealInterval v = eval(prec);
        if (v.certainly_positive())
            return Sign::Positive;
        if (v.certainly_negative())
            return Sign::Negative;
        if (v.lo.is_zero() && v.hi.is_zero())
            return Sign::Zero;
        prec *= 2;
    }
    return Sign::Unresolved;
}

} // namespace ctsynth
