#include "ctsynth/grid1d.hpp"

#include <algorithm>
#include <cmath>

namespace ctsynth {

Endpoint Endpoint::exact(QRootTwo v) {
    Endpoint e;
    e.exact_ = std::move(v);
    return e;
}

Endpoint Endpoint::approx(RealInterval enc) {
    Endpoint e;
    e.encl_ = std::move(enc);
    return e;
}

RealInterval Endpoint::enclosure(long prec) const {
    if (exact_)
        return eval_ring_element(*exact_, prec);
    return encl_;
}

Endpoint Endpoint::scaled(const ZRootTwo &s, long prec) const {
    if (exact_)
        return exact(*exact_ * QRootTwo(s));
    return approx(iv_mul(encl_, eval_ring_element(s, prec), prec));
}

Endpoint Endpoint::shifted(const QRootTwo &delta, long prec) const {
    if (exact_)
        return exact(*exact_ + delta);
    return approx(iv_add(encl_, eval_ring_element(delta, prec), prec));
}

Endpoint Endpoint::operator-() const {
    if (exact_)
        return exact(-*exact_);
    return approx(iv_neg(encl_));
}

bool Interval1D::contains(const ZRootTwo &v, long prec) const {
    QRootTwo q(v);
    if (lo.is_exact()) {
        if (certified_compare(q, lo.exact_value()) == Ordering::Less)
            return false;
    } else {
        // outer hull: only reject when certainly below the lower enclosure
        RealInterval b = lo.enclosure(prec);
        RealInterval x = eval_ring_element(v, prec);
        if (x.hi < b.lo)
            return false;
    }
    if (hi.is_exact()) {
        if (certified_compare(q, hi.exact_value()) == Ordering::Greater)
            return false;
    } else {
        RealInterval b = hi.enclosure(prec);
        RealInterval x = eval_ring_element(v, prec);
        if (x.lo > b.hi)
            return false;
    }
    return true;
}

namespace {

struct ScaledProblem {
    Interval1D A, B;
    ZRootTwo back_scale; // solutions map back via alpha -> back_scale * alpha
};

// Rescale so that width(A) lands in [1/lambda, 1); the joint problem is
// invariant under A -> lambda^-1 A, B -> -lambda B.
ScaledProblem rescale(const Interval1D &A, const Interval1D &B, long prec) {
    RealInterval alo = A.lo.enclosure(prec), ahi = A.hi.enclosure(prec);
    RealInterval width = iv_sub(ahi, alo, prec);
    long m = 0;
    if (width.hi.sign() > 0) {
        // m = floor(log_lambda(width)) + 1, computed at full range via mpfr
        RealInterval w(width.hi, width.hi);
        RealInterval lg = iv_log(w, prec);
        RealInterval lam = iv_add(RealInterval::point_long(1, prec), RealInterval::sqrt2(prec), prec);
        RealInterval ratio = iv_div(lg, iv_log(lam, prec), prec);
        m = static_cast<long>(std::floor(ratio.mid_double())) + 1;
    }
    ZRootTwo a_scale = ZRootTwo::lambda().pow(-m);
    ZRootTwo b_scale = ZRootTwo::lambda().pow(m);
    if (m % 2 != 0)
        b_scale = -b_scale; // (-lambda)^m
    ScaledProblem sp;
    sp.A = {A.lo.scaled(a_scale, prec), A.hi.scaled(a_scale, prec)};
    Endpoint b0 = B.lo.scaled(b_scale, prec), b1 = B.hi.scaled(b_scale, prec);
    if (b_scale.sign() < 0)
        std::swap(b0, b1);
    sp.B = {b0, b1};
    sp.back_scale = ZRootTwo::lambda().pow(m);
    return sp;
}

} // namespace

std::vector<ZRootTwo> enumerate_grid_1d(const Interval1D &A, const Interval1D &B, long prec) {
    std::vector<ZRootTwo> out;
    ScaledProblem sp = rescale(A, B, prec);

    RealInterval alo = sp.A.lo.enclosure(prec), ahi = sp.A.hi.enclosure(prec);
    RealInterval blo = sp.B.lo.enclosure(prec), bhi = sp.B.hi.enclosure(prec);
    if (ahi.hi < alo.lo || bhi.hi < blo.lo)
        return out;

    // b range from alpha - alpha_bullet = 2 b sqrt2 in [A.lo - B.hi, A.hi - B.lo]
    long p2 = std::max<long>(prec, 96);
    RealInterval sqrt8 = iv_mul(RealInterval::point_long(2, p2), RealInterval::sqrt2(p2), p2);
    RealInterval b_lo_iv = iv_div(iv_sub(alo, bhi, p2), sqrt8, p2);
    RealInterval b_hi_iv = iv_div(iv_sub(ahi, blo, p2), sqrt8, p2);
    mpz_class b_min = floor_lo(b_lo_iv);
    mpz_class b_max = ceil_hi(b_hi_iv);

    RealInterval sqrt2 = RealInterval::sqrt2(p2);
    for (mpz_class b = b_min; b <= b_max; ++b) {
        RealInterval bs = iv_mul(RealInterval::from_mpz(b, p2), sqrt2, p2);
        RealInterval a_lo_iv = iv_sub(alo, bs, p2);
        RealInterval a_hi_iv = iv_sub(ahi, bs, p2);
        mpz_class a_min = floor_lo(a_lo_iv);
        mpz_class a_max = ceil_hi(a_hi_iv);
        for (mpz_class a = a_min; a <= a_max; ++a) {
            ZRootTwo cand(a, b);
            if (sp.A.contains(cand, prec) && sp.B.contains(cand.bullet(), prec))
                out.push_back(cand * sp.back_scale);
        }
    }

    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace ctsynth
