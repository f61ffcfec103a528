#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <utility>

namespace ctsynth {

/**
 * Arbitrary-precision binary float, a thin RAII wrapper around mpfr_t.
 * The represented value is exactly sign * mantissa * 2^exponent at the
 * precision fixed at construction time.
 */
class BigFloat {
  public:
    explicit BigFloat(long prec = 64) {
        mpfr_init2(v_, prec < MPFR_PREC_MIN ? MPFR_PREC_MIN : prec);
        mpfr_set_zero(v_, 1);
    }

    BigFloat(const BigFloat &o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }

    BigFloat(BigFloat &&o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }

    BigFloat &operator=(const BigFloat &o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }

    BigFloat &operator=(BigFloat &&o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }

    ~BigFloat() { mpfr_clear(v_); }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    long precision() const { return mpfr_get_prec(v_); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    int sign() const { return mpfr_sgn(v_); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }

    static int cmp(const BigFloat &a, const BigFloat &b) { return mpfr_cmp(a.v_, b.v_); }

    bool operator<(const BigFloat &o) const { return cmp(*this, o) < 0; }
    bool operator<=(const BigFloat &o) const { return cmp(*this, o) <= 0; }
    bool operator>(const BigFloat &o) const { return cmp(*this, o) > 0; }
    bool operator>=(const BigFloat &o) const { return cmp(*this, o) >= 0; }
    bool operator==(const BigFloat &o) const { return cmp(*this, o) == 0; }

    static BigFloat from_long(long x, long prec) {
        BigFloat r(prec);
        mpfr_set_si(r.v_, x, MPFR_RNDN);
        return r;
    }

    static BigFloat from_mpz(const mpz_class &x, long prec, mpfr_rnd_t rnd) {
        BigFloat r(prec);
        mpfr_set_z(r.v_, x.get_mpz_t(), rnd);
        return r;
    }

    static BigFloat from_mpq(const mpq_class &x, long prec, mpfr_rnd_t rnd) {
        BigFloat r(prec);
        mpfr_set_q(r.v_, x.get_mpq_t(), rnd);
        return r;
    }

    std::string to_string(int sig_digits = 8) const {
        char *s = nullptr;
        mpfr_asprintf(&s, "%.*Rg", sig_digits, v_);
        std::string out(s);
        mpfr_free_str(s);
        return out;
    }

  private:
    mpfr_t v_;
};

/**
 * Closed interval [lo, hi] of BigFloats. Every arithmetic operation
 * returns an enclosure of the exact result (directed rounding outward).
 */
class RealInterval {
  public:
    BigFloat lo, hi;

    RealInterval() : lo(64), hi(64) {}
    RealInterval(BigFloat l, BigFloat h) : lo(std::move(l)), hi(std::move(h)) {}

    long precision() const { return lo.precision() > hi.precision() ? lo.precision() : hi.precision(); }

    static RealInterval point_long(long x, long prec);
    static RealInterval from_mpz(const mpz_class &x, long prec);
    static RealInterval from_mpq(const mpq_class &x, long prec);
    static RealInterval sqrt2(long prec);
    static RealInterval pi(long prec);
    static RealInterval hull(const RealInterval &a, const RealInterval &b);

    bool valid() const { return lo.is_finite() && hi.is_finite() && lo <= hi; }
    double mid_double() const { return 0.5 * (lo.to_double() + hi.to_double()); }
    BigFloat mid() const;
    BigFloat width() const;

    bool contains_zero() const { return lo.sign() <= 0 && hi.sign() >= 0; }
    bool certainly_positive() const { return lo.sign() > 0; }
    bool certainly_negative() const { return hi.sign() < 0; }
    bool contains(const RealInterval &inner) const { return lo <= inner.lo && inner.hi <= hi; }

    std::string to_string(int sig_digits = 8) const {
        return "[" + lo.to_string(sig_digits) + ", " + hi.to_string(sig_digits) + "]";
    }
};

RealInterval iv_add(const RealInterval &a, const RealInterval &b, long prec);
RealInterval iv_sub(const RealInterval &a, const RealInterval &b, long prec);
RealInterval iv_mul(const RealInterval &a, const RealInterval &b, long prec);
RealInterval iv_div(const RealInterval &a, const RealInterval &b, long prec);
RealInterval iv_neg(const RealInterval &a);
RealInterval iv_abs(const RealInterval &a, long prec);
RealInterval iv_sqr(const RealInterval &a, long prec);
RealInterval iv_sqrt(const RealInterval &a, long prec);
RealInterval iv_exp(const RealInterval &a, long prec);
RealInterval iv_log(const RealInterval &a, long prec);
// Valid on all of R (Lipschitz-1 padding around endpoint evaluations).
RealInterval iv_sin(const RealInterval &a, long prec);
RealInterval iv_cos(const RealInterval &a, long prec);

RealInterval iv_add(const RealInterval &a, const RealInterval &b);
RealInterval iv_sub(const RealInterval &a, const RealInterval &b);
RealInterval iv_mul(const RealInterval &a, const RealInterval &b);
RealInterval iv_div(const RealInterval &a, const RealInterval &b);

// floor of the lower/upper endpoint as exact integers
mpz_class floor_lo(const RealInterval &a);
mpz_class floor_hi(const RealInterval &a);
mpz_class ceil_lo(const RealInterval &a);
mpz_class ceil_hi(const RealInterval &a);

} // namespace ctsynth
