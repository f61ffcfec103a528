#pragma once

#include <gmpxx.h>

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace ctsynth {

class ZOmega;
class DOmega;

mpz_class rounddiv(const mpz_class &a, const mpz_class &b);
mpz_class floordiv(const mpz_class &a, const mpz_class &b);

/**
 * Quadratic integer a + b*sqrt(2).
 */
class ZRootTwo {
  public:
    mpz_class a, b;

    ZRootTwo() : a(0), b(0) {}
    ZRootTwo(mpz_class a_, mpz_class b_) : a(std::move(a_)), b(std::move(b_)) {}
    explicit ZRootTwo(long x) : a(x), b(0) {}

    static ZRootTwo zero() { return ZRootTwo(0); }
    static ZRootTwo one() { return ZRootTwo(1); }
    static ZRootTwo sqrt2() { return ZRootTwo(mpz_class(0), mpz_class(1)); }
    static ZRootTwo lambda() { return ZRootTwo(mpz_class(1), mpz_class(1)); }
    static ZRootTwo lambda_inv() { return ZRootTwo(mpz_class(-1), mpz_class(1)); }

    bool operator==(const ZRootTwo &o) const { return a == o.a && b == o.b; }
    bool operator!=(const ZRootTwo &o) const { return !(*this == o); }
    bool is_zero() const { return a == 0 && b == 0; }

    ZRootTwo operator+(const ZRootTwo &o) const { return {a + o.a, b + o.b}; }
    ZRootTwo operator-(const ZRootTwo &o) const { return {a - o.a, b - o.b}; }
    ZRootTwo operator-() const { return {-a, -b}; }
    ZRootTwo operator*(const ZRootTwo &o) const { return {a * o.a + 2 * b * o.b, a * o.b + b * o.a}; }
    ZRootTwo operator*(const mpz_class &s) const { return {a * s, b * s}; }

    /// sqrt(2)-conjugation: sqrt(2) -> -sqrt(2)
    ZRootTwo bullet() const { return {a, -b}; }

    /// a^2 - 2 b^2 (an ordinary integer, possibly negative)
    mpz_class norm() const { return a * a - 2 * b * b; }

    int sign() const;

    bool operator<(const ZRootTwo &o) const { return (*this - o).sign() < 0; }
    bool operator<=(const ZRootTwo &o) const { return (*this - o).sign() <= 0; }
    bool operator>(const ZRootTwo &o) const { return o < *this; }
    bool operator>=(const ZRootTwo &o) const { return o <= *this; }

    /// Multiplicative inverse; defined for units (norm +-1) only.
    ZRootTwo inv() const;

    ZRootTwo pow(long e) const;

    std::pair<ZRootTwo, ZRootTwo> divmod(const ZRootTwo &o) const;
    bool divides(const ZRootTwo &x) const;
    ZRootTwo operator/(const ZRootTwo &o) const;

    std::string to_string() const;
};

ZRootTwo gcd(const ZRootTwo &x, const ZRootTwo &y);
bool associates(const ZRootTwo &x, const ZRootTwo &y);

/// Positive associate with real value in [1, lambda); 0 maps to 0.
ZRootTwo canonical_associate(const ZRootTwo &x);

/**
 * Unit of Z[sqrt(2)]: (-1)^s * lambda^m.
 */
struct ZUnit {
    bool minus = false;
    long m = 0;

    ZRootTwo to_ring() const;
    bool doubly_positive() const { return !minus && m % 2 == 0; }
    /// Square root of a doubly positive unit (lambda^(m/2)).
    ZUnit sqrt() const;

    static std::optional<ZUnit> from_ring(const ZRootTwo &u);
};

/**
 * Dyadic quadratic number alpha / sqrt(2)^k, stored with the least
 * denominator exponent k >= 0.
 */
class DRootTwo {
  public:
    DRootTwo() : alpha_(), k_(0) {}
    DRootTwo(ZRootTwo alpha, long k) : alpha_(std::move(alpha)), k_(k) { reduce(); }
    explicit DRootTwo(long x) : alpha_(x), k_(0) {}
    static DRootTwo from_zroottwo(const ZRootTwo &x) { return DRootTwo(x, 0); }

    const ZRootTwo &alpha() const { return alpha_; }
    long k() const { return k_; }

    bool is_zero() const { return alpha_.is_zero(); }
    bool operator==(const DRootTwo &o) const { return alpha_ == o.alpha_ && k_ == o.k_; }
    bool operator!=(const DRootTwo &o) const { return !(*this == o); }

    DRootTwo operator+(const DRootTwo &o) const;
    DRootTwo operator-(const DRootTwo &o) const { return *this + (-o); }
    DRootTwo operator-() const { return raw(-alpha_, k_); }
    DRootTwo operator*(const DRootTwo &o) const { return DRootTwo(alpha_ * o.alpha_, k_ + o.k_); }

    DRootTwo bullet() const;

    int sign() const { return alpha_.sign(); }
    bool operator<(const DRootTwo &o) const { return (*this - o).sign() < 0; }
    bool operator<=(const DRootTwo &o) const { return (*this - o).sign() <= 0; }
    bool operator>=(const DRootTwo &o) const { return (*this - o).sign() >= 0; }

    /// Exact division; throws if the quotient leaves D[sqrt 2].
    DRootTwo operator/(const DRootTwo &o) const;

    /// Numerator after scaling to denominator exponent k >= k().
    ZRootTwo numerator_at(long k) const;

    std::string to_string() const;

  private:
    static DRootTwo raw(ZRootTwo alpha, long k) {
        DRootTwo r;
        r.alpha_ = std::move(alpha);
        r.k_ = k;
        return r;
    }
    void reduce();

    ZRootTwo alpha_;
    long k_;
};

/**
 * Rational combination a + b*sqrt(2), a,b in Q. Used for exact interval
 * endpoints in the one-dimensional grid solver.
 */
class QRootTwo {
  public:
    mpq_class a, b;

    QRootTwo() : a(0), b(0) {}
    QRootTwo(mpq_class a_, mpq_class b_) : a(std::move(a_)), b(std::move(b_)) {
        this->a.canonicalize();
        this->b.canonicalize();
    }
    explicit QRootTwo(const mpq_class &x) : a(x), b(0) {}
    explicit QRootTwo(const ZRootTwo &x) : a(x.a), b(x.b) {}

    static QRootTwo from_droottwo(const DRootTwo &x);

    bool operator==(const QRootTwo &o) const { return a == o.a && b == o.b; }

    QRootTwo operator+(const QRootTwo &o) const { return {a + o.a, b + o.b}; }
    QRootTwo operator-(const QRootTwo &o) const { return {a - o.a, b - o.b}; }
    QRootTwo operator-() const { return {-a, -b}; }
    QRootTwo operator*(const QRootTwo &o) const { return {a * o.a + 2 * b * o.b, a * o.b + b * o.a}; }

    QRootTwo bullet() const { return {a, -b}; }

    int sign() const;
    bool operator<(const QRootTwo &o) const { return (*this - o).sign() < 0; }
    bool operator<=(const QRootTwo &o) const { return (*this - o).sign() <= 0; }

    mpz_class floor() const;
    mpz_class ceil() const { return -(-*this).floor(); }

    std::string to_string() const;
};

/**
 * Cyclotomic integer a*w^3 + b*w^2 + c*w + d, w = exp(i pi/4).
 */
class ZOmega {
  public:
    mpz_class a, b, c, d;

    ZOmega() : a(0), b(0), c(0), d(0) {}
    ZOmega(mpz_class a_, mpz_class b_, mpz_class c_, mpz_class d_)
        : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {}
    explicit ZOmega(long x) : a(0), b(0), c(0), d(x) {}

    static ZOmega omega() { return {mpz_class(0), mpz_class(0), mpz_class(1), mpz_class(0)}; }
    static ZOmega omega_power(long n);
    static ZOmega sqrt2() { return {mpz_class(-1), mpz_class(0), mpz_class(1), mpz_class(0)}; }
    static ZOmega delta() { return {mpz_class(0), mpz_class(0), mpz_class(1), mpz_class(1)}; }
    static ZOmega from_zroottwo(const ZRootTwo &x) { return {-x.b, mpz_class(0), x.b, x.a}; }

    bool operator==(const ZOmega &o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
    bool operator!=(const ZOmega &o) const { return !(*this == o); }
    bool is_zero() const { return a == 0 && b == 0 && c == 0 && d == 0; }

    ZOmega operator+(const ZOmega &o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    ZOmega operator-(const ZOmega &o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    ZOmega operator-() const { return {-a, -b, -c, -d}; }
    ZOmega operator*(const ZOmega &o) const;
    ZOmega operator*(const mpz_class &s) const { return {a * s, b * s, c * s, d * s}; }

    /// Complex conjugation.
    ZOmega dagger() const { return {-c, -b, -a, d}; }
    /// sqrt(2)-conjugation.
    ZOmega bullet() const { return {-a, b, -c, d}; }

    ZOmega mul_by_omega_power(long n) const;

    /// True if this element is real, i.e. lies in Z[sqrt 2].
    bool is_real() const { return b == 0 && a == -c; }
    /// Inverse of from_zroottwo; requires is_real().
    ZRootTwo to_zroottwo() const;

    /// Absolute value of the rational norm N(v) = (v dagger v)(v dagger v)^bullet.
    mpz_class abs_norm() const;

    /// Coefficient parities packed as bits (a<<3 | b<<2 | c<<1 | d).
    int residue() const;

    bool divisible_by_sqrt2() const { return (a - c) % 2 == 0 && (b - d) % 2 == 0; }
    ZOmega divide_by_sqrt2() const;

    ZOmega pow(long e) const;

    std::pair<ZOmega, ZOmega> divmod(const ZOmega &o) const;
    bool divides(const ZOmega &x) const;
    ZOmega operator/(const ZOmega &o) const;

    std::string to_string() const;
};

ZOmega gcd(const ZOmega &x, const ZOmega &y);

/**
 * Dyadic cyclotomic number u / sqrt(2)^k with least denominator exponent k.
 * These are the matrix entries of exactly representable Clifford+T
 * operators.
 */
class DOmega {
  public:
    DOmega() : u_(), k_(0) {}
    DOmega(ZOmega u, long k) : u_(std::move(u)), k_(k) { reduce(); }
    explicit DOmega(long x) : u_(x), k_(0) {}
    static DOmega from_zomega(const ZOmega &u) { return DOmega(u, 0); }
    static DOmega from_droottwo(const DRootTwo &x) {
        return DOmega(ZOmega::from_zroottwo(x.alpha()), x.k());
    }

    const ZOmega &u() const { return u_; }
    long k() const { return k_; }

    bool is_zero() const { return u_.is_zero(); }
    bool operator==(const DOmega &o) const { return u_ == o.u_ && k_ == o.k_; }
    bool operator!=(const DOmega &o) const { return !(*this == o); }

    DOmega operator+(const DOmega &o) const;
    DOmega operator-(const DOmega &o) const { return *this + (-o); }
    DOmega operator-() const { return raw(-u_, k_); }
    DOmega operator*(const DOmega &o) const { return DOmega(u_ * o.u_, k_ + o.k_); }

    DOmega dagger() const { return raw(u_.dagger(), k_); }
    DOmega bullet() const {
        ZOmega v = u_.bullet();
        return raw(k_ % 2 != 0 ? -v : v, k_);
    }
    DOmega mul_by_omega_power(long n) const { return raw(u_.mul_by_omega_power(n), k_); }

    /// |u|^2 = u dagger u as an element of D[sqrt 2].
    DRootTwo abs_sq() const;

    /// Real and imaginary parts as elements of D[sqrt 2].
    DRootTwo real() const;
    DRootTwo imag() const;
    static DOmega from_real_imag(const DRootTwo &re, const DRootTwo &im);

    /// Numerator after scaling to denominator exponent k >= k().
    ZOmega numerator_at(long k) const;

    std::string to_string() const;
    static DOmega parse(const std::string &s);

  private:
    static DOmega raw(ZOmega u, long k) {
        DOmega r;
        r.u_ = std::move(u);
        r.k_ = k;
        return r;
    }
    void reduce();

    ZOmega u_;
    long k_;
};

long least_denom_exponent(const DOmega &u);
long least_denom_exponent(const DRootTwo &x);

/// Least k such that delta^k * u lies in Z[omega] (delta = 1 + omega).
long delta_exponent(const DOmega &u);

/// u = alpha + beta*i + offset with offset in {0, omega}.
struct RealImagDecomposition {
    ZRootTwo alpha, beta;
    bool omega_offset;
};
RealImagDecomposition decompose_real_imag(const ZOmega &u);

std::ostream &operator<<(std::ostream &os, const ZRootTwo &x);
std::ostream &operator<<(std::ostream &os, const ZOmega &x);
std::ostream &operator<<(std::ostream &os, const DRootTwo &x);
std::ostream &operator<<(std::ostream &os, const DOmega &x);

} // namespace ctsynth
