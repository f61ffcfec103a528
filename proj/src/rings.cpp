#include "ctsynth/rings.hpp"

#include "ctsynth/bigfloat.hpp"

#include <cctype>
#include <ostream>
#include <sstream>

namespace ctsynth {

mpz_class floordiv(const mpz_class &a, const mpz_class &b) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

mpz_class rounddiv(const mpz_class &a, const mpz_class &b) {
    if (b == 0)
        throw std::domain_error("rounddiv: division by zero");
    mpz_class bb = b, aa = a;
    if (bb < 0) {
        bb = -bb;
        aa = -aa;
    }
    return floordiv(2 * aa + bb, 2 * bb);
}

// ---------------------------------------------------------------- ZRootTwo

int ZRootTwo::sign() const {
    int sa = mpz_sgn(a.get_mpz_t());
    int sb = mpz_sgn(b.get_mpz_t());
    if (sa == 0 && sb == 0)
        return 0;
    if (sa >= 0 && sb >= 0)
        return 1;
    if (sa <= 0 && sb <= 0)
        return -1;
    // opposite signs: compare a^2 against 2 b^2
    mpz_class a2 = a * a, b2 = 2 * b * b;
    if (sa > 0)
        return a2 > b2 ? 1 : (a2 < b2 ? -1 : 0);
    return a2 > b2 ? -1 : (a2 < b2 ? 1 : 0);
}

ZRootTwo ZRootTwo::inv() const {
    mpz_class n = norm();
    if (n == 1)
        return bullet();
    if (n == -1)
        return -bullet();
    throw std::domain_error("ZRootTwo::inv: not a unit");
}

ZRootTwo ZRootTwo::pow(long e) const {
    if (e < 0)
        return inv().pow(-e);
    ZRootTwo result = ZRootTwo::one();
    ZRootTwo base = *this;
    while (e > 0) {
        if (e & 1)
            result = result * base;
        base = base * base;
        e >>= 1;
    }
    return result;
}

std::pair<ZRootTwo, ZRootTwo> ZRootTwo::divmod(const ZRootTwo &o) const {
    if (o.is_zero())
        throw std::domain_error("ZRootTwo::divmod: division by zero");
    ZRootTwo p = (*this) * o.bullet();
    mpz_class n = o.norm();
    ZRootTwo q(rounddiv(p.a, n), rounddiv(p.b, n));
    ZRootTwo r = *this - o * q;
    return {q, r};
}

bool ZRootTwo::divides(const ZRootTwo &x) const { return x.divmod(*this).second.is_zero(); }

ZRootTwo ZRootTwo::operator/(const ZRootTwo &o) const {
    auto [q, r] = divmod(o);
    if (!r.is_zero())
        throw std::domain_error("ZRootTwo::operator/: inexact division");
    return q;
}

ZRootTwo gcd(const ZRootTwo &x, const ZRootTwo &y) {
    if (x.is_zero() && y.is_zero())
        throw std::domain_error("gcd(ZRootTwo): both arguments zero");
    ZRootTwo a = x, b = y;
    while (!b.is_zero()) {
        ZRootTwo r = a.divmod(b).second;
        a = b;
        b = r;
    }
    return canonical_associate(a);
}

bool associates(const ZRootTwo &x, const ZRootTwo &y) {
    if (x.is_zero() || y.is_zero())
        return x.is_zero() && y.is_zero();
    return x.divides(y) && y.divides(x);
}

namespace {

// Enclosure of the real value a + b sqrt(2).
RealInterval eval_zroottwo(const ZRootTwo &x, long prec) {
    RealInterval ia = RealInterval::from_mpz(x.a, prec);
    RealInterval ib = RealInterval::from_mpz(x.b, prec);
    return iv_add(ia, iv_mul(ib, RealInterval::sqrt2(prec), prec), prec);
}

// floor(log_lambda(value)) estimate for a positive element.
long lambda_exponent_estimate(const ZRootTwo &x) {
    long prec = 64 + static_cast<long>(mpz_sizeinbase(x.a.get_mpz_t(), 2)) +
                static_cast<long>(mpz_sizeinbase(x.b.get_mpz_t(), 2));
    RealInterval v = eval_zroottwo(x, prec);
    if (!v.certainly_positive())
        throw std::domain_error("lambda_exponent_estimate: not positive");
    RealInterval lg = iv_log(v, prec);
    RealInterval ll = iv_log(eval_zroottwo(ZRootTwo::lambda(), prec), prec);
    RealInterval m = iv_div(lg, ll, prec);
    return static_cast<long>(m.mid_double());
}

} // namespace

ZRootTwo canonical_associate(const ZRootTwo &x) {
    if (x.is_zero())
        return x;
    ZRootTwo y = x.sign() < 0 ? -x : x;
    long m = lambda_exponent_estimate(y);
    y = y * ZRootTwo::lambda().pow(-m);
    const ZRootTwo one = ZRootTwo::one();
    const ZRootTwo lam = ZRootTwo::lambda();
    while (y < one)
        y = y * lam;
    while (y >= lam)
        y = y * ZRootTwo::lambda_inv();
    return y;
}

// ------------------------------------------------------------------ ZUnit

ZRootTwo ZUnit::to_ring() const {
    ZRootTwo r = ZRootTwo::lambda().pow(m);
    return minus ? -r : r;
}

ZUnit ZUnit::sqrt() const {
    if (!doubly_positive())
        throw std::domain_error("ZUnit::sqrt: unit is not doubly positive");
    return ZUnit{false, m / 2};
}

std::optional<ZUnit> ZUnit::from_ring(const ZRootTwo &u) {
    mpz_class n = u.norm();
    if (n != 1 && n != -1)
        return std::nullopt;
    ZUnit r;
    ZRootTwo y = u;
    if (y.sign() < 0) {
        r.minus = true;
        y = -y;
    }
    long m = lambda_exponent_estimate(y);
    y = y * ZRootTwo::lambda().pow(-m);
    const ZRootTwo one = ZRootTwo::one();
    const ZRootTwo lam = ZRootTwo::lambda();
    while (y < one) {
        y = y * lam;
        --m;
    }
    while (y >= lam) {
        y = y * ZRootTwo::lambda_inv();
        ++m;
    }
    if (!(y == one))
        return std::nullopt;
    r.m = m;
    return r;
}

// --------------------------------------------------------------- DRootTwo

void DRootTwo::reduce() {
    while (k_ < 0) {
        alpha_ = alpha_ * ZRootTwo::sqrt2();
        ++k_;
    }
    while (k_ > 0 && mpz_even_p(alpha_.a.get_mpz_t())) {
        alpha_ = ZRootTwo(alpha_.b, alpha_.a / 2);
        --k_;
    }
    if (alpha_.is_zero())
        k_ = 0;
}

ZRootTwo DRootTwo::numerator_at(long k) const {
    if (k < k_)
        throw std::domain_error("DRootTwo::numerator_at: exponent below least");
    long d = k - k_;
    ZRootTwo r = alpha_;
    mpz_class two_pow;
    mpz_ui_pow_ui(two_pow.get_mpz_t(), 2, static_cast<unsigned long>(d / 2));
    r = r * two_pow;
    if (d % 2 != 0)
        r = r * ZRootTwo::sqrt2();
    return r;
}

DRootTwo DRootTwo::operator+(const DRootTwo &o) const {
    long k = std::max(k_, o.k_);
    return DRootTwo(numerator_at(k) + o.numerator_at(k), k);
}

DRootTwo DRootTwo::bullet() const {
    ZRootTwo v = alpha_.bullet();
    return raw(k_ % 2 != 0 ? -v : v, k_);
}

DRootTwo DRootTwo::operator/(const DRootTwo &o) const {
    if (o.is_zero())
        throw std::domain_error("DRootTwo::operator/: division by zero");
    // x / y = x * y_bullet * sqrt(2)^{k2} / norm(alpha2), with the integer
    // norm split into sign * 2^e * odd.
    ZRootTwo num = alpha_ * o.alpha_.bullet();
    mpz_class n = o.alpha_.norm();
    long k = k_ - o.k_;
    int sgn = mpz_sgn(n.get_mpz_t());
    if (sgn < 0)
        n = -n;
    unsigned long e = mpz_scan1(n.get_mpz_t(), 0);
    mpz_class odd = n >> e;
    k += 2 * static_cast<long>(e);
    if (sgn < 0)
        num = -num;
    if (odd != 1) {
        if (num.a % odd != 0 || num.b % odd != 0)
            throw std::domain_error("DRootTwo::operator/: inexact division");
        num = ZRootTwo(num.a / odd, num.b / odd);
    }
    return DRootTwo(num, k);
}

// --------------------------------------------------------------- QRootTwo

QRootTwo QRootTwo::from_droottwo(const DRootTwo &x) {
    long k = x.k();
    long q = k / 2, r = k % 2;
    mpz_class two_pow;
    mpz_ui_pow_ui(two_pow.get_mpz_t(), 2, static_cast<unsigned long>(q));
    mpq_class scale(1, two_pow);
    mpq_class a(x.alpha().a), b(x.alpha().b);
    if (r == 0)
        return {a * scale, b * scale};
    // (a + b sqrt2) / (2^q sqrt2) = (b / 2^q) + (a / 2^{q+1}) sqrt2
    return {b * scale, a * scale / 2};
}

int QRootTwo::sign() const {
    int sa = sgn(a);
    int sb = sgn(b);
    if (sa == 0 && sb == 0)
        return 0;
    if (sa >= 0 && sb >= 0)
        return 1;
    if (sa <= 0 && sb <= 0)
        return -1;
    mpq_class a2 = a * a, b2 = 2 * b * b;
    if (sa > 0)
        return a2 > b2 ? 1 : (a2 < b2 ? -1 : 0);
    return a2 > b2 ? -1 : (a2 < b2 ? 1 : 0);
}

mpz_class QRootTwo::floor() const {
    long prec = 128 + static_cast<long>(mpz_sizeinbase(a.get_num().get_mpz_t(), 2)) +
                static_cast<long>(mpz_sizeinbase(b.get_num().get_mpz_t(), 2));
    RealInterval ia = RealInterval::from_mpq(a, prec);
    RealInterval ib = RealInterval::from_mpq(b, prec);
    RealInterval v = iv_add(ia, iv_mul(ib, RealInterval::sqrt2(prec), prec), prec);
    mpz_class n = floor_hi(v);
    // verify and adjust exactly: want n <= x < n + 1
    auto geq = [this](const mpz_class &t) {
        QRootTwo diff(a - mpq_class(t), b);
        return diff.sign() >= 0;
    };
    while (!geq(n))
        --n;
    while (geq(n + 1))
        ++n;
    return n;
}

std::string QRootTwo::to_string() const {
    std::ostringstream os;
    os << a.get_str() << "+" << b.get_str() << "*sqrt2";
    return os.str();
}

// ------------------------------------------------------------------ ZOmega

ZOmega ZOmega::omega_power(long n) {
    return ZOmega(1).mul_by_omega_power(n);
}

ZOmega ZOmega::operator*(const ZOmega &o) const {
    // multiplication modulo w^4 + 1
    const mpz_class r0 = d * o.d;
    const mpz_class r1 = d * o.c + c * o.d;
    const mpz_class r2 = d * o.b + c * o.c + b * o.d;
    const mpz_class r3 = d * o.a + c * o.b + b * o.c + a * o.d;
    const mpz_class r4 = c * o.a + b * o.b + a * o.c;
    const mpz_class r5 = b * o.a + a * o.b;
    const mpz_class r6 = a * o.a;
    return {r3, r2 - r6, r1 - r5, r0 - r4};
}

ZOmega ZOmega::mul_by_omega_power(long n) const {
    n &= 7;
    switch (n) {
    case 0:
        return *this;
    case 1:
        return {b, c, d, -a};
    case 2:
        return {c, d, -a, -b};
    case 3:
        return {d, -a, -b, -c};
    case 4:
        return {-a, -b, -c, -d};
    case 5:
        return {-b, -c, -d, a};
    case 6:
        return {-c, -d, a, b};
    default:
        return {-d, a, b, c};
    }
}

ZRootTwo ZOmega::to_zroottwo() const {
    if (!is_real())
        throw std::domain_error("ZOmega::to_zroottwo: element is not real");
    return {d, c};
}

mpz_class ZOmega::abs_norm() const {
    mpz_class s = a * a + b * b + c * c + d * d;
    mpz_class t = c * d + b * c + a * b - d * a;
    mpz_class n = s * s - 2 * t * t;
    return n < 0 ? mpz_class(-n) : n;
}

int ZOmega::residue() const {
    int ra = mpz_odd_p(a.get_mpz_t()) ? 1 : 0;
    int rb = mpz_odd_p(b.get_mpz_t()) ? 1 : 0;
    int rc = mpz_odd_p(c.get_mpz_t()) ? 1 : 0;
    int rd = mpz_odd_p(d.get_mpz_t()) ? 1 : 0;
    return (ra << 3) | (rb << 2) | (rc << 1) | rd;
}

ZOmega ZOmega::divide_by_sqrt2() const {
    if (!divisible_by_sqrt2())
        throw std::domain_error("ZOmega::divide_by_sqrt2: not divisible");
    return {(b - d) / 2, (a + c) / 2, (b + d) / 2, (c - a) / 2};
}

ZOmega ZOmega::pow(long e) const {
    if (e < 0)
        throw std::domain_error("ZOmega::pow: negative exponent");
    ZOmega result(1);
    ZOmega base = *this;
    while (e > 0) {
        if (e & 1)
            result = result * base;
        base = base * base;
        e >>= 1;
    }
    return result;
}

std::pair<ZOmega, ZOmega> ZOmega::divmod(const ZOmega &o) const {
    if (o.is_zero())
        throw std::domain_error("ZOmega::divmod: division by zero");
    // multiply by the three remaining conjugates of o; the denominator is
    // then the rational norm of o.
    ZOmega p = (*this) * o.dagger() * o.dagger().bullet() * o.bullet();
    mpz_class s = o.a * o.a + o.b * o.b + o.c * o.c + o.d * o.d;
    mpz_class t = o.c * o.d + o.b * o.c + o.a * o.b - o.d * o.a;
    mpz_class n = s * s - 2 * t * t;
    ZOmega q(rounddiv(p.a, n), rounddiv(p.b, n), rounddiv(p.c, n), rounddiv(p.d, n));
    ZOmega r = *this - o * q;
    return {q, r};
}

bool ZOmega::divides(const ZOmega &x) const { return x.divmod(*this).second.is_zero(); }

ZOmega ZOmega::operator/(const ZOmega &o) const {
    auto [q, r] = divmod(o);
    if (!r.is_zero())
        throw std::domain_error("ZOmega::operator/: inexact division");
    return q;
}

ZOmega gcd(const ZOmega &x, const ZOmega &y) {
    if (x.is_zero() && y.is_zero())
        throw std::domain_error("gcd(ZOmega): both arguments zero");
    ZOmega a = x, b = y;
    while (!b.is_zero()) {
        ZOmega r = a.divmod(b).second;
        a = b;
        b = r;
    }
    return a;
}

// ------------------------------------------------------------------ DOmega

void DOmega::reduce() {
    while (k_ < 0) {
        u_ = u_ * ZOmega::sqrt2();
        ++k_;
    }
    while (k_ > 0 && u_.divisible_by_sqrt2()) {
        u_ = u_.divide_by_sqrt2();
        --k_;
    }
    if (u_.is_zero())
        k_ = 0;
}

ZOmega DOmega::numerator_at(long k) const {
    if (k < k_)
        throw std::domain_error("DOmega::numerator_at: exponent below least");
    long d = k - k_;
    ZOmega r = u_;
    mpz_class two_pow;
    mpz_ui_pow_ui(two_pow.get_mpz_t(), 2, static_cast<unsigned long>(d / 2));
    r = r * two_pow;
    if (d % 2 != 0)
        r = r * ZOmega::sqrt2();
    return r;
}

DOmega DOmega::operator+(const DOmega &o) const {
    long k = std::max(k_, o.k_);
    return DOmega(numerator_at(k) + o.numerator_at(k), k);
}

DRootTwo DOmega::abs_sq() const {
    ZOmega p = u_.dagger() * u_;
    return DRootTwo(p.to_zroottwo(), 2 * k_);
}

DRootTwo DOmega::real() const { return DRootTwo(ZRootTwo(u_.c - u_.a, u_.d), k_ + 1); }

DRootTwo DOmega::imag() const { return DRootTwo(ZRootTwo(u_.c + u_.a, u_.b), k_ + 1); }

DOmega DOmega::from_real_imag(const DRootTwo &re, const DRootTwo &im) {
    DOmega r = from_droottwo(re);
    DOmega i = from_droottwo(im) * DOmega(ZOmega::omega_power(2), 0);
    return r + i;
}

long least_denom_exponent(const DOmega &u) { return u.k(); }
long least_denom_exponent(const DRootTwo &x) { return x.k(); }

long delta_exponent(const DOmega &u) {
    DOmega v = u;
    const DOmega delta(ZOmega::delta(), 0);
    long k = 0;
    while (v.k() > 0) {
        v = v * delta;
        ++k;
    }
    return k;
}

RealImagDecomposition decompose_real_imag(const ZOmega &u) {
    RealImagDecomposition r;
    mpz_class ca = u.c - u.a;
    if (mpz_even_p(ca.get_mpz_t())) {
        r.alpha = ZRootTwo(u.d, (u.c - u.a) / 2);
        r.beta = ZRootTwo(u.b, (u.c + u.a) / 2);
        r.omega_offset = false;
    } else {
        r.alpha = ZRootTwo(u.d, floordiv(u.c - u.a - 1, 2));
        r.beta = ZRootTwo(u.b, floordiv(u.c + u.a - 1, 2));
        r.omega_offset = true;
    }
    return r;
}

// ------------------------------------------------------------- rendering

std::string ZRootTwo::to_string() const {
    std::ostringstream os;
    os << a.get_str();
    if (b >= 0)
        os << "+";
    os << b.get_str() << "*sqrt2";
    return os.str();
}

std::string DRootTwo::to_string() const {
    if (k_ == 0)
        return alpha_.to_string();
    std::ostringstream os;
    os << "(" << alpha_.to_string() << ")/sqrt2^" << k_;
    return os.str();
}

namespace {

void append_term(std::ostringstream &os, const mpz_class &coef, const char *mono, bool &first) {
    if (coef == 0)
        return;
    if (coef > 0 && !first)
        os << "+";
    if (coef == -1 && *mono)
        os << "-";
    else if (!(coef == 1 && *mono))
        os << coef.get_str();
    if (*mono) {
        if (coef == 1 || coef == -1)
            os << mono;
        else
            os << "*" << mono;
    }
    first = false;
}

std::string zomega_poly(const ZOmega &v) {
    if (v.is_zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    append_term(os, v.a, "w^3", first);
    append_term(os, v.b, "w^2", first);
    append_term(os, v.c, "w", first);
    append_term(os, v.d, "", first);
    return os.str();
}

} // namespace

std::string ZOmega::to_string() const { return zomega_poly(*this); }

std::string DOmega::to_string() const {
    if (k_ == 0)
        return zomega_poly(u_);
    std::ostringstream os;
    os << "√2^-" << k_ << " * (" << zomega_poly(u_) << ")";
    return os.str();
}

namespace {

struct Parser {
    const std::string &s;
    size_t pos = 0;

    explicit Parser(const std::string &str) : s(str) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
    }

    bool eat(const std::string &tok) {
        skip_ws();
        if (s.compare(pos, tok.size(), tok) == 0) {
            pos += tok.size();
            return true;
        }
        return false;
    }

    bool peek_digit() {
        skip_ws();
        return pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]));
    }

    mpz_class integer() {
        skip_ws();
        size_t start = pos;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-'))
            ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
            ++pos;
        if (pos == start || (pos == start + 1 && !std::isdigit(static_cast<unsigned char>(s[start]))))
            throw std::invalid_argument("DOmega::parse: expected integer near position " +
                                        std::to_string(start));
        return mpz_class(s.substr(start, pos - start));
    }

    // term := [int '*'] 'w' ['^' int] | int
    void term(int sign, ZOmega &acc) {
        skip_ws();
        mpz_class coef = 1;
        bool have_coef = false;
        if (peek_digit() || (pos < s.size() && (s[pos] == '+' || s[pos] == '-'))) {
            coef = integer();
            have_coef = true;
        }
        skip_ws();
        long power = 0;
        if (pos < s.size() && s[pos] == '*') {
            ++pos;
            skip_ws();
        }
        if (pos < s.size() && (s[pos] == 'w' || s[pos] == 'W')) {
            ++pos;
            power = 1;
            if (pos < s.size() && s[pos] == '^') {
                ++pos;
                power = static_cast<long>(mpz_get_si(integer().get_mpz_t()));
            }
        } else if (!have_coef) {
            throw std::invalid_argument("DOmega::parse: expected term at position " + std::to_string(pos));
        }
        if (sign < 0)
            coef = -coef;
        switch (power) {
        case 0:
            acc.d += coef;
            break;
        case 1:
            acc.c += coef;
            break;
        case 2:
            acc.b += coef;
            break;
        case 3:
            acc.a += coef;
            break;
        default:
            throw std::invalid_argument("DOmega::parse: omega power out of range");
        }
    }

    ZOmega poly() {
        ZOmega acc;
        int sign = 1;
        skip_ws();
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
            sign = s[pos] == '-' ? -1 : 1;
            ++pos;
        }
        term(sign, acc);
        while (true) {
            skip_ws();
            if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
                sign = s[pos] == '-' ? -1 : 1;
                ++pos;
                term(sign, acc);
            } else {
                break;
            }
        }
        return acc;
    }
};

} // namespace

DOmega DOmega::parse(const std::string &str) {
    Parser p(str);
    long k = 0;
    bool scaled = false;
    if (p.eat("√2^-") || p.eat("sqrt2^-")) {
        k = static_cast<long>(mpz_get_si(p.integer().get_mpz_t()));
        scaled = true;
        if (!p.eat("*"))
            throw std::invalid_argument("DOmega::parse: expected '*'");
        if (!p.eat("("))
            throw std::invalid_argument("DOmega::parse: expected '('");
    }
    ZOmega v = p.poly();
    if (scaled && !p.eat(")"))
        throw std::invalid_argument("DOmega::parse: expected ')'");
    p.skip_ws();
    if (p.pos != str.size())
        throw std::invalid_argument("DOmega::parse: trailing characters");
    return DOmega(v, k);
}

std::ostream &operator<<(std::ostream &os, const ZRootTwo &x) { return os << x.to_string(); }
std::ostream &operator<<(std::ostream &os, const ZOmega &x) { return os << x.to_string(); }
std::ostream &operator<<(std::ostream &os, const DRootTwo &x) { return os << x.to_string(); }
std::ostream &operator<<(std::ostream &os, const DOmega &x) { return os << x.to_string(); }

} // namespace ctsynth
