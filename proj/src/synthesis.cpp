#include "ctsynth/synthesis.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace ctsynth {

// --------------------------------------------------------------- AngleSpec

AngleSpec AngleSpec::pi_multiple(const mpq_class &m) {
    AngleSpec a;
    a.pi_multiple_ = true;
    a.coef_ = m;
    a.coef_.canonicalize();
    return a;
}

AngleSpec AngleSpec::rational(const mpq_class &v) {
    AngleSpec a;
    a.pi_multiple_ = false;
    a.coef_ = v;
    a.coef_.canonicalize();
    return a;
}

namespace {

mpq_class parse_decimal_or_fraction(const std::string &s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        mpz_class num(s.substr(0, slash));
        mpz_class den(s.substr(slash + 1));
        if (den == 0)
            throw std::invalid_argument("angle: zero denominator");
        return mpq_class(num) / mpq_class(den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos)
        return mpq_class(mpz_class(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    long frac_len = static_cast<long>(s.size() - dot - 1);
    if (digits.empty() || digits == "-" || digits == "+")
        throw std::invalid_argument("angle: malformed decimal");
    mpz_class num(digits);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(frac_len));
    return mpq_class(num) / mpq_class(den);
}

} // namespace

AngleSpec AngleSpec::parse(const std::string &input) {
    std::string s;
    for (char c : input)
        if (!std::isspace(static_cast<unsigned char>(c)))
            s += c;
    if (s.empty())
        throw std::invalid_argument("angle: empty specification");

    auto pi_pos = s.find("pi");
    if (pi_pos == std::string::npos) {
        return rational(parse_decimal_or_fraction(s));
    }

    std::string before = s.substr(0, pi_pos);
    std::string after = s.substr(pi_pos + 2);
    mpq_class num = 1;
    if (!before.empty() && before.back() == '*')
        before.pop_back();
    if (before == "-")
        num = -1;
    else if (!before.empty() && before != "+")
        num = parse_decimal_or_fraction(before);
    mpq_class den = 1;
    if (!after.empty()) {
        if (after[0] != '/')
            throw std::invalid_argument("angle: expected '/' after pi");
        den = parse_decimal_or_fraction(after.substr(1));
        if (den == 0)
            throw std::invalid_argument("angle: zero denominator");
    }
    return pi_multiple(num / den);
}

RealInterval AngleSpec::theta(long prec) const {
    RealInterval c = RealInterval::from_mpq(coef_, prec);
    if (!pi_multiple_)
        return c;
    return iv_mul(c, RealInterval::pi(prec), prec);
}

std::pair<RealInterval, RealInterval> AngleSpec::z_vector(long prec) const {
    mpq_class half = -coef_ / 2;
    RealInterval phi = RealInterval::from_mpq(half, prec);
    if (pi_multiple_)
        phi = iv_mul(phi, RealInterval::pi(prec), prec);
    return {iv_cos(phi, prec), iv_sin(phi, prec)};
}

long AngleSpec::nearest_quarter_index(long prec) const {
    if (pi_multiple_) {
        mpq_class r = 2 * coef_ + mpq_class(1, 2);
        mpz_class j = floordiv(r.get_num(), r.get_den());
        return mpz_get_si(j.get_mpz_t());
    }
    RealInterval r = iv_div(iv_mul(RealInterval::point_long(2, prec), theta(prec), prec),
                            RealInterval::pi(prec), prec);
    BigFloat m = r.mid();
    BigFloat f(m.precision());
    mpfr_round(f.raw(), m.raw());
    return mpfr_get_si(f.raw(), MPFR_RNDN);
}

std::string AngleSpec::to_string() const {
    std::ostringstream os;
    if (pi_multiple_) {
        if (coef_.get_num() == 1)
            os << "pi";
        else if (coef_.get_num() == -1)
            os << "-pi";
        else
            os << coef_.get_num().get_str() << "*pi";
        if (coef_.get_den() != 1)
            os << "/" << coef_.get_den().get_str();
    } else {
        os << coef_.get_str();
    }
    return os.str();
}

// ----------------------------------------------------------- EpsilonRegion

EpsilonRegion::EpsilonRegion(AngleSpec theta, mpq_class eps, bool delta_scaled)
    : theta_(std::move(theta)), eps_(std::move(eps)), delta_scaled_(delta_scaled),
      scale_sq_(delta_scaled ? DRootTwo(ZRootTwo(mpz_class(2), mpz_class(1)), 0) : DRootTwo(1)) {
    if (sgn(eps_) <= 0)
        throw std::domain_error("EpsilonRegion: epsilon must be positive");
}

bool EpsilonRegion::contains(const DOmega &u, long prec) const {
    if (!(u.abs_sq() <= scale_sq_))
        return false;
    const DRootTwo re = u.real(), im = u.imag();
    const mpq_class c = 1 - eps_ * eps_ / 2;
    auto margin = [&](long p) {
        auto [zx, zy] = theta_.z_vector(p);
        RealInterval dot = iv_add(iv_mul(eval_ring_element(re, p), zx, p),
                                  iv_mul(eval_ring_element(im, p), zy, p), p);
        RealInterval rhs = RealInterval::from_mpq(c, p);
        if (delta_scaled_)
            rhs = iv_mul(rhs, iv_sqrt(eval_ring_element(scale_sq_, p), p), p);
        return iv_sub(dot, rhs, p);
    };
    Sign s = certified_sign(margin, prec, 3);
    return s == Sign::Positive || s == Sign::Zero;
}

Ellipse EpsilonRegion::enclosing_ellipse(long prec) const {
    // circular segment of width eps^2/2 at distance d = 1 - eps^2/2, in the
    // frame rotated so that z points along the x-axis; the sqrt2-dilated
    // ellipse of its bounding rectangle contains it by construction
    const mpq_class d = 1 - eps_ * eps_ / 2;
    const mpq_class w = eps_ * eps_ / 2;
    RealInterval s = delta_scaled_
                         ? iv_sqrt(eval_ring_element(scale_sq_, prec), prec)
                         : RealInterval::point_long(1, prec);
    RealInterval h = iv_sqrt(RealInterval::from_mpq(1 - d * d, prec), prec);
    RealInterval sqrt2 = RealInterval::sqrt2(prec);
    RealInterval ax = iv_mul(iv_div(RealInterval::from_mpq(w, prec), sqrt2, prec), s, prec);
    RealInterval bx = iv_mul(iv_mul(h, sqrt2, prec), s, prec);
    RealInterval rho = iv_mul(RealInterval::from_mpq(d + w / 2, prec), s, prec);

    auto [zx, zy] = theta_.z_vector(prec);
    RealInterval ia = iv_div(RealInterval::point_long(1, prec), iv_sqr(ax, prec), prec);
    RealInterval ib = iv_div(RealInterval::point_long(1, prec), iv_sqr(bx, prec), prec);

    Ellipse e;
    e.mat.a = iv_add(iv_mul(iv_sqr(zx, prec), ia, prec), iv_mul(iv_sqr(zy, prec), ib, prec), prec);
    e.mat.d = iv_add(iv_mul(iv_sqr(zy, prec), ia, prec), iv_mul(iv_sqr(zx, prec), ib, prec), prec);
    e.mat.b = iv_mul(iv_mul(zx, zy, prec), iv_sub(ia, ib, prec), prec);
    e.cx = iv_mul(rho, zx, prec);
    e.cy = iv_mul(rho, zy, prec);
    return e;
}

std::optional<Interval1D> EpsilonRegion::line_intersect(const DOmega &p, const DOmega &q,
                                                        long prec) const {
    DiskRegion disk(scale_sq_);
    auto chord = disk.line_intersect(p, q, prec);
    if (!chord)
        return std::nullopt;

    // half-plane (p + t q) . z >= c s, a linear constraint on t
    const mpq_class c = 1 - eps_ * eps_ / 2;
    auto [zx, zy] = theta_.z_vector(prec);
    RealInterval pdot = iv_add(iv_mul(eval_ring_element(p.real(), prec), zx, prec),
                               iv_mul(eval_ring_element(p.imag(), prec), zy, prec), prec);
    RealInterval qdot = iv_add(iv_mul(eval_ring_element(q.real(), prec), zx, prec),
                               iv_mul(eval_ring_element(q.imag(), prec), zy, prec), prec);
    RealInterval rhs = RealInterval::from_mpq(c, prec);
    if (delta_scaled_)
        rhs = iv_mul(rhs, iv_sqrt(eval_ring_element(scale_sq_, prec), prec), prec);
    RealInterval num = iv_sub(rhs, pdot, prec);

    RealInterval lo = chord->lo.enclosure(prec);
    RealInterval hi = chord->hi.enclosure(prec);
    if (qdot.certainly_positive()) {
        RealInterval bound = iv_div(num, qdot, prec);
        if (bound.lo > lo.lo)
            lo = bound;
    } else if (qdot.certainly_negative()) {
        RealInterval bound = iv_div(num, qdot, prec);
        if (bound.hi < hi.hi)
            hi = bound;
    } else if (num.certainly_positive()) {
        return std::nullopt; // constraint unsatisfiable for every t
    }
    if (hi.hi < lo.lo)
        return std::nullopt;
    return Interval1D{Endpoint::approx(lo), Endpoint::approx(hi)};
}

// ----------------------------------------------------- circuits & matrices

long Circuit::tcount() const {
    return static_cast<long>(std::count(gates.begin(), gates.end(), 'T'));
}

std::string Circuit::to_string() const {
    std::string s = gates;
    if (wpower != 0)
        s += "W" + std::to_string(wpower);
    if (s.empty())
        s = "I";
    return s;
}

Circuit Circuit::parse(const std::string &s) {
    Circuit c;
    size_t i = 0;
    if (s == "I")
        return c;
    while (i < s.size()) {
        char g = s[i];
        if (g == 'H' || g == 'T' || g == 'S' || g == 'X') {
            c.gates += g;
            ++i;
        } else if (g == 'W') {
            ++i;
            long n = 0;
            bool digits = false;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
                n = n * 10 + (s[i] - '0');
                ++i;
                digits = true;
            }
            c.wpower = (c.wpower + (digits ? n : 1)) % 8;
        } else {
            throw std::invalid_argument("Circuit::parse: unknown gate '" + std::string(1, g) + "'");
        }
    }
    return c;
}

Mat2 Mat2::identity() { return {DOmega(1), DOmega(0), DOmega(0), DOmega(1)}; }

Mat2 Mat2::gate(char g) {
    const DOmega one(1), zero(0);
    const DOmega h(ZOmega(1), 1); // 1/sqrt2
    const DOmega w(ZOmega::omega(), 0);
    switch (g) {
    case 'H':
        return {h, h, h, -h};
    case 'T':
        return {one, zero, zero, w};
    case 'S':
        return {one, zero, zero, DOmega(ZOmega::omega_power(2), 0)};
    case 'X':
        return {zero, one, one, zero};
    case 'W':
        return {w, zero, zero, w};
    default:
        throw std::invalid_argument("Mat2::gate: unknown gate");
    }
}

Mat2 Mat2::operator*(const Mat2 &o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

bool Mat2::operator==(const Mat2 &o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
}

Mat2 circuit_matrix(const Circuit &c) {
    Mat2 m = Mat2::identity();
    for (char g : c.gates)
        m = m * Mat2::gate(g);
    if (c.wpower % 8 != 0) {
        DOmega w(ZOmega::omega_power(c.wpower), 0);
        m.a = m.a * w;
        m.b = m.b * w;
        m.c = m.c * w;
        m.d = m.d * w;
    }
    return m;
}

Mat2 unitary_of(const DOmega &u, const DOmega &t, long lphase) {
    return {u, -t.dagger().mul_by_omega_power(lphase), t, u.dagger().mul_by_omega_power(lphase)};
}

// --------------------------------------------------------- exact synthesis

namespace {

// sigma-orbit position of each odd residue pattern (a<<3|b<<2|c<<1|d)
const int BIT_SHIFT[16] = {0, 0, 1, 0, 2, 0, 1, 3, 3, 3, 0, 2, 2, 1, 0, 0};

struct RawWord {
    std::string gates;
    long wpower = 0;
    long tcount = 0;
};

RawWord synth_raw(const DOmega &u, const DOmega &t, long lphase) {
    long k = std::max(u.k(), t.k());
    ZOmega zu = u.numerator_at(k);
    ZOmega zt = t.numerator_at(k);
    long l = ((lphase % 8) + 8) % 8;
    std::string gates;
    long fuel = 4 * k + 32;

    while (k > 0) {
        if (--fuel < 0)
            throw std::logic_error("exact_synthesize: reduction did not terminate");
        if (zu.divisible_by_sqrt2() && zt.divisible_by_sqrt2()) {
            zu = zu.divide_by_sqrt2();
            zt = zt.divide_by_sqrt2();
            --k;
            continue;
        }
        int m = (BIT_SHIFT[zt.residue()] - BIT_SHIFT[zu.residue()] + 4) & 3;
        ZOmega w = zt.mul_by_omega_power(-m);
        ZOmega s = zu + w;
        ZOmega dd = zu - w;
        if (!s.divisible_by_sqrt2() || !dd.divisible_by_sqrt2())
            throw std::logic_error("exact_synthesize: residue alignment failed");
        // peel the prefix T^m H; numerators of H T^-m U stay at exponent k
        zu = s.divide_by_sqrt2();
        zt = dd.divide_by_sqrt2();
        switch (m) {
        case 0:
            gates += "H";
            break;
        case 1:
            gates += "TH";
            break;
        case 2:
            gates += "SH";
            break;
        default:
            gates += "TSH";
            break;
        }
        l = (l - m + 8 + 4) % 8;
        while (k > 0 && zu.divisible_by_sqrt2() && zt.divisible_by_sqrt2()) {
            zu = zu.divide_by_sqrt2();
            zt = zt.divide_by_sqrt2();
            --k;
        }
    }

    if (zu.is_zero()) {
        gates += "X";
        std::swap(zu, zt);
        l = (l + 4) % 8;
    }
    long a = -1;
    for (long j = 0; j < 8; ++j) {
        if (zu == ZOmega::omega_power(j)) {
            a = j;
            break;
        }
    }
    if (a < 0 || !zt.is_zero())
        throw std::logic_error("exact_synthesize: residual operator is not Clifford");
    long rem = ((l - 2 * a) % 8 + 8) % 8;
    gates += std::string((rem / 2) % 4, 'S');
    if (rem % 2 != 0)
        gates += "T";

    RawWord out;
    out.gates = std::move(gates);
    out.wpower = a;
    out.tcount = static_cast<long>(std::count(out.gates.begin(), out.gates.end(), 'T'));
    return out;
}

} // namespace

ExactSynthesis exact_synthesize(const DOmega &u, const DOmega &t, long lphase) {
    if (!(u.abs_sq() + t.abs_sq() == DRootTwo(1)))
        throw std::domain_error("exact_synthesize: columns are not unitary: u = " + u.to_string() +
                                ", t = " + t.to_string());
    RawWord w1 = synth_raw(u, t, lphase);
    DOmega t_rot = t * DOmega(ZOmega::omega(), 0); // T U T^dagger variant
    RawWord w2 = synth_raw(u, t_rot, lphase);

    ExactSynthesis out;
    out.u = u;
    out.lphase = lphase;
    if (w2.tcount < w1.tcount) {
        out.circuit = {w2.gates, w2.wpower};
        out.t = t_rot;
    } else {
        out.circuit = {w1.gates, w1.wpower};
        out.t = t;
    }
    if (!(circuit_matrix(out.circuit) == unitary_of(out.u, out.t, lphase)))
        throw std::logic_error("exact_synthesize: word does not reproduce the operator");
    return out;
}

// ------------------------------------------------------------------ errors

namespace {

RealInterval error_from_dot(const RealInterval &dot, long prec) {
    RealInterval e2 = iv_sub(RealInterval::point_long(2, prec),
                             iv_mul(RealInterval::point_long(2, prec), dot, prec), prec);
    BigFloat zero(prec);
    mpfr_set_zero(zero.raw(), 1);
    if (e2.hi < zero)
        e2.hi = zero;
    if (e2.lo < zero)
        e2.lo = zero;
    return iv_sqrt(e2, prec);
}

RealInterval dot_with_z(const AngleSpec &theta, const DOmega &u, long prec) {
    auto [zx, zy] = theta.z_vector(prec);
    return iv_add(iv_mul(eval_ring_element(u.real(), prec), zx, prec),
                  iv_mul(eval_ring_element(u.imag(), prec), zy, prec), prec);
}

} // namespace

RealInterval operator_error(const AngleSpec &theta, const DOmega &u, long prec) {
    return error_from_dot(dot_with_z(theta, u, prec), prec);
}

RealInterval operator_error_phase8(const AngleSpec &theta, const DOmega &u_prime, long prec) {
    RealInterval dot = dot_with_z(theta, u_prime, prec);
    RealInterval abs_delta =
        iv_sqrt(eval_ring_element(ZRootTwo(mpz_class(2), mpz_class(1)), prec), prec);
    return error_from_dot(iv_div(dot, abs_delta, prec), prec);
}

// --------------------------------------------------------------- fallbacks

bool clifford_fallback_applies(const mpq_class &eps) {
    if (sgn(eps) <= 0)
        throw std::domain_error("epsilon must be positive");
    if (eps >= 2)
        return true;
    mpq_class e2 = eps * eps;
    // threshold |1 - e^{i pi/8}|^2 = 2 - 2 cos(pi/8)
    for (long prec = 64; prec <= 1L << 20; prec *= 2) {
        RealInterval pi8 = iv_div(RealInterval::pi(prec), RealInterval::point_long(8, prec), prec);
        RealInterval thr = iv_sub(RealInterval::point_long(2, prec),
                                  iv_mul(RealInterval::point_long(2, prec), iv_cos(pi8, prec), prec),
                                  prec);
        if (mpfr_cmp_q(thr.hi.raw(), e2.get_mpq_t()) <= 0)
            return true;
        if (mpfr_cmp_q(thr.lo.raw(), e2.get_mpq_t()) > 0)
            return false;
    }
    throw std::logic_error("clifford_fallback_applies: comparison failed to resolve");
}

std::optional<SynthesisResult> clifford_fallback(const AngleSpec &theta, const mpq_class &eps) {
    if (!clifford_fallback_applies(eps))
        return std::nullopt;
    long j = theta.nearest_quarter_index();
    DOmega u(ZOmega::omega_power(-j), 0);
    ExactSynthesis ex = exact_synthesize(u, DOmega(0), 0);

    SynthesisResult r;
    r.u = u;
    r.t = DOmega(0);
    r.k = 0;
    r.circuit = ex.circuit;
    r.tcount = ex.circuit.tcount();
    if (r.tcount != 0)
        throw std::logic_error("clifford_fallback: non-Clifford word");
    long prec = working_precision(eps);
    r.error_bound = operator_error(theta, u, prec);
    if (mpfr_cmp_q(r.error_bound.hi.raw(), eps.get_mpq_t()) > 0)
        throw std::logic_error("clifford_fallback: error bound exceeds epsilon");
    r.tcount_lower_bound = 0;
    r.mode = SynthesisMode::Plain;
    return r;
}

// ------------------------------------------------------------ main drivers

namespace {

struct Branch {
    bool phase8 = false;
    std::unique_ptr<EpsilonRegion> region;
    std::unique_ptr<DiskRegion> disk;
    std::unique_ptr<ScaledGridStream> stream;
    long levels_done = -1; // highest level fully processed
};

Branch make_branch(const AngleSpec &theta, const mpq_class &eps, bool phase8, long prec) {
    Branch b;
    b.phase8 = phase8;
    b.region = std::make_unique<EpsilonRegion>(theta, eps, phase8);
    b.disk = std::make_unique<DiskRegion>(
        phase8 ? DRootTwo(ZRootTwo(mpz_class(2), mpz_class(-1)), 0) : DRootTwo(1));
    b.stream = std::make_unique<ScaledGridStream>(*b.region, *b.disk, prec);
    return b;
}

long expected_tcount(long k, bool phase8) {
    if (phase8)
        return k == 0 ? 1 : 2 * k - 1;
    return k == 0 ? 0 : 2 * k - 2;
}

std::optional<SynthesisResult> process_level(Branch &b, long k, const AngleSpec &theta,
                                             const mpq_class &eps, FactoringProvider &provider,
                                             std::uint64_t seed, long prec,
                                             std::vector<CandidateRecord> &ledger) {
    static const DOmega delta_inv(ZOmega(mpz_class(0), mpz_class(-1), mpz_class(1), mpz_class(0)),
                                  1);
    for (const DOmega &cand : b.stream->level(k)) {
        DOmega u = b.phase8 ? cand * delta_inv : cand;
        DRootTwo xi = DRootTwo(1) - u.abs_sq();
        NormEquationInstance inst = NormEquationInstance::of(xi);

        if (inst.n < 0 || (inst.n != 0 && inst.n % 8 != 1))
            throw std::logic_error("synthesize: candidate n violates n = 0 or 1 (mod 8)");
        mpz_class four_pow_k;
        mpz_ui_pow_ui(four_pow_k.get_mpz_t(), 2, static_cast<unsigned long>(2 * u.k()));
        if (inst.n > four_pow_k)
            throw std::logic_error("synthesize: candidate n exceeds 4^k");

        NormEquationResult res;
        if (inst.n == 0) {
            FactoringOutcome trivial;
            trivial.status = FactoringOutcome::Status::Factored;
            res = solve_norm_equation(inst, trivial, seed);
        } else {
            FactoringOutcome fo = provider.factor(inst.n);
            if (!fo.ok())
                res.status = SolveStatus::Unknown;
            else
                res = solve_norm_equation(inst, fo, seed);
        }
        ledger.push_back({k, inst.n, res.status, b.phase8});
        if (res.status != SolveStatus::Solved)
            continue;

        SynthesisResult out;
        out.u = u;
        out.k = k;
        out.phase8 = b.phase8;
        ExactSynthesis ex = exact_synthesize(u, res.t, b.phase8 ? 7 : 0);
        out.t = ex.t;
        out.circuit = ex.circuit;
        out.tcount = out.circuit.tcount();
        if (out.tcount != expected_tcount(k, b.phase8))
            throw std::logic_error("synthesize: T-count " + std::to_string(out.tcount) +
                                   " differs from the expected " +
                                   std::to_string(expected_tcount(k, b.phase8)));
        out.error_bound =
            b.phase8 ? operator_error_phase8(theta, cand, prec) : operator_error(theta, u, prec);
        if (mpfr_cmp_q(out.error_bound.hi.raw(), eps.get_mpq_t()) > 0)
            throw std::logic_error("synthesize: certified error exceeds epsilon");
        return out;
    }
    b.levels_done = k;
    return std::nullopt;
}

} // namespace

long lower_bound_report(const std::vector<CandidateRecord> &ledger, bool phase8_branch) {
    for (const CandidateRecord &rec : ledger) {
        if (rec.phase8 != phase8_branch)
            continue;
        if (rec.outcome == SolveStatus::Unsolvable)
            continue;
        return expected_tcount(rec.k, phase8_branch);
    }
    throw std::domain_error("lower_bound_report: no candidate reached the Diophantine stage");
}

SynthesisResult synthesize(const AngleSpec &theta, const mpq_class &eps,
                           const SynthesisOptions &opts) {
    if (auto cf = clifford_fallback(theta, eps))
        return *cf;
    long prec = working_precision(eps);
    Branch b = make_branch(theta, eps, false, prec);
    CappedFactoring capped(opts.effort, opts.seed);
    FactoringProvider &provider = opts.provider ? *opts.provider : capped;
    std::vector<CandidateRecord> ledger;
    for (long k = 0; k <= opts.max_levels; ++k) {
        auto r = process_level(b, k, theta, eps, provider, opts.seed, prec, ledger);
        if (r) {
            r->ledger = std::move(ledger);
            r->tcount_lower_bound = lower_bound_report(r->ledger, false);
            r->mode = SynthesisMode::Plain;
            return *r;
        }
    }
    throw std::runtime_error("synthesize: exceeded the level bound without a solution");
}

SynthesisResult synthesize_phase8(const AngleSpec &theta, const mpq_class &eps,
                                  const SynthesisOptions &opts) {
    if (clifford_fallback_applies(eps))
        throw std::invalid_argument("synthesize_phase8: requires epsilon < |1 - e^{i pi/8}|");
    long prec = working_precision(eps);
    Branch b = make_branch(theta, eps, true, prec);
    CappedFactoring capped(opts.effort, opts.seed);
    FactoringProvider &provider = opts.provider ? *opts.provider : capped;
    std::vector<CandidateRecord> ledger;
    for (long k = 0; k <= opts.max_levels; ++k) {
        auto r = process_level(b, k, theta, eps, provider, opts.seed, prec, ledger);
        if (r) {
            r->ledger = std::move(ledger);
            r->tcount_lower_bound = lower_bound_report(r->ledger, true);
            r->mode = SynthesisMode::Phase8;
            return *r;
        }
    }
    throw std::runtime_error("synthesize_phase8: exceeded the level bound without a solution");
}

namespace {

// firm branch bound: the first non-failing candidate, or exhaustion
long branch_bound(const std::vector<CandidateRecord> &ledger, bool phase8, long levels_done) {
    for (const CandidateRecord &rec : ledger) {
        if (rec.phase8 != phase8)
            continue;
        if (rec.outcome == SolveStatus::Unsolvable)
            continue;
        return expected_tcount(rec.k, phase8);
    }
    return expected_tcount(levels_done + 1, phase8);
}

} // namespace

SynthesisResult synthesize_up_to_phase(const AngleSpec &theta, const mpq_class &eps,
                                       const SynthesisOptions &opts) {
    if (auto cf = clifford_fallback(theta, eps)) {
        cf->mode = SynthesisMode::Best;
        return *cf;
    }
    long prec = working_precision(eps);
    Branch plain = make_branch(theta, eps, false, prec);
    Branch ph8 = make_branch(theta, eps, true, prec);
    CappedFactoring capped(opts.effort, opts.seed);
    FactoringProvider &provider = opts.provider ? *opts.provider : capped;
    std::vector<CandidateRecord> ledger;

    // interleave the two branches in order of increasing T-count
    for (long m = 0; m <= 2 * opts.max_levels; ++m) {
        Branch &b = (m % 2 == 0) ? plain : ph8;
        long k_target;
        if (m % 2 == 0)
            k_target = (m == 0) ? 1 : m / 2 + 1;
        else
            k_target = (m == 1) ? 1 : (m + 1) / 2;
        std::optional<SynthesisResult> r;
        while (b.levels_done < k_target && !r)
            r = process_level(b, b.levels_done + 1, theta, eps, provider, opts.seed, prec, ledger);
        if (r) {
            r->ledger = std::move(ledger);
            long bp = branch_bound(r->ledger, false, plain.levels_done);
            long bq = branch_bound(r->ledger, true, ph8.levels_done);
            r->tcount_lower_bound = std::min(bp, bq);
            r->mode = SynthesisMode::Best;
            return *r;
        }
    }
    throw std::runtime_error("synthesize_up_to_phase: exceeded the level bound");
}

} // namespace ctsynth
