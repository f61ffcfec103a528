#include "ctsynth/diophantine.hpp"

#include <algorithm>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace ctsynth {

namespace {

std::uint64_t splitmix64(std::uint64_t &state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t mix_with_mpz(std::uint64_t seed, const mpz_class &n) {
    std::uint64_t h = seed ^ (0x51f2ab7a3c94d1e5ULL * (mpz_get_ui(n.get_mpz_t()) + 1));
    h ^= static_cast<std::uint64_t>(mpz_sizeinbase(n.get_mpz_t(), 2)) << 32;
    return h;
}

mpz_class powm(const mpz_class &b, const mpz_class &e, const mpz_class &m) {
    mpz_class r;
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    return r;
}

bool miller_rabin_witness(const mpz_class &n, const mpz_class &base, const mpz_class &d, long r) {
    mpz_class x = powm(base, d, n);
    if (x == 1 || x == n - 1)
        return false;
    for (long i = 1; i < r; ++i) {
        x = x * x % n;
        if (x == n - 1)
            return false;
    }
    return true; // composite witness
}

const std::vector<unsigned> &small_primes() {
    static const std::vector<unsigned> primes = [] {
        std::vector<unsigned> out;
        const unsigned limit = 10000;
        std::vector<bool> sieve(limit + 1, true);
        for (unsigned i = 2; i <= limit; ++i) {
            if (!sieve[i])
                continue;
            out.push_back(i);
            for (unsigned long j = static_cast<unsigned long>(i) * i; j <= limit; j += i)
                sieve[j] = false;
        }
        return out;
    }();
    return primes;
}

} // namespace

bool is_probable_prime(const mpz_class &n) {
    mpz_class m = abs(n);
    if (m < 2)
        return false;
    for (unsigned p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
        if (m == p)
            return true;
        if (m % p == 0)
            return false;
    }
    mpz_class d = m - 1;
    long r = 0;
    while (mpz_even_p(d.get_mpz_t())) {
        d >>= 1;
        ++r;
    }
    // fixed small bases (deterministic below 3.3e24), then bases derived
    // deterministically from the number itself
    for (unsigned base : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u})
        if (miller_rabin_witness(m, base, d, r))
            return false;
    if (mpz_sizeinbase(m.get_mpz_t(), 2) > 81) {
        std::uint64_t st = mix_with_mpz(0x7a1c0ffee1234567ULL, m);
        for (int i = 0; i < 28; ++i) {
            mpz_class base = 2 + mpz_class(splitmix64(st)) % (m - 3);
            if (miller_rabin_witness(m, base, d, r))
                return false;
        }
    }
    return true;
}

namespace {

// Budgeted Brent-rho: one budget unit buys CHUNK iterations; a walk keeps
// running while budget remains, restarting with a fresh polynomial only
// after a failure (g == n with no usable backtrack).
constexpr long kRhoChunk = 1L << 14;

std::optional<mpz_class> rho_budgeted(const mpz_class &n, std::uint64_t seed, long &spent,
                                      long effort) {
    long salt = 0;
    while (spent < effort) {
        std::uint64_t st = mix_with_mpz(seed, n) ^ (0xabcddcba0f0f0f0fULL * (salt + 1));
        ++salt;
        mpz_class c = 1 + mpz_class(splitmix64(st)) % (n - 2);
        mpz_class y = 1 + mpz_class(splitmix64(st)) % (n - 2);
        mpz_class x = y, ys = y, q = 1, g = 1;
        long r = 1, count = 0;
        const long batch = 128;
        while (g == 1 && spent < effort) {
            x = y;
            for (long i = 0; i < r; ++i)
                y = (y * y + c) % n;
            long k = 0;
            while (k < r && g == 1) {
                ys = y;
                long lim = std::min(batch, r - k);
                for (long i = 0; i < lim; ++i) {
                    y = (y * y + c) % n;
                    q = q * abs(x - y) % n;
                }
                g = gcd(q, n);
                k += lim;
            }
            count += 2 * r;
            spent += count / kRhoChunk;
            count %= kRhoChunk;
            r *= 2;
        }
        if (count > 0)
            ++spent;
        if (g == n) {
            do {
                ys = (ys * ys + c) % n;
                g = gcd(abs(x - ys), n);
            } while (g == 1);
        }
        if (g != 1 && g != n)
            return g;
        // walk failed (cycle without a factor): retry with a new polynomial
        // if any budget is left
    }
    return std::nullopt;
}

} // namespace

FactoringOutcome factorize(const mpz_class &n, long effort, std::uint64_t seed) {
    if (n == 0)
        throw std::domain_error("factorize: n must be nonzero");
    FactoringOutcome out;
    mpz_class m = abs(n);
    std::map<mpz_class, long> acc;

    for (unsigned p : small_primes()) {
        if (m == 1)
            break;
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
            acc[mpz_class(p)] += 1;
        }
    }

    std::vector<std::pair<mpz_class, long>> stack;
    if (m > 1)
        stack.emplace_back(m, 1);

    long spent = 0;
    while (!stack.empty()) {
        auto [v, mult] = stack.back();
        stack.pop_back();
        if (v == 1)
            continue;
        if (is_probable_prime(v)) {
            acc[v] += mult;
            continue;
        }
        if (mpz_perfect_power_p(v.get_mpz_t())) {
            // find the smallest exponent that extracts an exact root
            unsigned long maxe = mpz_sizeinbase(v.get_mpz_t(), 2);
            bool split = false;
            for (unsigned long e = 2; e <= maxe; ++e) {
                mpz_class root;
                if (mpz_root(root.get_mpz_t(), v.get_mpz_t(), e) != 0) {
                    stack.emplace_back(root, mult * static_cast<long>(e));
                    split = true;
                    break;
                }
            }
            if (split)
                continue;
        }
        std::optional<mpz_class> g = rho_budgeted(v, seed, spent, effort);
        if (!g) {
            out.status = FactoringOutcome::Status::TimedOut;
            out.effort_spent = spent;
            return out;
        }
        stack.emplace_back(*g, mult);
        stack.emplace_back(v / *g, mult);
    }

    out.status = FactoringOutcome::Status::Factored;
    out.effort_spent = spent;
    for (auto &[p, e] : acc)
        out.factors.push_back({p, e});
    return out;
}

std::optional<mpz_class> sqrt_mod(const mpz_class &a, const mpz_class &p, std::uint64_t seed) {
    mpz_class x = a % p;
    if (x < 0)
        x += p;
    if (p == 2)
        return x;
    if (x == 0)
        return mpz_class(0);
    mpz_class half = (p - 1) / 2;
    if (powm(x, half, p) != 1)
        return std::nullopt;

    mpz_class q = p - 1;
    long s = 0;
    while (mpz_even_p(q.get_mpz_t())) {
        q >>= 1;
        ++s;
    }
    if (s == 1)
        return powm(x, (p + 1) / 4, p);

    // find a quadratic non-residue: small primes first, then seeded search
    mpz_class z = 0;
    for (unsigned c : small_primes()) {
        if (c >= p)
            break;
        if (powm(mpz_class(c), half, p) == p - 1) {
            z = c;
            break;
        }
    }
    if (z == 0) {
        std::uint64_t st = mix_with_mpz(seed ^ 0x5eed5eed5eed5eedULL, p);
        for (int i = 0; i < 256 && z == 0; ++i) {
            mpz_class cand = 2 + mpz_class(splitmix64(st)) % (p - 3);
            if (powm(cand, half, p) == p - 1)
                z = cand;
        }
        if (z == 0)
            return std::nullopt; // astronomically unlikely for prime p
    }

    mpz_class M = s, c = powm(z, q, p), t = powm(x, q, p), r = powm(x, (q + 1) / 2, p);
    while (t != 1) {
        mpz_class tt = t;
        long i = 0;
        while (tt != 1) {
            tt = tt * tt % p;
            ++i;
            if (i == mpz_get_si(M.get_mpz_t()))
                return std::nullopt;
        }
        mpz_class b = c;
        for (long j = 0; j < mpz_get_si(M.get_mpz_t()) - i - 1; ++j)
            b = b * b % p;
        M = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    if (r * r % p != x)
        return std::nullopt;
    return r;
}

PrimeSplitting split_prime(const mpz_class &p, std::uint64_t seed) {
    if (p == 2)
        return {PrimeSplitting::Kind::Ramified, ZRootTwo::sqrt2()};
    long r8 = mpz_get_si(mpz_class(p % 8).get_mpz_t());
    if (r8 == 3 || r8 == 5)
        return {PrimeSplitting::Kind::Inert, ZRootTwo(p, 0)};
    auto x = sqrt_mod(2, p, seed);
    if (!x)
        throw std::logic_error("split_prime: 2 must be a residue mod p = +-1 (mod 8)");
    ZRootTwo xi = gcd(ZRootTwo(p, 0), ZRootTwo(*x, 1));
    mpz_class nrm = xi.norm();
    if (!(nrm == p || nrm == -p))
        throw std::logic_error("split_prime: gcd did not produce a prime factor");
    return {PrimeSplitting::Kind::Split, xi};
}

void FileOracleFactoring::add(const mpz_class &n, std::vector<PrimePower> factors) {
    mpz_class prod = 1;
    for (const auto &pp : factors) {
        for (long i = 0; i < pp.e; ++i)
            prod *= pp.p;
    }
    if (prod != abs(n))
        throw std::invalid_argument("FileOracleFactoring: factors do not multiply to n");
    std::sort(factors.begin(), factors.end(),
              [](const PrimePower &a, const PrimePower &b) { return a.p < b.p; });
    table_[abs(n)] = std::move(factors);
}

void FileOracleFactoring::load(std::istream &in) {
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string ns;
        if (!(ls >> ns))
            continue;
        mpz_class n(ns);
        std::vector<PrimePower> factors;
        std::string ps;
        long e;
        while (ls >> ps >> e)
            factors.push_back({mpz_class(ps), e});
        add(n, std::move(factors));
    }
}

FactoringOutcome FileOracleFactoring::factor(const mpz_class &n) {
    auto it = table_.find(abs(n));
    if (it != table_.end()) {
        FactoringOutcome out;
        out.status = FactoringOutcome::Status::Factored;
        out.factors = it->second;
        return out;
    }
    return fallback_.factor(n);
}

NormEquationInstance NormEquationInstance::of(const DRootTwo &xi) {
    NormEquationInstance inst;
    inst.xi = xi;
    DRootTwo prod = xi.bullet() * xi;
    if (prod.alpha().b != 0 || prod.k() % 2 != 0)
        throw std::logic_error("NormEquationInstance: xi_bullet xi is not rational");
    inst.n = prod.alpha().a;
    inst.ell = prod.k() / 2;
    return inst;
}

std::optional<ZOmega> decompose_assoc(const ZRootTwo &xi,
                                      const std::vector<std::pair<ZRootTwo, long>> &factorization,
                                      std::uint64_t seed) {
    // consistency: the factors must multiply to xi up to a unit
    ZRootTwo prod = ZRootTwo::one();
    for (const auto &[eta, m] : factorization)
        prod = prod * eta.pow(m);
    if (!associates(prod, xi))
        throw std::invalid_argument("decompose_assoc: factorization does not match xi");

    ZOmega t(1);
    for (const auto &[eta, m] : factorization) {
        mpz_class nrm = eta.norm();
        mpz_class an = nrm < 0 ? mpz_class(-nrm) : nrm;
        if (an == 2) {
            t = t * ZOmega::delta().pow(m);
            continue;
        }
        mpz_class p;
        if (is_probable_prime(an)) {
            p = an; // split prime of Z[sqrt2]
        } else {
            mpz_class root;
            mpz_sqrt(root.get_mpz_t(), an.get_mpz_t());
            if (root * root != an || !is_probable_prime(root))
                throw std::invalid_argument("decompose_assoc: factor is not prime");
            p = root; // inert prime
        }
        long r8 = mpz_get_si(mpz_class(p % 8).get_mpz_t());
        if (r8 == 7) {
            if (m % 2 != 0)
                return std::nullopt; // Unsolvable
            t = t * ZOmega::from_zroottwo(eta.pow(m / 2));
            continue;
        }
        ZOmega t1;
        if (p % 4 == 1) {
            auto h = sqrt_mod(p - 1, p, seed); // sqrt of -1
            if (!h)
                throw std::logic_error("decompose_assoc: sqrt(-1) failed");
            t1 = gcd(ZOmega(mpz_class(0), mpz_class(1), mpz_class(0), *h),
                     ZOmega::from_zroottwo(eta));
        } else { // p = 3 (mod 8)
            auto h = sqrt_mod(p - 2, p, seed); // sqrt of -2
            if (!h)
                throw std::logic_error("decompose_assoc: sqrt(-2) failed");
            t1 = gcd(ZOmega(mpz_class(1), mpz_class(0), mpz_class(1), *h),
                     ZOmega::from_zroottwo(eta));
        }
        ZOmega tdt = t1.dagger() * t1;
        if (!tdt.is_real() || !associates(tdt.to_zroottwo(), eta))
            throw std::logic_error("decompose_assoc: gcd witness failed to split the prime");
        t = t * t1.pow(m);
    }
    return t;
}

DOmega fix_unit(const DOmega &t0, const DRootTwo &xi) {
    if (xi.sign() < 0 || xi.bullet().sign() < 0)
        throw std::domain_error("fix_unit: xi is not doubly positive");
    DRootTwo s = t0.abs_sq();
    DRootTwo q = xi / s;
    if (q.k() != 0)
        throw std::logic_error("fix_unit: relating factor is not a unit");
    auto unit = ZUnit::from_ring(q.alpha());
    if (!unit)
        throw std::logic_error("fix_unit: relating factor is not a unit");
    if (!unit->doubly_positive())
        throw std::logic_error("fix_unit: relating unit is not doubly positive");
    ZUnit v = unit->sqrt();
    return t0 * DOmega::from_droottwo(DRootTwo::from_zroottwo(v.to_ring()));
}

NormEquationResult solve_norm_equation(const NormEquationInstance &inst,
                                       const FactoringOutcome &factoring, std::uint64_t seed) {
    NormEquationResult res;
    const DRootTwo &xi = inst.xi;
    if (xi.is_zero()) {
        res.status = SolveStatus::Solved;
        res.t = DOmega(0);
        return res;
    }
    if (xi.sign() < 0 || xi.bullet().sign() < 0) {
        res.status = SolveStatus::Unsolvable;
        return res;
    }
    if (!factoring.ok()) {
        res.status = SolveStatus::Unknown;
        return res;
    }

    // scale into Z[sqrt2]: xi' = sqrt2^ell * xi
    DRootTwo xis = xi;
    for (long i = 0; i < inst.ell; ++i)
        xis = xis * DRootTwo(ZRootTwo::sqrt2(), 0);
    if (xis.k() != 0)
        throw std::logic_error("solve_norm_equation: sqrt2^ell xi is not integral");
    ZRootTwo xi_p = xis.alpha();

    // derive the Z[sqrt2] factorization of xi' from the factorization of n
    std::vector<std::pair<ZRootTwo, long>> fac;
    ZRootTwo rem = xi_p;
    for (const auto &pp : factoring.factors) {
        PrimeSplitting sp = split_prime(pp.p, seed);
        std::vector<ZRootTwo> cands;
        switch (sp.kind) {
        case PrimeSplitting::Kind::Ramified:
            cands = {ZRootTwo::sqrt2()};
            break;
        case PrimeSplitting::Kind::Inert:
            cands = {sp.xi};
            break;
        case PrimeSplitting::Kind::Split:
            cands = {sp.xi, sp.xi.bullet()};
            break;
        }
        for (const ZRootTwo &pi : cands) {
            long m = 0;
            while (pi.divides(rem)) {
                rem = rem / pi;
                ++m;
            }
            if (m > 0)
                fac.emplace_back(pi, m);
        }
    }
    mpz_class rem_norm = rem.norm();
    if (rem_norm != 1 && rem_norm != -1)
        throw std::invalid_argument("solve_norm_equation: factorization inconsistent with n");

    auto t0 = decompose_assoc(xi_p, fac, seed);
    if (!t0) {
        res.status = SolveStatus::Unsolvable;
        return res;
    }

    // back to D[sqrt2]: t1 = delta^{-ell} t0, then fix the unit exactly
    const DOmega delta_inv(ZOmega(mpz_class(0), mpz_class(-1), mpz_class(1), mpz_class(0)), 1);
    DOmega t1 = DOmega::from_zomega(*t0);
    for (long i = 0; i < inst.ell; ++i)
        t1 = t1 * delta_inv;
    DOmega t = fix_unit(t1, xi);
    if (!(t.abs_sq() == xi))
        throw std::logic_error("solve_norm_equation: verification failed");
    res.status = SolveStatus::Solved;
    res.t = t;
    return res;
}

NormEquationResult solve_norm_equation(const DRootTwo &xi, FactoringProvider &provider,
                                       std::uint64_t seed) {
    NormEquationInstance inst = NormEquationInstance::of(xi);
    if (inst.n == 0 || xi.sign() < 0 || xi.bullet().sign() < 0) {
        FactoringOutcome dummy;
        dummy.status = FactoringOutcome::Status::Factored;
        return solve_norm_equation(inst, dummy, seed);
    }
    FactoringOutcome f = provider.factor(inst.n);
    return solve_norm_equation(inst, f, seed);
}

} // namespace ctsynth
