#pragma once

#include "ctsynth/rings.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

namespace ctsynth {

struct PrimePower {
    mpz_class p;
    long e = 0;
};

struct FactoringOutcome {
    enum class Status { Factored, TimedOut };
    Status status = Status::TimedOut;
    std::vector<PrimePower> factors; // of |n|, sorted by p, valid when Factored
    long effort_spent = 0;

    bool ok() const { return status == Status::Factored; }
};

/**
 * Attempt a full prime factorization of n under a capped effort budget.
 * Strategy: deterministic Miller-Rabin, trial division to 10^4, perfect
 * power detection, then at most `effort` Pollard rho rounds. Deterministic
 * for fixed (n, effort, seed).
 */
FactoringOutcome factorize(const mpz_class &n, long effort, std::uint64_t seed);

bool is_probable_prime(const mpz_class &n);

/// x with x^2 = a (mod p) for odd prime p, or nullopt for a non-residue.
/// Tonelli-Shanks; the non-residue search tries small primes first, then a
/// seeded pseudo-random sequence.
std::optional<mpz_class> sqrt_mod(const mpz_class &a, const mpz_class &p, std::uint64_t seed = 0);

/**
 * Splitting of an integer prime in Z[sqrt 2]: 2 ramifies as sqrt2 * sqrt2,
 * p = 3,5 (mod 8) stays prime, p = 1,7 (mod 8) splits as xi_bullet * xi.
 */
struct PrimeSplitting {
    enum class Kind { Ramified, Inert, Split };
    Kind kind;
    ZRootTwo xi;
};
PrimeSplitting split_prime(const mpz_class &p, std::uint64_t seed = 0);

/// Source of factorizations for Algorithm step 2(b).
class FactoringProvider {
  public:
    virtual ~FactoringProvider() = default;
    virtual FactoringOutcome factor(const mpz_class &n) = 0;
};

class CappedFactoring : public FactoringProvider {
  public:
    explicit CappedFactoring(long effort = 25, std::uint64_t seed = 0)
        : effort_(effort), seed_(seed) {}
    FactoringOutcome factor(const mpz_class &n) override { return factorize(n, effort_, seed_); }

  private:
    long effort_;
    std::uint64_t seed_;
};

/// Pre-computed factorizations keyed by n (the --oracle-factors table);
/// misses fall back to the capped strategy.
class FileOracleFactoring : public FactoringProvider {
  public:
    explicit FileOracleFactoring(long fallback_effort = 25, std::uint64_t seed = 0)
        : fallback_(fallback_effort, seed) {}

    void add(const mpz_class &n, std::vector<PrimePower> factors);
    void load(std::istream &in);
    FactoringOutcome factor(const mpz_class &n) override;

  private:
    std::map<mpz_class, std::vector<PrimePower>> table_;
    CappedFactoring fallback_;
};

/**
 * Instance of the norm equation t_dagger t = xi: xi_bullet xi = n / 2^ell
 * with ell minimal.
 */
struct NormEquationInstance {
    DRootTwo xi;
    mpz_class n;
    long ell = 0;

    static NormEquationInstance of(const DRootTwo &xi);
};

enum class SolveStatus { Solved, Unsolvable, Unknown };

struct NormEquationResult {
    SolveStatus status = SolveStatus::Unknown;
    DOmega t;
};

/**
 * t in Z[omega] with t_dagger t ~ xi, given a prime factorization of xi in
 * Z[sqrt 2]; nullopt when unsolvable (an odd-multiplicity prime over
 * p = 7 mod 8). Throws if the factorization does not multiply out to xi up
 * to a unit.
 */
std::optional<ZOmega> decompose_assoc(const ZRootTwo &xi,
                                      const std::vector<std::pair<ZRootTwo, long>> &factorization,
                                      std::uint64_t seed = 0);

/// From t0 with t0_dagger t0 ~ xi (xi doubly positive) to the exact
/// solution t = v t0 with t_dagger t = xi; the relating unit is doubly
/// positive, hence a square.
DOmega fix_unit(const DOmega &t0, const DRootTwo &xi);

NormEquationResult solve_norm_equation(const NormEquationInstance &inst,
                                       const FactoringOutcome &factoring, std::uint64_t seed = 0);
NormEquationResult solve_norm_equation(const DRootTwo &xi, FactoringProvider &provider,
                                       std::uint64_t seed = 0);

} // namespace ctsynth
