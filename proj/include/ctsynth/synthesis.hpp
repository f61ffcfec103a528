#pragma once

#include "ctsynth/diophantine.hpp"
#include "ctsynth/grid2d.hpp"
#include "ctsynth/numeric.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ctsynth {

/**
 * Exact angle: a rational multiple of pi or a plain rational number.
 * Trigonometric values are produced as directed-rounding enclosures.
 */
class AngleSpec {
  public:
    static AngleSpec pi_multiple(const mpq_class &m);
    static AngleSpec rational(const mpq_class &v);
    /// Accepts "pi/128", "-3*pi/4", "pi", "2pi/7", decimals ("0.15") and
    /// plain fractions ("3/7").
    static AngleSpec parse(const std::string &s);

    bool is_pi_multiple() const { return pi_multiple_; }
    const mpq_class &coefficient() const { return coef_; }

    RealInterval theta(long prec) const;
    /// Enclosures of (cos(-theta/2), sin(-theta/2)).
    std::pair<RealInterval, RealInterval> z_vector(long prec) const;
    /// Integer closest to 2 theta / pi.
    long nearest_quarter_index(long prec = 128) const;

    std::string to_string() const;

  private:
    bool pi_multiple_ = true;
    mpq_class coef_ = 0;
};

/**
 * The epsilon-region: points of the closed unit disk whose inner product
 * with z = (cos(-theta/2), sin(-theta/2)) is at least 1 - eps^2/2. The
 * delta_scaled variant is the region |delta| R_eps used by the phase
 * algorithm.
 */
class EpsilonRegion : public ConvexRegion {
  public:
    EpsilonRegion(AngleSpec theta, mpq_class eps, bool delta_scaled = false);

    bool contains(const DOmega &u, long prec) const override;
    Ellipse enclosing_ellipse(long prec) const override;
    std::optional<Interval1D> line_intersect(const DOmega &p, const DOmega &q,
                                             long prec) const override;

    const AngleSpec &theta() const { return theta_; }
    const mpq_class &epsilon() const { return eps_; }

  private:
    AngleSpec theta_;
    mpq_class eps_;
    bool delta_scaled_;
    DRootTwo scale_sq_; // 1, or lambda sqrt2 = |delta|^2
};

/**
 * Clifford+T circuit as a word over {H, T, S, X} with a trailing global
 * phase omega^wpower; the matrix is the left-to-right product.
 */
struct Circuit {
    std::string gates;
    long wpower = 0;

    long tcount() const;
    std::string to_string() const;
    static Circuit parse(const std::string &s);
};

/// Exact 2x2 matrix over D[omega].
struct Mat2 {
    DOmega a, b, c, d;

    Mat2 operator*(const Mat2 &o) const;
    bool operator==(const Mat2 &o) const;
    static Mat2 identity();
    static Mat2 gate(char g);
};

Mat2 circuit_matrix(const Circuit &c);

/// U = [[u, -t_dagger w^l], [t, u_dagger w^l]].
Mat2 unitary_of(const DOmega &u, const DOmega &t, long lphase);

struct ExactSynthesis {
    Circuit circuit;
    DOmega u, t; // entries of the operator actually synthesized
    long lphase = 0;
};

/**
 * Minimal-T-count Clifford+T word for the unitary with entries (u, t) and
 * phase column w^lphase, taking the better of U and T U T_dagger (which
 * replaces t by omega t). The word re-multiplies exactly to the returned
 * operator.
 */
ExactSynthesis exact_synthesize(const DOmega &u, const DOmega &t, long lphase);

/// Certified upper enclosure of ||Rz(theta) - U|| = sqrt(2 - 2 Re(z~ u)).
RealInterval operator_error(const AngleSpec &theta, const DOmega &u, long prec);
/// Same for the phase variant: u_prime = delta u, error via (u' . z)/|delta|.
RealInterval operator_error_phase8(const AngleSpec &theta, const DOmega &u_prime, long prec);

enum class SynthesisMode { Plain, Phase8, Best };

struct CandidateRecord {
    long k = 0;
    mpz_class n;
    SolveStatus outcome = SolveStatus::Unknown;
    bool phase8 = false;
};

struct SynthesisOptions {
    long effort = 25;
    std::uint64_t seed = 0;
    FactoringProvider *provider = nullptr; // overrides the capped default
    long max_levels = 200000;
};

struct SynthesisResult {
    DOmega u, t;
    long k = 0; // least denominator exponent driving the T-count
    Circuit circuit;
    long tcount = 0;
    long tcount_lower_bound = 0;
    RealInterval error_bound;
    std::vector<CandidateRecord> ledger;
    SynthesisMode mode = SynthesisMode::Plain;
    bool phase8 = false; // result approximates Rz up to the phase e^{i pi/8}
};

/// True when eps >= |1 - e^{i pi/8}|, the regime with T-count-0 solutions.
bool clifford_fallback_applies(const mpq_class &eps);

/// T-count-0 approximation u = w^-j, t = 0 with j nearest to 2 theta/pi,
/// or nullopt when eps is too small for a Clifford to suffice.
std::optional<SynthesisResult> clifford_fallback(const AngleSpec &theta, const mpq_class &eps);

SynthesisResult synthesize(const AngleSpec &theta, const mpq_class &eps,
                           const SynthesisOptions &opts = {});
SynthesisResult synthesize_phase8(const AngleSpec &theta, const mpq_class &eps,
                                  const SynthesisOptions &opts = {});
SynthesisResult synthesize_up_to_phase(const AngleSpec &theta, const mpq_class &eps,
                                       const SynthesisOptions &opts = {});

/// Firm per-instance lower bound from the candidate trace: 2k-2 (plain) or
/// 2k-1 (phase branch) for the first candidate whose norm-equation outcome
/// was Solved or TimedOut.
long lower_bound_report(const std::vector<CandidateRecord> &ledger, bool phase8_branch);

} // namespace ctsynth
