#pragma once

#include "ctsynth/bigfloat.hpp"
#include "ctsynth/grid1d.hpp"
#include "ctsynth/numeric.hpp"
#include "ctsynth/rings.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ctsynth {

/**
 * Constants governing the skew-reduction step: the skew threshold P, the
 * per-step decay factor Q, and the region parameters (r, a, b) of the
 * R/K/A/B case dispatch. Chosen by a feasibility search over the
 * inequalities that the step analysis requires; verify_step_constants
 * re-checks all of them numerically.
 */
struct StepConstants {
    mpq_class P{15};
    mpq_class Q{9, 10};
    mpq_class r{9, 10};
    mpq_class a{-3, 10};
    mpq_class b{4, 25};
};

const StepConstants &step_constants();

/// Re-verifies the full inequality ledger behind the step constants to the
/// given tolerance. Returns the list of violated inequalities (empty = ok).
std::vector<std::string> verify_step_constants(double tol = 1e-9);

/**
 * Linear map of the plane preserving Z[omega], stored as an exact 2x2
 * matrix with entries in (1/sqrt2) Z[sqrt2]. Special means determinant +-1.
 */
class GridOperator {
  public:
    DRootTwo m00, m01, m10, m11;

    GridOperator();
    GridOperator(DRootTwo e00, DRootTwo e01, DRootTwo e10, DRootTwo e11);

    static GridOperator identity();
    static GridOperator R();
    static GridOperator K();
    static GridOperator X();
    static GridOperator Z();
    static GridOperator A_pow(const mpz_class &n);
    static GridOperator B_pow(const mpz_class &n);

    bool is_grid_operator() const;
    DRootTwo det() const;
    bool is_special() const;

    GridOperator operator*(const GridOperator &o) const;
    GridOperator inverse() const;
    GridOperator bullet() const;
    GridOperator transpose() const;
    bool operator==(const GridOperator &o) const;

    /// sigma^j * G * sigma^j: scales the diagonal by lambda^{+-j}.
    GridOperator sigma_conj(long j) const;

    /// Exact action on a lattice point.
    ZOmega apply(const ZOmega &u) const;

    /// Interval action on a real point.
    std::pair<RealInterval, RealInterval> apply(const std::pair<RealInterval, RealInterval> &p,
                                                long prec) const;

    std::string to_string() const;
};

/// Symmetric positive definite 2x2 interval matrix [[a, b], [b, d]].
struct SymMat {
    RealInterval a, b, d;

    RealInterval det(long prec) const;
    /// Congruence transform g^T * M * g for an exact grid operator g.
    SymMat congruence(const GridOperator &g, long prec) const;
    SymMat scaled_det1(long prec) const;
};

/**
 * Ellipse { u : (u-p)^T D (u-p) <= 1 } with certified-interval entries.
 */
struct Ellipse {
    SymMat mat;
    RealInterval cx, cy;

    static Ellipse unit_disk(long prec);

    RealInterval area(long prec) const;
    RealInterval uprightness(long prec) const;

    /// Axis-aligned bounding box, outward-rounded.
    Interval1D bbox_x(long prec) const;
    Interval1D bbox_y(long prec) const;

    /// Image under the region scaling u -> sqrt2^k u (negate: (-sqrt2)^k u).
    Ellipse scaled_sqrt2_pow(long k, bool negate, long prec) const;

    /// Image G(E) under a special grid operator.
    Ellipse transformed(const GridOperator &G, long prec) const;
};

RealInterval uprightness(const Ellipse &E, long prec);

/**
 * Pair of determinant-1 positive matrices, the object the Step Lemma acts
 * on. skew = b^2 + beta^2 measures how far both ellipses are from upright;
 * bias = zeta - z is normalized by shift conjugation.
 */
struct State {
    SymMat d1, d2;
    long prec = 96;

    static State from_ellipses(const Ellipse &A, const Ellipse &B, long prec);

    RealInterval skew() const;
    RealInterval z() const;
    RealInterval zeta() const;
    RealInterval bias() const;

    State applied(const GridOperator &G) const;
};

/// One skew-reduction step (Step Lemma): requires skew >= P, returns a
/// special grid operator whose action multiplies the skew by at most Q.
GridOperator step_operator(const State &s);

struct SkewReduction {
    GridOperator G;        // uprighting operator: apply to the problem
    GridOperator G_inv;    // exact inverse (= accumulated step product)
    long iterations = 0;
    RealInterval final_skew;
};

/// Iterates step_operator until the skew drops to P, making G(A) and
/// G_bullet(B) at least pi/(4 sqrt(P+1))-upright.
SkewReduction reduce_skew(const Ellipse &A, const Ellipse &B, long prec);

/**
 * Bounded convex set that a grid problem can range over: exact membership
 * for D[omega] points, an enclosing ellipse, and chord intersections with
 * straight lines.
 */
class ConvexRegion {
  public:
    virtual ~ConvexRegion() = default;
    /// Certified membership; boundary ties that stay unresolved after
    /// precision doublings are rejected.
    virtual bool contains(const DOmega &u, long prec) const = 0;
    virtual Ellipse enclosing_ellipse(long prec) const = 0;
    /// Chord { t : p + t q in region } as an outward-rounded interval, or
    /// nullopt when the line misses the region.
    virtual std::optional<Interval1D> line_intersect(const DOmega &p, const DOmega &q,
                                                     long prec) const = 0;
};

/// Disk of squared radius r2 centered at the origin.
class DiskRegion : public ConvexRegion {
  public:
    explicit DiskRegion(DRootTwo r2 = DRootTwo(1));
    const DRootTwo &radius_sq() const { return r2_; }

    bool contains(const DOmega &u, long prec) const override;
    Ellipse enclosing_ellipse(long prec) const override;
    std::optional<Interval1D> line_intersect(const DOmega &p, const DOmega &q,
                                             long prec) const override;

  private:
    DRootTwo r2_;
};

struct Rect {
    Interval1D x, y;
};

/// All u in Z[omega] with u in A and u_bullet in B for upright rectangles,
/// via two one-dimensional subproblems per residue class of Z[omega].
std::vector<ZOmega> enumerate_upright_rects(const Rect &A, const Rect &B, long prec = 96);

/// Grid problem transformed by a special grid operator: u solves (A, B) iff
/// G u solves (G(A), G_bullet(B)). Returns the transformed ellipse pair.
std::pair<Ellipse, Ellipse> apply_grid_operator(const Ellipse &A, const Ellipse &B,
                                                const GridOperator &G, long prec);

/**
 * Solution stream for the scaled grid problem over a pair of convex
 * regions: level(k) returns exactly the solutions with least denominator
 * exponent k, so iterating k = 0, 1, 2, ... enumerates all of D[omega] in
 * order of increasing k. The skew-reducing operator is computed once.
 */
class ScaledGridStream {
  public:
    ScaledGridStream(const ConvexRegion &A, const ConvexRegion &B, long prec);

    std::vector<DOmega> level(long k) const;
    const SkewReduction &reduction() const { return red_; }

  private:
    const ConvexRegion &A_;
    const ConvexRegion &B_;
    long prec_;
    Ellipse encA_, encB_;
    SkewReduction red_;
};

/// All solutions of the plain two-dimensional grid problem (Z[omega]
/// points with u in A, u_bullet in B).
std::vector<ZOmega> enumerate_convex(const ConvexRegion &A, const ConvexRegion &B, long prec);

} // namespace ctsynth
