#pragma once

#include "ctsynth/bigfloat.hpp"
#include "ctsynth/numeric.hpp"
#include "ctsynth/rings.hpp"

#include <optional>
#include <vector>

namespace ctsynth {

/**
 * Endpoint of a closed real interval: either an exact value in Q[sqrt 2]
 * (rationals and ring elements embed into it) or an outward-rounded
 * enclosure. Exact endpoints give exact solution sets; enclosure endpoints
 * give a superset that callers filter.
 */
class Endpoint {
  public:
    static Endpoint exact(QRootTwo v);
    static Endpoint exact(const mpq_class &v) { return exact(QRootTwo(v)); }
    static Endpoint exact(const ZRootTwo &v) { return exact(QRootTwo(v)); }
    static Endpoint exact(const DRootTwo &v) { return exact(QRootTwo::from_droottwo(v)); }
    static Endpoint approx(RealInterval enc);

    bool is_exact() const { return exact_.has_value(); }
    const QRootTwo &exact_value() const { return *exact_; }
    RealInterval enclosure(long prec) const;

    Endpoint scaled(const ZRootTwo &s, long prec) const;
    Endpoint shifted(const QRootTwo &delta, long prec) const;
    Endpoint operator-() const;

  private:
    std::optional<QRootTwo> exact_;
    RealInterval encl_;
};

struct Interval1D {
    Endpoint lo, hi;

    static Interval1D of(const Endpoint &lo, const Endpoint &hi) { return {lo, hi}; }

    /// Membership of an exact point; exact endpoints decide exactly,
    /// enclosure endpoints use outer-hull (inclusive) semantics.
    bool contains(const ZRootTwo &v, long prec) const;
};

/**
 * All alpha in Z[sqrt 2] with alpha in A and alpha_bullet in B, in
 * ascending order of real value. Internally rescales by powers of lambda
 * until the width of A lies in [1/lambda, 1), then scans the integer
 * coefficient of sqrt 2.
 */
std::vector<ZRootTwo> enumerate_grid_1d(const Interval1D &A, const Interval1D &B, long prec = 96);

} // namespace ctsynth
