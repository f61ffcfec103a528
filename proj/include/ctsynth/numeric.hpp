#pragma once

#include "ctsynth/bigfloat.hpp"
#include "ctsynth/rings.hpp"

#include <functional>

namespace ctsynth {

enum class Ordering { Less, Equal, Greater };
enum class Sign { Negative, Zero, Positive, Unresolved };

/// Bits needed so that accept/reject decisions at precision epsilon are
/// reliable: max(64, ceil(2*log2(1/epsilon)) + 32).
long working_precision(const mpq_class &epsilon);

RealInterval eval_ring_element(const ZRootTwo &x, long prec);
RealInterval eval_ring_element(const DRootTwo &x, long prec);
RealInterval eval_ring_element(const QRootTwo &x, long prec);
RealInterval eval_real(const DOmega &u, long prec);
RealInterval eval_imag(const DOmega &u, long prec);

/// Total order on exact values; refines intervals at doubling precision and
/// falls back to the exact ring sign when they fail to separate.
Ordering certified_compare(const QRootTwo &x, const QRootTwo &y);
Ordering certified_compare(const DRootTwo &x, const DRootTwo &y);

/**
 * Certified sign of an exact real given only by an enclosure oracle.
 * Evaluates at base_prec and up to `doublings` further precision doublings;
 * returns Unresolved if the enclosure still straddles zero.
 */
Sign certified_sign(const std::function<RealInterval(long)> &eval, long base_prec, int doublings = 3);

} // namespace ctsynth
