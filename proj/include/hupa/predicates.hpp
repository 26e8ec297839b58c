#pragma once
/**
 * predicates.hpp - exact orientation and in-circle signs
 *
 * Points are periodic images: a stored coordinate plus an integer number of
 * box periods per axis. The sign is evaluated for the exact real value of
 * `base + shift * L`, never for its rounded double, so all images of a
 * configuration get identical answers.
 *
 * Evaluation is staged: a floating-point filter with a conservative error
 * bound, then 128-bit integer arithmetic when every coordinate is a small
 * dyadic (lattices), then GMP integers.
 */

#include <array>
#include <cstdint>

namespace hupa::geom {

struct ImagePoint {
    double x = 0.0;
    double y = 0.0;
    int sx = 0;
    int sy = 0;
};

struct Period {
    double lx = 0.0;
    double ly = 0.0;
};

/// +1 if a, b, c turn counterclockwise, -1 if clockwise, 0 if collinear.
int orient2d(const ImagePoint& a, const ImagePoint& b, const ImagePoint& c, const Period& period);

/// +1 if d lies strictly inside the circle through counterclockwise a, b, c;
/// -1 if strictly outside; 0 if cocircular.
int incircle(const ImagePoint& a, const ImagePoint& b, const ImagePoint& c, const ImagePoint& d,
             const Period& period);

/// In-circle sign with the tie broken by a symbolic perturbation of the lifted
/// coordinates: point k gets lift |p_k|^2 + eps^(priority_k) with larger
/// priority meaning a larger perturbation. The first nonzero term, taken in
/// decreasing priority, decides. Priorities must be pairwise distinct; result
/// is never 0 unless all four points are collinear-degenerate.
int incircle_perturbed(const ImagePoint& a, const ImagePoint& b, const ImagePoint& c, const ImagePoint& d,
                       const std::array<std::uint64_t, 4>& priority, const Period& period);

/// Counters for how often each evaluation stage decided a predicate.
struct PredicateStats {
    std::uint64_t filtered = 0;
    std::uint64_t int128 = 0;
    std::uint64_t multiprecision = 0;
};
PredicateStats predicate_stats() noexcept;

}  // namespace hupa::geom
