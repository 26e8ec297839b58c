#include "hupa/predicates.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hupa::geom {

namespace {

__extension__ typedef __int128 Int128;

thread_local PredicateStats g_stats;

constexpr double kEps = std::numeric_limits<double>::epsilon() / 2.0;  // unit roundoff
constexpr double kOrientBound = 256.0 * kEps;
constexpr double kInCircleBound = 1024.0 * kEps;

template <class T>
int sign_of(const T& v) {
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

int sign_of(const mpz_class& v) { return sgn(v); }

struct Rounded {
    double x, y;
};

Rounded rounded(const ImagePoint& p, const Period& L) {
    return {p.x + static_cast<double>(p.sx) * L.lx, p.y + static_cast<double>(p.sy) * L.ly};
}

/// Exact integer coordinates of a set of image points under one common power-of-two scale.
template <std::size_t N>
class ScaledPoints {
  public:
    ScaledPoints(const std::array<const ImagePoint*, N>& pts, const Period& L) : pts_(pts), L_(L) {
        int e = std::numeric_limits<int>::max();
        auto consider = [&](double v) {
            if (v == 0.0) return;
            int ex = 0;
            std::frexp(v, &ex);
            e = std::min(e, ex - 53);
        };
        bool needs_lx = false, needs_ly = false;
        for (const ImagePoint* p : pts_) {
            consider(p->x);
            consider(p->y);
            needs_lx |= p->sx != 0;
            needs_ly |= p->sy != 0;
        }
        if (needs_lx) consider(L.lx);
        if (needs_ly) consider(L.ly);
        exponent_ = e == std::numeric_limits<int>::max() ? 0 : e;

        small_ = true;
        auto fits = [&](double v) { return std::fabs(std::ldexp(v, -exponent_)) < 0x1.0p24; };
        for (const ImagePoint* p : pts_) {
            small_ &= fits(p->x) && fits(p->y) && std::abs(p->sx) <= 2 && std::abs(p->sy) <= 2;
        }
        small_ &= fits(L.lx) && fits(L.ly);
    }

    bool small() const noexcept { return small_; }

    std::int64_t small_x(std::size_t i) const {
        return scaled64(pts_[i]->x) + pts_[i]->sx * scaled64(L_.lx);
    }
    std::int64_t small_y(std::size_t i) const {
        return scaled64(pts_[i]->y) + pts_[i]->sy * scaled64(L_.ly);
    }
    mpz_class big_x(std::size_t i) const { return scaled_mpz(pts_[i]->x) + pts_[i]->sx * scaled_mpz(L_.lx); }
    mpz_class big_y(std::size_t i) const { return scaled_mpz(pts_[i]->y) + pts_[i]->sy * scaled_mpz(L_.ly); }

  private:
    std::int64_t scaled64(double v) const { return static_cast<std::int64_t>(std::ldexp(v, -exponent_)); }

    mpz_class scaled_mpz(double v) const {
        if (v == 0.0) return 0;
        int ex = 0;
        const double frac = std::frexp(v, &ex);
        mpz_class m(static_cast<long>(std::ldexp(frac, 53)));
        const int shift = ex - 53 - exponent_;
        if (shift > 0) mpz_mul_2exp(m.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
        return m;
    }

    std::array<const ImagePoint*, N> pts_;
    Period L_;
    int exponent_ = 0;
    bool small_ = true;
};

template <class T>
T orient_exact(const T& ax, const T& ay, const T& bx, const T& by, const T& cx, const T& cy) {
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
}

template <class T>
T incircle_exact(const T& ax, const T& ay, const T& bx, const T& by, const T& cx, const T& cy, const T& dx,
                 const T& dy) {
    const T adx = ax - dx, ady = ay - dy;
    const T bdx = bx - dx, bdy = by - dy;
    const T cdx = cx - dx, cdy = cy - dy;
    const T alift = adx * adx + ady * ady;
    const T blift = bdx * bdx + bdy * bdy;
    const T clift = cdx * cdx + cdy * cdy;
    return alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) + clift * (adx * bdy - bdx * ady);
}

}  // namespace

int orient2d(const ImagePoint& a, const ImagePoint& b, const ImagePoint& c, const Period& L) {
    const Rounded ra = rounded(a, L), rb = rounded(b, L), rc = rounded(c, L);
    const double acx = ra.x - rc.x, bcx = rb.x - rc.x, acy = ra.y - rc.y, bcy = rb.y - rc.y;
    const double det = acx * bcy - acy * bcx;
    const double mag = std::max({std::fabs(ra.x), std::fabs(ra.y), std::fabs(rb.x), std::fabs(rb.y), std::fabs(rc.x),
                                 std::fabs(rc.y)});
    const double diff = std::max({std::fabs(acx), std::fabs(bcx), std::fabs(acy), std::fabs(bcy)});
    if (std::fabs(det) > kOrientBound * (mag + diff) * diff) {
        ++g_stats.filtered;
        return det > 0 ? 1 : -1;
    }
    ScaledPoints<3> sp({&a, &b, &c}, L);
    if (sp.small()) {
        ++g_stats.int128;
        using I = Int128;
        return sign_of(orient_exact<I>(sp.small_x(0), sp.small_y(0), sp.small_x(1), sp.small_y(1), sp.small_x(2),
                                       sp.small_y(2)));
    }
    ++g_stats.multiprecision;
    const mpz_class v = orient_exact<mpz_class>(sp.big_x(0), sp.big_y(0), sp.big_x(1), sp.big_y(1), sp.big_x(2),
                                                sp.big_y(2));
    return sign_of(v);
}

int incircle(const ImagePoint& a, const ImagePoint& b, const ImagePoint& c, const ImagePoint& d, const Period& L) {
    const Rounded ra = rounded(a, L), rb = rounded(b, L), rc = rounded(c, L), rd = rounded(d, L);
    const double det = incircle_exact<double>(ra.x, ra.y, rb.x, rb.y, rc.x, rc.y, rd.x, rd.y);
    const double mag = std::max({std::fabs(ra.x), std::fabs(ra.y), std::fabs(rb.x), std::fabs(rb.y), std::fabs(rc.x),
                                 std::fabs(rc.y), std::fabs(rd.x), std::fabs(rd.y)});
    const double diff = std::max({std::fabs(ra.x - rd.x), std::fabs(ra.y - rd.y), std::fabs(rb.x - rd.x),
                                  std::fabs(rb.y - rd.y), std::fabs(rc.x - rd.x), std::fabs(rc.y - rd.y)});
    if (std::fabs(det) > kInCircleBound * (mag + diff) * diff * diff * diff) {
        ++g_stats.filtered;
        return det > 0 ? 1 : -1;
    }
    ScaledPoints<4> sp({&a, &b, &c, &d}, L);
    if (sp.small()) {
        ++g_stats.int128;
        using I = Int128;
        return sign_of(incircle_exact<I>(sp.small_x(0), sp.small_y(0), sp.small_x(1), sp.small_y(1), sp.small_x(2),
                                         sp.small_y(2), sp.small_x(3), sp.small_y(3)));
    }
    ++g_stats.multiprecision;
    const mpz_class v = incircle_exact<mpz_class>(sp.big_x(0), sp.big_y(0), sp.big_x(1), sp.big_y(1), sp.big_x(2),
                                                  sp.big_y(2), sp.big_x(3), sp.big_y(3));
    return sign_of(v);
}

int incircle_perturbed(const ImagePoint& a, const ImagePoint& b, const ImagePoint& c, const ImagePoint& d,
                       const std::array<std::uint64_t, 4>& priority, const Period& L) {
    const int s = incircle(a, b, c, d, L);
    if (s != 0) return s;
    // d(det)/d(lift_k) is +/- the orientation of the other three points.
    const std::array<const ImagePoint*, 4> p{&a, &b, &c, &d};
    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return priority[i] > priority[j]; });
    for (int k : order) {
        int o = 0;
        switch (k) {
            case 0: o = orient2d(*p[1], *p[2], *p[3], L); break;
            case 1: o = -orient2d(*p[0], *p[2], *p[3], L); break;
            case 2: o = orient2d(*p[0], *p[1], *p[3], L); break;
            default: o = -orient2d(*p[0], *p[1], *p[2], L); break;
        }
        if (o != 0) return o;
    }
    return 0;
}

PredicateStats predicate_stats() noexcept { return g_stats; }

}  // namespace hupa::geom
