#pragma once
// Periodic cell list for range queries on the torus.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hupa/core.hpp"

namespace hupa {

class NeighborGrid {
  public:
    /// Empty grid; cells have edge >= min_cell_edge on every axis.
    NeighborGrid(const BoxDomain& box, double min_cell_edge);
    /// Grid filled with every point of the pattern, index = position in the pattern.
    NeighborGrid(const PointPattern& pattern, double min_cell_edge);

    void insert(const Vec& p);
    std::size_t size() const noexcept { return points_.size(); }
    const Vec& point(std::size_t i) const noexcept { return points_[i]; }

    /// Calls fn(index, squared periodic distance) for every stored point with
    /// periodic distance <= radius. Each point is visited at most once.
    template <class Fn>
    void for_each_within(const Vec& center, double radius, Fn&& fn) const {
        const double r2 = radius * radius;
        std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
        std::array<int, 3> c = cell_of(center);
        for (int a = 0; a < 3; ++a) {
            if (a >= box_.dim()) continue;
            const int span = static_cast<int>(std::ceil(radius / edge_[a]));
            if (2 * span + 1 >= counts_[a]) {
                lo[a] = 0;
                hi[a] = counts_[a] - 1;
                c[a] = 0;
            } else {
                lo[a] = -span;
                hi[a] = span;
            }
        }
        for (int dz = lo[2]; dz <= hi[2]; ++dz)
            for (int dy = lo[1]; dy <= hi[1]; ++dy)
                for (int dx = lo[0]; dx <= hi[0]; ++dx) {
                    const std::size_t cell = flat(c[0] + dx, c[1] + dy, c[2] + dz);
                    for (std::uint32_t k = start_[cell]; k != kNone; k = next_[k]) {
                        const double d2 = periodic_distance_sq(center, points_[k], box_);
                        if (d2 <= r2) fn(static_cast<std::size_t>(k), d2);
                    }
                }
    }

    /// Squared periodic distance from stored point i to the nearest other stored point.
    double nearest_other_sq(std::size_t i) const;

    /// True if some stored point lies strictly closer than `radius` to p.
    bool any_closer_than(const Vec& p, double radius) const;

  private:
    static constexpr std::uint32_t kNone = 0xffffffffu;

    std::array<int, 3> cell_of(const Vec& p) const noexcept;
    std::size_t flat(int x, int y, int z) const noexcept;

    BoxDomain box_;
    std::array<int, 3> counts_{1, 1, 1};
    Vec edge_{1.0, 1.0, 1.0};
    std::vector<std::uint32_t> start_;
    std::vector<std::uint32_t> next_;
    std::vector<Vec> points_;
};

}  // namespace hupa
