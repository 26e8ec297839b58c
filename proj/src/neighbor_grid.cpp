#include "hupa/neighbor_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hupa {

NeighborGrid::NeighborGrid(const BoxDomain& box, double min_cell_edge) : box_(box) {
    if (!(min_cell_edge > 0.0)) throw InvalidArgument("grid cell edge must be positive");
    std::size_t total = 1;
    for (int a = 0; a < box_.dim(); ++a) {
        // Cap the cell count so tiny edges on huge boxes stay bounded in memory.
        const double cap = box_.dim() == 2 ? 2048.0 : 160.0;
        const double n = std::floor(box_.length(a) / min_cell_edge);
        counts_[a] = static_cast<int>(std::clamp(n, 1.0, cap));
        edge_[a] = box_.length(a) / counts_[a];
        total *= static_cast<std::size_t>(counts_[a]);
    }
    start_.assign(total, kNone);
}

NeighborGrid::NeighborGrid(const PointPattern& pattern, double min_cell_edge)
    : NeighborGrid(pattern.box(), min_cell_edge) {
    points_.reserve(pattern.size());
    next_.reserve(pattern.size());
    for (const Vec& p : pattern.points()) insert(p);
}

std::array<int, 3> NeighborGrid::cell_of(const Vec& p) const noexcept {
    std::array<int, 3> c{0, 0, 0};
    for (int a = 0; a < box_.dim(); ++a) c[a] = std::clamp(static_cast<int>(p[a] / edge_[a]), 0, counts_[a] - 1);
    return c;
}

std::size_t NeighborGrid::flat(int x, int y, int z) const noexcept {
    auto wrap = [](int v, int n) { return ((v % n) + n) % n; };
    return (static_cast<std::size_t>(wrap(z, counts_[2])) * counts_[1] + wrap(y, counts_[1])) * counts_[0] +
           wrap(x, counts_[0]);
}

void NeighborGrid::insert(const Vec& p) {
    const auto c = cell_of(p);
    const std::size_t cell = flat(c[0], c[1], c[2]);
    const auto idx = static_cast<std::uint32_t>(points_.size());
    points_.push_back(p);
    next_.push_back(start_[cell]);
    start_[cell] = idx;
}

double NeighborGrid::nearest_other_sq(std::size_t i) const {
    const Vec& p = points_[i];
    double radius = *std::min_element(edge_.begin(), edge_.begin() + box_.dim());
    const double limit = box_.half_diagonal();
    for (;;) {
        double best = std::numeric_limits<double>::infinity();
        for_each_within(p, radius, [&](std::size_t k, double d2) {
            if (k != i) best = std::min(best, d2);
        });
        if (best <= radius * radius) return best;
        if (radius >= limit) return best;
        radius = std::min(2.0 * radius, limit);
    }
}

bool NeighborGrid::any_closer_than(const Vec& p, double radius) const {
    bool hit = false;
    const double r2 = radius * radius;
    for_each_within(p, radius, [&](std::size_t, double d2) {
        if (d2 < r2) hit = true;
    });
    return hit;
}

}  // namespace hupa
