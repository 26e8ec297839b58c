#pragma once
/**
 * tessellation.hpp - periodic Delaunay triangulations and Voronoi tessellations (2D)
 *
 * Construction tiles the pattern 3x3, triangulates the tiled set with exact
 * predicates (Bowyer-Watson), and keeps one representative of every torus
 * triangle: the copy whose smallest-ranked vertex sits in the central tile.
 * The result is rejected, never patched, if a kept triangle's circumdisk
 * leaves the tiled region or the triangles fail to partition the box.
 *
 * Cocircular configurations (square lattices) are resolved by a symbolic
 * perturbation keyed on each point's rank in lexicographic (x, y) order, so
 * the output does not depend on the order points are stored in.
 */

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hupa/core.hpp"

namespace hupa {

class TessellationError : public Error {
  public:
    explicit TessellationError(const std::string& msg) : Error(msg) {}
};

/// Integer number of box periods per axis.
using Shift = std::array<int, 2>;

struct Triangle {
    /// Pattern indices, counterclockwise. vertex[0] has shift {0,0}.
    std::array<std::uint32_t, 3> vertex{};
    std::array<Shift, 3> shift{};
    double area = 0.0;
};

class Triangulation {
  public:
    Triangulation(BoxDomain box, std::vector<Vec> points, std::vector<Triangle> triangles);

    const BoxDomain& box() const noexcept { return box_; }
    const std::vector<Vec>& points() const noexcept { return points_; }
    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }

    std::size_t vertex_count() const noexcept { return points_.size(); }
    std::size_t face_count() const noexcept { return triangles_.size(); }
    /// Distinct torus edges.
    std::size_t edge_count() const;
    long euler_characteristic() const;
    /// Unwrapped position of vertex k of triangle t.
    Vec position(const Triangle& t, int k) const noexcept;
    /// Set of Delaunay edges as (i, j, shift of j relative to i) with i < j,
    /// or i == j and the shift lexicographically positive.
    std::vector<std::pair<std::pair<std::uint32_t, std::uint32_t>, Shift>> edges() const;

  private:
    BoxDomain box_;
    std::vector<Vec> points_;
    std::vector<Triangle> triangles_;
};

struct VoronoiCell {
    std::uint32_t generator = 0;
    /// Counterclockwise loop in unwrapped coordinates around the generator.
    std::vector<Vec> loop;
    /// For each loop entry: index into Tessellation::vertices() and the shift
    /// such that loop[k] = vertices()[vertex_id[k]] + vertex_shift[k] * L.
    std::vector<std::uint32_t> vertex_id;
    std::vector<Shift> vertex_shift;
    std::vector<std::uint32_t> neighbors;
    double area = 0.0;

    int sides() const noexcept { return static_cast<int>(loop.size()); }
};

class Tessellation {
  public:
    Tessellation(BoxDomain box, std::vector<Vec> points, std::vector<Vec> vertices, std::vector<VoronoiCell> cells);

    const BoxDomain& box() const noexcept { return box_; }
    const std::vector<Vec>& points() const noexcept { return points_; }
    /// Voronoi vertices wrapped into the box.
    const std::vector<Vec>& vertices() const noexcept { return vertices_; }
    const std::vector<VoronoiCell>& cells() const noexcept { return cells_; }

  private:
    BoxDomain box_;
    std::vector<Vec> points_;
    std::vector<Vec> vertices_;
    std::vector<VoronoiCell> cells_;
};

struct CellStats {
    std::size_t cell_count = 0;
    double area_mean = 0.0;
    double area_cv = 0.0;
    std::map<int, std::size_t> side_histogram;
    double mean_sides = 0.0;
    double edge_length_mean = 0.0;
    double edge_length_cv = 0.0;
};

Triangulation delaunay(const PointPattern& pattern);

/// Dual of the periodic Delaunay triangulation; Voronoi vertices closer than
/// 1e-10 mean spacings are merged (cocircular input). Patterns too sparse for
/// the 3x3 construction fall back to voronoi_by_clipping().
Tessellation voronoi(const PointPattern& pattern);

/// Independent construction: each cell is the box-sized square around its
/// generator clipped by the bisectors of every nearby periodic image.
Tessellation voronoi_by_clipping(const PointPattern& pattern);

/// Triangles whose circumdisk strictly contains a non-member point, with the
/// disk radius shrunk by rel_tol.
std::size_t empty_circle_violations(const Triangulation& tri, double rel_tol = 1e-9);

/// Circumcenter and circumradius of triangle t in the frame of its vertex[0].
std::pair<Vec, double> circumcircle(const Triangulation& tri, const Triangle& t);

/// Population (not sample) moments, so duplicating every cell leaves them unchanged.
CellStats cell_statistics(const Tessellation& tess);
CellStats ensemble_cell_statistics(const std::vector<PointPattern>& patterns);
CellStats pool_cell_statistics(const std::vector<Tessellation>& tessellations);

/// `#hupa-tess v1` text export.
std::string format_tessellation(const Tessellation& tess);
std::string format_triangulation(const Triangulation& tri);

}  // namespace hupa
