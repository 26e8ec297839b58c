#pragma once

#include <string>

#include "hupa/core.hpp"
#include "hupa/tessellation.hpp"

namespace hupa::cli {

/// Box outline plus one circle per point; y grows upward in model space.
std::string render_pattern_svg(const PointPattern& pattern, double scale, double point_radius);

/// One clipped path per Voronoi cell, generators drawn as circles.
std::string render_voronoi_svg(const Tessellation& tess, double scale);

/// One clipped path per Delaunay triangle, vertices drawn as circles.
std::string render_delaunay_svg(const Triangulation& tri, double scale);

}  // namespace hupa::cli
