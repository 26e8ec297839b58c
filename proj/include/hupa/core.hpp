#pragma once
/**
 * core.hpp - periodic point patterns
 *
 * Axis-aligned periodic boxes in 2 or 3 dimensions, the point-pattern model
 * every analysis consumes, minimum-image geometry and the line-oriented
 * `#hupa-pattern v1` file format.
 *
 * Coordinates use the half-open convention [0, L) on every axis so each
 * point has exactly one representative inside the box.
 */

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hupa/error.hpp"

namespace hupa {

/// Coordinates are always stored as 3-vectors; the third slot is 0 in 2D.
using Vec = std::array<double, 3>;

struct Seed {
    std::uint64_t value = 0;
    friend bool operator==(Seed, Seed) = default;
};

class BoxDomain {
  public:
    /// Throws InvalidArgument unless 2 <= lengths.size() <= 3 and every length is > 0.
    explicit BoxDomain(std::span<const double> lengths);
    BoxDomain(std::initializer_list<double> lengths)
        : BoxDomain(std::span<const double>(lengths.begin(), lengths.size())) {}

    int dim() const noexcept { return dim_; }
    double length(int axis) const noexcept { return lengths_[axis]; }
    const Vec& lengths() const noexcept { return lengths_; }
    double volume() const noexcept;
    double min_length() const noexcept;
    /// Half of the box diagonal: the largest possible minimum-image distance.
    double half_diagonal() const noexcept;

    friend bool operator==(const BoxDomain&, const BoxDomain&) = default;

  private:
    int dim_ = 2;
    Vec lengths_{1.0, 1.0, 0.0};
};

class PointPattern {
  public:
    /// Throws InvalidArgument if a coordinate lies outside [0, L) or the hard
    /// radius is negative. The hard-core invariant is not re-checked here
    /// (it is O(N^2)); see hard_core_violations().
    PointPattern(BoxDomain box, std::vector<Vec> points,
                 std::optional<double> hard_radius = std::nullopt,
                 std::string provenance = {});

    const BoxDomain& box() const noexcept { return box_; }
    int dim() const noexcept { return box_.dim(); }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const std::vector<Vec>& points() const noexcept { return points_; }
    const Vec& operator[](std::size_t i) const noexcept { return points_[i]; }
    std::optional<double> hard_radius() const noexcept { return hard_radius_; }
    const std::string& provenance() const noexcept { return provenance_; }
    double intensity() const noexcept { return static_cast<double>(size()) / box_.volume(); }

  private:
    BoxDomain box_;
    std::vector<Vec> points_;
    std::optional<double> hard_radius_;
    std::string provenance_;
};

/// Maps p into [0, L) per axis by an integer number of periods.
Vec wrap_point(const Vec& p, const BoxDomain& box) noexcept;

/// Minimum-image displacement q - p, each component in [-L/2, L/2].
Vec min_image(const Vec& p, const Vec& q, const BoxDomain& box) noexcept;

double periodic_distance(const Vec& p, const Vec& q, const BoxDomain& box) noexcept;
double periodic_distance_sq(const Vec& p, const Vec& q, const BoxDomain& box) noexcept;

/// Number of distinct pairs closer than 2r - tol; O(N^2), used as the
/// reference check for packings.
std::size_t hard_core_violations(const PointPattern& pattern, double radius, double tol = 1e-9);

/// Mean nearest-neighbour distance under the periodic metric (grid accelerated).
double mean_nearest_neighbor_distance(const PointPattern& pattern);

PointPattern load_pattern(const std::filesystem::path& path);
PointPattern parse_pattern(const std::string& text);
void save_pattern(const PointPattern& pattern, const std::filesystem::path& path);
std::string format_pattern(const PointPattern& pattern);
/// Comma-separated export: header `x,y[,z]` then one row per point.
std::string format_pattern_csv(const PointPattern& pattern);

/// Fixed-notation decimal with 17 significant digits (round-trips exactly).
std::string format_decimal(double v);

}  // namespace hupa
