#pragma once
/**
 * field.hpp - two-phase (dark/light) rasters on a periodic 2D box
 *
 * Pixel (i, j) covers [i*h, (i+1)*h) x [j*h, (j+1)*h) with row j = 0 at y = 0.
 * Window membership is decided by pixel centers only.
 */

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hupa/core.hpp"

namespace hupa {

class Tessellation;

class BinaryField {
  public:
    /// `dark` is row-major, size nx*ny. Throws unless pixels are square within 1e-12 relative.
    BinaryField(BoxDomain box, std::size_t nx, std::size_t ny, std::vector<std::uint8_t> dark,
                std::string provenance = {});

    const BoxDomain& box() const noexcept { return box_; }
    std::size_t nx() const noexcept { return nx_; }
    std::size_t ny() const noexcept { return ny_; }
    double pixel_size() const noexcept { return h_; }
    bool dark(std::size_t i, std::size_t j) const noexcept { return dark_[j * nx_ + i] != 0; }
    const std::vector<std::uint8_t>& bits() const noexcept { return dark_; }
    double dark_fraction() const noexcept { return dark_fraction_; }
    std::size_t dark_count() const noexcept { return dark_count_; }
    const std::string& provenance() const noexcept { return provenance_; }

    /// Dark pixels among row j's columns [i0, i0 + count), wrapping periodically.
    std::size_t dark_in_row(std::size_t j, long i0, std::size_t count) const noexcept;

  private:
    BoxDomain box_;
    std::size_t nx_, ny_;
    double h_;
    std::vector<std::uint8_t> dark_;
    std::vector<std::uint32_t> row_prefix_;  // (nx+1) entries per row
    std::size_t dark_count_ = 0;
    double dark_fraction_ = 0.0;
    std::string provenance_;
};

struct LoadFieldOptions {
    /// Gray values <= threshold are dark. Required for PGM input.
    std::optional<int> threshold;
    /// Model length of one pixel edge; overrides a sidecar header.
    std::optional<double> pixel_size;
};

/// Reads PBM (P1/P4, 1 = dark) or PGM (P2/P5, maxval <= 255). A sidecar
/// `<path>.hupa` containing `lengths=<Lx,Ly>` sets the box size; otherwise one
/// length unit per pixel. Image row 0 (the top) becomes row ny-1 of the field.
BinaryField load_field(const std::filesystem::path& path, const LoadFieldOptions& options = {});
BinaryField parse_field(const std::string& bytes, const LoadFieldOptions& options = {},
                        const std::optional<std::string>& sidecar = std::nullopt);

/// Binary P4 encoding (dark = 1).
std::string encode_pbm(const BinaryField& field);
void save_field(const BinaryField& field, const std::filesystem::path& path);

/// Dark fraction among pixels whose centers lie within periodic distance R
/// of `center` (distance exactly R counts as inside). Requires 0 < R < min(L)/2.
double field_dark_fraction_in_window(const BinaryField& field, const Vec& center, double R);

/// Pixels whose centers lie within periodic distance R of center, and how many are dark.
struct WindowTally {
    std::size_t pixels = 0;
    std::size_t dark = 0;
};
WindowTally field_window_tally(const BinaryField& field, const Vec& center, double R);

/// Dark wherever a pixel center lies within wall_halfwidth (periodic metric)
/// of a cell edge. nx = pixels_per_axis; ny follows from square pixels, so
/// Ly/Lx * pixels_per_axis must be a whole number.
BinaryField rasterize_tessellation(const Tessellation& tess, std::size_t pixels_per_axis, double wall_halfwidth);

/// I.i.d. pixels, each dark with probability p.
BinaryField random_pixel_field(const BoxDomain& box, std::size_t nx, double p, Seed seed);

}  // namespace hupa
