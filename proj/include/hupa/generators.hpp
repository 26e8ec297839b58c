#pragma once
/**
 * generators.hpp - point patterns across the order/disorder spectrum
 *
 *   poisson            totally disordered (homogeneous Poisson process)
 *   lattice            perfectly ordered (square, triangular, cubic)
 *   perturbed_lattice  disordered but hyperuniform (i.i.d. uniform jitter per site)
 *   rsa_packing        hard disks/spheres by random sequential addition
 *
 * Every generator is a pure function of its arguments and seed.
 */

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hupa/core.hpp"

namespace hupa {

enum class LatticeKind { square, triangular, cubic };

std::string to_string(LatticeKind kind);
LatticeKind parse_lattice_kind(const std::string& name);

/// Box length not an integer multiple of the lattice cell.
class IncommensurateBox : public InvalidArgument {
  public:
    IncommensurateBox(int axis, double length, double cell, double nearest_length);
    int axis() const noexcept { return axis_; }
    double nearest_length() const noexcept { return nearest_; }
    /// Spacing that would tile the given length with the nearest whole number of cells.
    double nearest_spacing() const noexcept { return nearest_spacing_; }

  private:
    int axis_;
    double nearest_;
    double nearest_spacing_;
};

/// RSA stopped after max_attempts consecutive rejections.
class TargetUnreachable : public Error {
  public:
    TargetUnreachable(std::size_t achieved, std::size_t target, PointPattern partial);
    std::size_t achieved() const noexcept { return achieved_; }
    std::size_t target() const noexcept { return target_; }
    const PointPattern& partial() const noexcept { return partial_; }

  private:
    std::size_t achieved_;
    std::size_t target_;
    PointPattern partial_;
};

PointPattern generate_poisson(const BoxDomain& box, double intensity, Seed seed);

/// Square/cubic sites sit at integer multiples of the spacing. Triangular rows
/// are spaced a*sqrt(3)/2 apart with odd rows shifted by a/2, so the box height
/// must be an even multiple of a*sqrt(3)/2.
PointPattern generate_lattice(const BoxDomain& box, LatticeKind kind, double spacing);

/// Square (2D) or cubic (3D) lattice with every site displaced independently,
/// uniformly in [-jitter, jitter] per axis, then wrapped. Requires 0 <= jitter < spacing/2.
PointPattern generate_perturbed_lattice(const BoxDomain& box, double spacing, double jitter, Seed seed);

struct RsaTarget {
    /// Exactly one of count / packing_fraction is set.
    std::optional<std::size_t> count;
    std::optional<double> packing_fraction;
};

/// Number of particles a packing-fraction target resolves to (rounded to nearest).
std::size_t rsa_target_count(const BoxDomain& box, double hard_radius, const RsaTarget& target);

/// Largest packing fraction accepted as a target (RSA saturation is ~0.547 in 2D, ~0.38 in 3D).
double rsa_fraction_cap(int dim) noexcept;

PointPattern generate_rsa_packing(const BoxDomain& box, double hard_radius, const RsaTarget& target,
                                  std::size_t max_attempts, Seed seed);

struct PoissonParams {
    double intensity = 1.0;
};
struct LatticeParams {
    LatticeKind kind = LatticeKind::square;
    double spacing = 1.0;
};
struct PerturbedLatticeParams {
    double spacing = 1.0;
    double jitter = 0.0;
};
struct RsaParams {
    double hard_radius = 0.5;
    RsaTarget target;
    std::size_t max_attempts = 100000;
};

struct GeneratorSpec {
    BoxDomain box;
    std::variant<PoissonParams, LatticeParams, PerturbedLatticeParams, RsaParams> params;

    std::string kind_name() const;
};

PointPattern generate(const GeneratorSpec& spec, Seed seed);

/// Realization i uses derive_seed(base_seed, i).
std::vector<PointPattern> ensemble(const GeneratorSpec& spec, std::size_t n_realizations, Seed base_seed,
                                   unsigned threads = 1);

}  // namespace hupa
