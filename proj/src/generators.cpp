#include "hupa/generators.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "hupa/neighbor_grid.hpp"
#include "hupa/parallel.hpp"
#include "hupa/random.hpp"

namespace hupa {

namespace {

std::string num(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string box_text(const BoxDomain& box) {
    std::string s;
    for (int i = 0; i < box.dim(); ++i) s += (i ? "x" : "") + num(box.length(i));
    return s;
}

/// Number of whole cells of edge `cell` along `axis`; throws if not commensurate.
std::size_t cells_along(const BoxDomain& box, int axis, double cell) {
    const double L = box.length(axis);
    const double n = L / cell;
    const double whole = std::max(1.0, std::round(n));
    if (std::fabs(n - whole) > 1e-9 * std::max(1.0, n))
        throw IncommensurateBox(axis, L, cell, whole * cell);
    return static_cast<std::size_t>(whole);
}

double unit_ball_volume(int dim) { return dim == 2 ? std::numbers::pi : 4.0 / 3.0 * std::numbers::pi; }

}  // namespace

std::string to_string(LatticeKind kind) {
    switch (kind) {
        case LatticeKind::square: return "square";
        case LatticeKind::triangular: return "triangular";
        case LatticeKind::cubic: return "cubic";
    }
    return "square";
}

LatticeKind parse_lattice_kind(const std::string& name) {
    if (name == "square") return LatticeKind::square;
    if (name == "triangular") return LatticeKind::triangular;
    if (name == "cubic") return LatticeKind::cubic;
    throw InvalidArgument("unknown lattice kind '" + name + "' (expected square, triangular or cubic)");
}

IncommensurateBox::IncommensurateBox(int axis, double length, double cell, double nearest_length)
    : InvalidArgument("box length " + num(length) + " on axis " + std::to_string(axis) +
                      " is not a multiple of the lattice cell " + num(cell) + "; nearest commensurate length is " +
                      num(nearest_length) + " (or keep the length and use spacing " +
                      num(cell * length / nearest_length) + ")"),
      axis_(axis), nearest_(nearest_length), nearest_spacing_(cell * length / nearest_length) {}

TargetUnreachable::TargetUnreachable(std::size_t achieved, std::size_t target, PointPattern partial)
    : Error("RSA target unreachable: placed " + std::to_string(achieved) + " of " + std::to_string(target) +
            " particles before the consecutive-rejection limit"),
      achieved_(achieved), target_(target), partial_(std::move(partial)) {}

PointPattern generate_poisson(const BoxDomain& box, double intensity, Seed seed) {
    if (!(intensity >= 0.0) || !std::isfinite(intensity)) throw InvalidArgument("intensity must be finite and >= 0");
    Rng rng(seed);
    const std::uint64_t n = rng.poisson(intensity * box.volume());
    std::vector<Vec> pts(n, Vec{0.0, 0.0, 0.0});
    for (auto& p : pts)
        for (int a = 0; a < box.dim(); ++a) p[a] = rng.uniform_below(box.length(a));
    return PointPattern(box, std::move(pts), std::nullopt,
                        "poisson box=" + box_text(box) + " intensity=" + num(intensity) +
                            " seed=" + std::to_string(seed.value));
}

namespace {

std::vector<Vec> lattice_sites(const BoxDomain& box, LatticeKind kind, double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("lattice spacing must be positive");
    if (kind == LatticeKind::cubic && box.dim() != 3) throw InvalidArgument("cubic lattice requires a 3D box");
    if (kind != LatticeKind::cubic && box.dim() != 2)
        throw InvalidArgument(to_string(kind) + " lattice requires a 2D box");
    std::vector<Vec> pts;
    if (kind == LatticeKind::triangular) {
        const double row = a * std::sqrt(3.0) / 2.0;
        const std::size_t nx = cells_along(box, 0, a);
        const std::size_t pairs = cells_along(box, 1, 2.0 * row);
        pts.reserve(nx * pairs * 2);
        for (std::size_t j = 0; j < 2 * pairs; ++j)
            for (std::size_t i = 0; i < nx; ++i)
                pts.push_back(wrap_point({(static_cast<double>(i) + (j % 2 ? 0.5 : 0.0)) * a,
                                          static_cast<double>(j) * row, 0.0},
                                         box));
        return pts;
    }
    std::array<std::size_t, 3> n{1, 1, 1};
    for (int ax = 0; ax < box.dim(); ++ax) n[ax] = cells_along(box, ax, a);
    pts.reserve(n[0] * n[1] * n[2]);
    for (std::size_t k = 0; k < n[2]; ++k)
        for (std::size_t j = 0; j < n[1]; ++j)
            for (std::size_t i = 0; i < n[0]; ++i)
                pts.push_back(wrap_point({i * a, j * a, box.dim() == 3 ? k * a : 0.0}, box));
    return pts;
}

}  // namespace

PointPattern generate_lattice(const BoxDomain& box, LatticeKind kind, double spacing) {
    return PointPattern(box, lattice_sites(box, kind, spacing), std::nullopt,
                        "lattice kind=" + to_string(kind) + " box=" + box_text(box) + " spacing=" + num(spacing));
}

PointPattern generate_perturbed_lattice(const BoxDomain& box, double spacing, double jitter, Seed seed) {
    if (!(jitter >= 0.0) || !(jitter < spacing / 2.0))
        throw InvalidArgument("jitter must satisfy 0 <= jitter < spacing/2");
    const LatticeKind kind = box.dim() == 3 ? LatticeKind::cubic : LatticeKind::square;
    std::vector<Vec> pts = lattice_sites(box, kind, spacing);
    if (jitter > 0.0) {
        Rng rng(seed);
        for (auto& p : pts) {
            Vec q = p;
            for (int a = 0; a < box.dim(); ++a) q[a] += rng.uniform(-jitter, jitter);
            p = wrap_point(q, box);
        }
    }
    return PointPattern(box, std::move(pts), std::nullopt,
                        "perturbed_lattice box=" + box_text(box) + " spacing=" + num(spacing) +
                            " jitter=" + num(jitter) + " seed=" + std::to_string(seed.value));
}

double rsa_fraction_cap(int dim) noexcept { return dim == 2 ? 0.5 : 0.3; }

std::size_t rsa_target_count(const BoxDomain& box, double hard_radius, const RsaTarget& target) {
    if (target.count.has_value() == target.packing_fraction.has_value())
        throw InvalidArgument("RSA target needs exactly one of count or packing fraction");
    if (target.count) return *target.count;
    const double phi = *target.packing_fraction;
    if (!(phi > 0.0 && phi < 1.0)) throw InvalidArgument("packing fraction must lie in (0, 1)");
    if (phi > rsa_fraction_cap(box.dim()))
        throw InvalidArgument("packing fraction " + num(phi) + " exceeds the RSA cap " + num(rsa_fraction_cap(box.dim())) +
                              " for dim=" + std::to_string(box.dim()));
    const double particle = unit_ball_volume(box.dim()) * std::pow(hard_radius, box.dim());
    return static_cast<std::size_t>(std::llround(phi * box.volume() / particle));
}

PointPattern generate_rsa_packing(const BoxDomain& box, double hard_radius, const RsaTarget& target,
                                  std::size_t max_attempts, Seed seed) {
    if (!(hard_radius > 0.0) || !std::isfinite(hard_radius)) throw InvalidArgument("hard radius must be positive");
    if (max_attempts == 0) throw InvalidArgument("max_attempts must be >= 1");
    const std::size_t n_target = rsa_target_count(box, hard_radius, target);
    const double diameter = 2.0 * hard_radius;

    Rng rng(seed);
    NeighborGrid grid(box, diameter);
    std::vector<Vec> accepted;
    accepted.reserve(n_target);
    std::size_t rejections = 0;
    while (accepted.size() < n_target) {
        Vec c{0.0, 0.0, 0.0};
        for (int a = 0; a < box.dim(); ++a) c[a] = rng.uniform_below(box.length(a));
        if (grid.any_closer_than(c, diameter)) {
            if (++rejections >= max_attempts) break;
            continue;
        }
        rejections = 0;
        grid.insert(c);
        accepted.push_back(c);
    }

    std::string prov = "rsa_packing box=" + box_text(box) + " hard_radius=" + num(hard_radius) + " target=" +
                       std::to_string(n_target) + " max_attempts=" + std::to_string(max_attempts) +
                       " seed=" + std::to_string(seed.value);
    PointPattern pattern(box, std::move(accepted), hard_radius, std::move(prov));
    if (pattern.size() < n_target) throw TargetUnreachable(pattern.size(), n_target, pattern);
    return pattern;
}

std::string GeneratorSpec::kind_name() const {
    switch (params.index()) {
        case 0: return "poisson";
        case 1: return "lattice";
        case 2: return "perturbed_lattice";
        default: return "rsa_packing";
    }
}

PointPattern generate(const GeneratorSpec& spec, Seed seed) {
    struct Visitor {
        const BoxDomain& box;
        Seed seed;
        PointPattern operator()(const PoissonParams& p) const { return generate_poisson(box, p.intensity, seed); }
        PointPattern operator()(const LatticeParams& p) const { return generate_lattice(box, p.kind, p.spacing); }
        PointPattern operator()(const PerturbedLatticeParams& p) const {
            return generate_perturbed_lattice(box, p.spacing, p.jitter, seed);
        }
        PointPattern operator()(const RsaParams& p) const {
            return generate_rsa_packing(box, p.hard_radius, p.target, p.max_attempts, seed);
        }
    };
    return std::visit(Visitor{spec.box, seed}, spec.params);
}

std::vector<PointPattern> ensemble(const GeneratorSpec& spec, std::size_t n_realizations, Seed base_seed,
                                   unsigned threads) {
    if (n_realizations == 0) throw InvalidArgument("ensemble needs at least one realization");
    std::vector<std::optional<PointPattern>> slots(n_realizations);
    parallel_for(n_realizations, threads, [&](std::size_t i) { slots[i].emplace(generate(spec, derive_seed(base_seed, i))); });
    std::vector<PointPattern> out;
    out.reserve(n_realizations);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace hupa
