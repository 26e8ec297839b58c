#include "hupa/variance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "hupa/neighbor_grid.hpp"
#include "hupa/parallel.hpp"
#include "hupa/random.hpp"

namespace hupa {

namespace {

constexpr double kBoundaryTol = 1e-12;

__extension__ typedef __int128 Int128;

std::string num(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void check_radius(double R, const BoxDomain& box) {
    const double limit = box.min_length() / 2.0;
    if (!(R > 0.0) || !(R < limit)) throw WindowTooLarge(R, limit);
}

void check_radii(const std::vector<double>& radii, const BoxDomain& box) {
    if (radii.empty()) throw InvalidArgument("at least one radius is required");
    for (std::size_t k = 0; k < radii.size(); ++k) {
        check_radius(radii[k], box);
        if (k > 0 && !(radii[k] > radii[k - 1])) throw InvalidArgument("radii must be strictly increasing");
    }
}

std::vector<Vec> draw_centers(const BoxDomain& box, std::size_t n, Seed seed) {
    Rng rng(seed);
    std::vector<Vec> centers(n, Vec{0.0, 0.0, 0.0});
    for (auto& c : centers)
        for (int a = 0; a < box.dim(); ++a) c[a] = rng.uniform_below(box.length(a));
    return centers;
}

/// Standard error of the unbiased variance from the sample fourth central moment.
double variance_standard_error(double m4, double s2, std::size_t n) {
    const double nn = static_cast<double>(n);
    if (n < 4) return 0.0;
    const double v = (m4 - s2 * s2 * (nn - 3.0) / (nn - 1.0)) / nn;
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

}  // namespace

std::string to_string(WindowMode mode) { return mode == WindowMode::number_count ? "number_count" : "dark_fraction"; }

std::string to_string(OrderLabel label) {
    switch (label) {
        case OrderLabel::non_hyperuniform: return "non_hyperuniform";
        case OrderLabel::hyperuniform: return "hyperuniform";
        case OrderLabel::intermediate: return "intermediate";
        case OrderLabel::undetermined: return "undetermined";
    }
    return "undetermined";
}

WindowTooLarge::WindowTooLarge(double radius, double limit)
    : InvalidArgument("window radius " + num(radius) + " must satisfy 0 < R < " + num(limit) +
                      " (half the smallest box length); window too large"),
      limit_(limit) {}

std::size_t count_in_window(const PointPattern& pattern, const Vec& center, double R) {
    check_radius(R, pattern.box());
    const double r2 = (R + kBoundaryTol) * (R + kBoundaryTol);
    std::size_t n = 0;
    for (const Vec& p : pattern.points())
        if (periodic_distance_sq(center, p, pattern.box()) <= r2) ++n;
    return n;
}

VarianceCurve number_variance_curve(const PointPattern& pattern, const std::vector<double>& radii,
                                    std::size_t n_windows, Seed seed, unsigned threads) {
    check_radii(radii, pattern.box());
    if (n_windows < 2) throw InvalidArgument("n_windows must be >= 2");
    if (pattern.empty()) throw DegenerateInput("number variance of an empty pattern is undefined");

    const std::size_t nr = radii.size();
    std::vector<double> thresholds(nr);
    for (std::size_t k = 0; k < nr; ++k) thresholds[k] = (radii[k] + kBoundaryTol) * (radii[k] + kBoundaryTol);
    const double r_max = radii.back() + kBoundaryTol;

    const std::vector<Vec> centers = draw_centers(pattern.box(), n_windows, seed);
    const NeighborGrid grid(pattern, std::max(r_max / 4.0, 1e-9 * pattern.box().min_length()));
    std::vector<std::int64_t> counts(n_windows * nr, 0);

    parallel_for(n_windows, resolve_threads(threads), [&](std::size_t w) {
        std::int64_t* row = &counts[w * nr];
        grid.for_each_within(centers[w], r_max, [&](std::size_t, double d2) {
            const auto it = std::lower_bound(thresholds.begin(), thresholds.end(), d2);
            if (it != thresholds.end()) ++row[it - thresholds.begin()];
        });
        for (std::size_t k = 1; k < nr; ++k) row[k] += row[k - 1];
    });

    VarianceCurve curve;
    curve.radii = radii;
    curve.n_windows = n_windows;
    curve.mode = WindowMode::number_count;
    curve.source = pattern.provenance();
    const auto n = static_cast<Int128>(n_windows);
    for (std::size_t k = 0; k < nr; ++k) {
        Int128 s1 = 0, s2 = 0;
        for (std::size_t w = 0; w < n_windows; ++w) {
            const Int128 c = counts[w * nr + k];
            s1 += c;
            s2 += c * c;
        }
        const long double mean = static_cast<long double>(s1) / static_cast<long double>(n);
        const long double var =
            static_cast<long double>(n * s2 - s1 * s1) / (static_cast<long double>(n) * static_cast<long double>(n - 1));
        double m4 = 0.0;
        for (std::size_t w = 0; w < n_windows; ++w) {
            const double d = static_cast<double>(counts[w * nr + k]) - static_cast<double>(mean);
            m4 += d * d * d * d;
        }
        m4 /= static_cast<double>(n_windows);
        curve.mean.push_back(static_cast<double>(mean));
        curve.variance.push_back(std::max(0.0, static_cast<double>(var)));
        curve.variance_se.push_back(variance_standard_error(m4, curve.variance.back(), n_windows));
    }
    return curve;
}

VarianceCurve fraction_variance_curve(const BinaryField& field, const std::vector<double>& radii,
                                      std::size_t n_windows, Seed seed, unsigned threads) {
    check_radii(radii, field.box());
    if (n_windows < 2) throw InvalidArgument("n_windows must be >= 2");
    const std::size_t nr = radii.size();
    const std::vector<Vec> centers = draw_centers(field.box(), n_windows, seed);
    std::vector<double> fractions(n_windows * nr);

    parallel_for(n_windows, resolve_threads(threads), [&](std::size_t w) {
        for (std::size_t k = 0; k < nr; ++k)
            fractions[w * nr + k] = field_dark_fraction_in_window(field, centers[w], radii[k]);
    });

    VarianceCurve curve;
    curve.radii = radii;
    curve.n_windows = n_windows;
    curve.mode = WindowMode::dark_fraction;
    curve.source = field.provenance();
    const double n = static_cast<double>(n_windows);
    for (std::size_t k = 0; k < nr; ++k) {
        double sum = 0.0;
        for (std::size_t w = 0; w < n_windows; ++w) sum += fractions[w * nr + k];
        const double mean = sum / n;
        double ss = 0.0, m4 = 0.0;
        for (std::size_t w = 0; w < n_windows; ++w) {
            const double d = fractions[w * nr + k] - mean;
            ss += d * d;
            m4 += d * d * d * d;
        }
        const double var = std::min(0.25, ss / (n - 1.0));
        curve.mean.push_back(std::clamp(mean, 0.0, 1.0));
        curve.variance.push_back(var);
        curve.variance_se.push_back(variance_standard_error(m4 / n, var, n_windows));
    }
    return curve;
}

ScalingFit fit_scaling(const VarianceCurve& curve, double r_min, double r_max) {
    if (!(r_min <= r_max)) throw FitError("fit range must satisfy R_min <= R_max");
    std::vector<double> xs, ys;
    std::size_t zeros = 0, in_range = 0;
    double first_zero = 0.0;
    for (std::size_t k = 0; k < curve.radii.size(); ++k) {
        const double R = curve.radii[k];
        if (R < r_min * (1.0 - 1e-12) || R > r_max * (1.0 + 1e-12)) continue;
        ++in_range;
        if (!(curve.variance[k] > 0.0)) {
            if (zeros++ == 0) first_zero = R;
            continue;
        }
        xs.push_back(std::log(R));
        ys.push_back(std::log(curve.variance[k]));
    }
    if (in_range < 3)
        throw FitError("too few points: " + std::to_string(in_range) + " radii in the fit range, need at least 3");
    if (zeros == in_range)
        throw FitError(std::string(curve.mode == WindowMode::dark_fraction ? "degenerate field" : "degenerate pattern") +
                       ": zero variance at all radii");
    if (zeros > 0)
        throw FitError("cannot fit: zero variance at R=" + num(first_zero) + "; choose a narrower fit range");

    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
        syy += (ys[k] - my) * (ys[k] - my);
    }
    ScalingFit fit;
    fit.alpha = sxy / sxx;
    fit.log_prefactor = my - fit.alpha * mx;
    if (syy <= 0.0) {
        fit.alpha = 0.0;
        fit.log_prefactor = my;
        fit.r_squared = 1.0;
    } else {
        double ss_res = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double r = ys[k] - (fit.log_prefactor + fit.alpha * xs[k]);
            ss_res += r * r;
        }
        fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    }
    fit.r_min = r_min;
    fit.r_max = r_max;
    fit.n_points = xs.size();
    return fit;
}

ScalingFit fit_scaling(const VarianceCurve& curve) {
    if (curve.radii.empty()) throw FitError("too few points: empty curve");
    return fit_scaling(curve, curve.radii.front(), curve.radii.back());
}

OrderClass classify(const ScalingFit& fit, int dim, WindowMode mode) {
    if (dim != 2 && dim != 3) throw InvalidArgument("dim must be 2 or 3");
    if (!std::isfinite(fit.alpha)) throw InvalidArgument("fit exponent must be finite");
    OrderClass out;
    out.alpha = fit.alpha;
    out.dim = dim;
    out.mode = mode;
    // Surface-like growth sits one power below volume-like growth; the
    // thresholds leave a +-0.25 dead band around each anchor exponent.
    const double volume_like = mode == WindowMode::number_count ? dim : -dim;
    const double non_hu = volume_like - 0.25;
    const double hu = volume_like - 0.75;
    if (fit.r_squared < 0.9)
        out.label = OrderLabel::undetermined;
    else if (fit.alpha >= non_hu)
        out.label = OrderLabel::non_hyperuniform;
    else if (fit.alpha <= hu)
        out.label = OrderLabel::hyperuniform;
    else
        out.label = OrderLabel::intermediate;
    return out;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (count < 2 || !(lo > 0.0) || !(hi > lo)) throw InvalidArgument("log-spaced sweep needs 0 < lo < hi and count >= 2");
    std::vector<double> r(count);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t k = 0; k < count; ++k)
        r[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
    r.front() = lo;
    r.back() = hi;
    return r;
}

std::vector<double> default_radii(const PointPattern& pattern, std::size_t count) {
    if (pattern.size() < 2) throw DegenerateInput("default radius sweep needs at least 2 points; pass radii explicitly");
    const double lo = 2.0 * mean_nearest_neighbor_distance(pattern);
    const double hi = 0.25 * pattern.box().min_length();
    if (!(lo < hi))
        throw DegenerateInput("pattern too sparse for the default radius sweep (2 x NN spacing " + num(lo) +
                              " >= min(L)/4 " + num(hi) + "); pass radii explicitly");
    return log_spaced(lo, hi, count);
}

std::vector<double> default_radii(const BinaryField& field, std::size_t count) {
    const double lo = 8.0 * field.pixel_size();
    const double hi = 0.25 * field.box().min_length();
    if (!(lo < hi)) throw DegenerateInput("field too small for the default radius sweep; pass radii explicitly");
    return log_spaced(lo, hi, count);
}

Analysis analyze(const PointPattern& pattern, const AnalysisOptions& options) {
    const auto radii = options.radii ? *options.radii : default_radii(pattern);
    const std::size_t windows =
        options.n_windows ? *options.n_windows : (pattern.dim() == 2 ? kDefaultWindows2D : kDefaultWindows3D);
    Analysis a;
    a.curve = number_variance_curve(pattern, radii, windows, options.seed, options.threads);
    a.fit = fit_scaling(a.curve);
    a.order = classify(a.fit, pattern.dim(), WindowMode::number_count);
    return a;
}

Analysis analyze(const BinaryField& field, const AnalysisOptions& options) {
    const auto radii = options.radii ? *options.radii : default_radii(field);
    const std::size_t windows = options.n_windows ? *options.n_windows : kDefaultWindows2D;
    Analysis a;
    a.curve = fraction_variance_curve(field, radii, windows, options.seed, options.threads);
    a.fit = fit_scaling(a.curve);
    a.order = classify(a.fit, 2, WindowMode::dark_fraction);
    return a;
}

std::string format_curve_csv(const VarianceCurve& curve) {
    std::string out = "R,mean,variance,n_windows,mode\n";
    const std::string mode = to_string(curve.mode);
    for (std::size_t k = 0; k < curve.radii.size(); ++k) {
        out += format_decimal(curve.radii[k]) + "," + format_decimal(curve.mean[k]) + "," +
               format_decimal(curve.variance[k]) + "," + std::to_string(curve.n_windows) + "," + mode + "\n";
    }
    return out;
}

}  // namespace hupa
