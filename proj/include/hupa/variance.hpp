#pragma once
/**
 * variance.hpp - growing-window fluctuation analysis
 *
 * Windows (disks in 2D, balls in 3D) are dropped uniformly at random on the
 * torus; for each radius the spread of the window statistic (point count or
 * dark-pixel fraction) across windows is recorded. The log-log slope of that
 * spread against the radius separates volume-like growth (disorder) from
 * surface-like growth (order, hyperuniformity).
 *
 * One set of window centers is drawn per curve and reused at every radius.
 */

#include <optional>
#include <string>
#include <vector>

#include "hupa/core.hpp"
#include "hupa/field.hpp"

namespace hupa {

enum class WindowMode { number_count, dark_fraction };

enum class OrderLabel { non_hyperuniform, hyperuniform, intermediate, undetermined };

std::string to_string(WindowMode mode);
std::string to_string(OrderLabel label);

/// Window radius violates 0 < R < min(L)/2.
class WindowTooLarge : public InvalidArgument {
  public:
    WindowTooLarge(double radius, double limit);
    double limit() const noexcept { return limit_; }

  private:
    double limit_;
};

/// Least-squares fit preconditions failed.
class FitError : public Error {
  public:
    explicit FitError(const std::string& msg) : Error(msg) {}
};

struct VarianceCurve {
    std::vector<double> radii;
    std::vector<double> mean;
    /// Unbiased sample variance across windows.
    std::vector<double> variance;
    /// Standard error of each variance estimate, from the sample fourth moment.
    std::vector<double> variance_se;
    std::size_t n_windows = 0;
    WindowMode mode = WindowMode::number_count;
    std::string source;
};

struct ScalingFit {
    double alpha = 0.0;
    double log_prefactor = 0.0;
    double r_squared = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    std::size_t n_points = 0;
};

struct OrderClass {
    OrderLabel label = OrderLabel::undetermined;
    double alpha = 0.0;
    int dim = 2;
    WindowMode mode = WindowMode::number_count;
};

/// Points within periodic distance R of center (distance R + 1e-12 still counts).
std::size_t count_in_window(const PointPattern& pattern, const Vec& center, double R);

VarianceCurve number_variance_curve(const PointPattern& pattern, const std::vector<double>& radii,
                                    std::size_t n_windows, Seed seed, unsigned threads = 1);

VarianceCurve fraction_variance_curve(const BinaryField& field, const std::vector<double>& radii,
                                      std::size_t n_windows, Seed seed, unsigned threads = 1);

/// Ordinary least squares of ln(variance) on ln(R) over radii in [r_min, r_max].
/// A constant response gives slope 0 and r^2 = 1.
ScalingFit fit_scaling(const VarianceCurve& curve, double r_min, double r_max);
ScalingFit fit_scaling(const VarianceCurve& curve);

/// number_count: alpha >= dim - 0.25 -> non_hyperuniform, alpha <= dim - 0.75 -> hyperuniform.
/// dark_fraction: alpha >= -dim - 0.25 -> non_hyperuniform, alpha <= -dim - 0.75 -> hyperuniform.
/// Between the thresholds -> intermediate; r^2 < 0.9 -> undetermined.
OrderClass classify(const ScalingFit& fit, int dim, WindowMode mode);

inline constexpr std::size_t kDefaultRadii = 16;
inline constexpr std::size_t kDefaultWindows2D = 10000;
inline constexpr std::size_t kDefaultWindows3D = 4000;

/// Log-spaced radii from 2 x (mean nearest-neighbour distance) to min(L)/4.
std::vector<double> default_radii(const PointPattern& pattern, std::size_t count = kDefaultRadii);
/// Log-spaced radii from 8 pixel edges to min(L)/4.
std::vector<double> default_radii(const BinaryField& field, std::size_t count = kDefaultRadii);
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

struct AnalysisOptions {
    std::optional<std::vector<double>> radii;
    std::optional<std::size_t> n_windows;
    Seed seed{};
    unsigned threads = 1;
};

struct Analysis {
    VarianceCurve curve;
    ScalingFit fit;
    OrderClass order;
};

Analysis analyze(const PointPattern& pattern, const AnalysisOptions& options);
Analysis analyze(const BinaryField& field, const AnalysisOptions& options);

/// CSV with header `R,mean,variance,n_windows,mode`.
std::string format_curve_csv(const VarianceCurve& curve);

}  // namespace hupa
