#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace sheafdiff {

struct DiffusionTrace;

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y ~ slope * x + intercept. Needs >= 2 points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Geometric envelope alpha_r ~ a * rho^r fitted to per-period samples.
struct ContractionFit {
  double a = 0.0;
  double rho = 0.0;
  double r_squared = 0.0;
  std::size_t periods_used = 0;
};

/// Ratio of alpha(0) below which samples count as numerical floor.
inline constexpr double kFloorRatio = 1e3 * 2.220446049250313e-16;

/// Least squares of log alpha_r against r over the leading segment with
/// alpha_r > floor_ratio * alpha_0. Empty when fewer than min_periods
/// samples qualify.
std::optional<ContractionFit> fit_contraction(std::span<const double> period_alpha,
                                              double floor_ratio = kFloorRatio,
                                              std::size_t min_periods = 5);
std::optional<ContractionFit> fit_contraction(const DiffusionTrace& trace);

/// Spearman rank correlation with average ranks for ties. NaN if either
/// sample is constant or sizes differ / are below 2.
double spearman(std::span<const double> x, std::span<const double> y);

double median(std::span<const double> values);
/// Interquartile range with linear interpolation between order statistics.
double interquartile_range(std::span<const double> values);

}  // namespace sheafdiff
