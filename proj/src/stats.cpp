#include "sheafdiff/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sheafdiff/diffusion.hpp"

namespace sheafdiff {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_line needs two equally sized samples of length >= 2");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line needs at least two distinct x values");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - (fit.slope * x[k] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

std::optional<ContractionFit> fit_contraction(std::span<const double> period_alpha,
                                              double floor_ratio, std::size_t min_periods) {
  if (period_alpha.empty() || !(period_alpha[0] > 0.0)) return std::nullopt;
  const double floor = floor_ratio * period_alpha[0];
  std::vector<double> r, log_alpha;
  for (std::size_t k = 0; k < period_alpha.size(); ++k) {
    if (!(period_alpha[k] > floor)) break;
    r.push_back(static_cast<double>(k));
    log_alpha.push_back(std::log(period_alpha[k]));
  }
  if (r.size() < std::max<std::size_t>(min_periods, 2)) return std::nullopt;
  const LineFit line = fit_line(r, log_alpha);
  ContractionFit fit;
  fit.a = std::exp(line.intercept);
  fit.rho = std::exp(line.slope);
  fit.r_squared = line.r_squared;
  fit.periods_used = r.size();
  return fit;
}

std::optional<ContractionFit> fit_contraction(const DiffusionTrace& trace) {
  return fit_contraction(trace.period_alpha);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t end = k + 1;
    while (end < order.size() && v[order[end]] == v[order[k]]) ++end;
    const double avg = 0.5 * static_cast<double>(k + end - 1) + 1.0;
    for (std::size_t m = k; m < end; ++m) ranks[order[m]] = avg;
    k = end;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  if (x.size() != y.size() || x.size() < 2) return kNaN;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < rx.size(); ++k) {
    sxy += (rx[k] - mx) * (ry[k] - my);
    sxx += (rx[k] - mx) * (rx[k] - mx);
    syy += (ry[k] - my) * (ry[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return kNaN;
  return sxy / std::sqrt(sxx * syy);
}

namespace {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

double median(std::span<const double> values) {
  return quantile({values.begin(), values.end()}, 0.5);
}

double interquartile_range(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  return quantile(v, 0.75) - quantile(v, 0.25);
}

}  // namespace sheafdiff
