#include "invlab/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "invlab/common.hpp"

namespace invlab {

RegressionResult linear_regression(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("regression inputs differ in length");
  const std::size_t n = x.size();
  if (n < 3) throw DomainError("regression needs at least 3 points, got " + std::to_string(n));
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 1e-300) || sxx <= 1e-24 * std::max(1.0, mx * mx) * static_cast<double>(n))
    throw DomainError("degenerate regression: x values are all equal");
  RegressionResult r;
  r.n_points = static_cast<int>(n);
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  const double rss = std::max(0.0, syy - r.slope * sxy);
  r.r2 = syy > 0.0 ? std::clamp(1.0 - rss / syy, 0.0, 1.0) : 1.0;
  r.stderr_slope = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  return r;
}

RegressionResult loglog_regression(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("regression inputs differ in length");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw DomainError("log-log regression requires positive values (point " + std::to_string(i) + ")");
    lx[i] = std::log10(x[i]);
    ly[i] = std::log10(y[i]);
  }
  return linear_regression(lx, ly);
}

// ---------------------------------------------------------------------------

Ccdf::Ccdf(std::span<const double> samples) : sorted_(samples.begin(), samples.end()) {
  if (sorted_.empty()) throw DomainError("ccdf needs at least one sample");
  std::sort(sorted_.begin(), sorted_.end());
  const double n = static_cast<double>(sorted_.size());
  std::size_t i = 0;
  while (i < sorted_.size()) {
    std::size_t j = i;
    while (j < sorted_.size() && sorted_[j] == sorted_[i]) ++j;
    points_.push_back({sorted_[i], static_cast<double>(sorted_.size() - j) / n,
                       static_cast<double>(sorted_.size() - i) / n});
    i = j;
  }
}

double Ccdf::survival(double x) const {
  const auto above = sorted_.end() - std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(above) / static_cast<double>(sorted_.size());
}

RescaledCcdf rescale_ccdf(const Ccdf& ccdf) {
  const std::size_t n = ccdf.sample_count();
  if (n < 1000) throw DomainError("rescaling by x_0.001 needs at least 1000 samples, got " + std::to_string(n));
  // descending rank j has j samples strictly above it (ties aside)
  const auto j = static_cast<std::size_t>(std::floor(static_cast<double>(n) * kRescaleProbability));
  const double scale = ccdf.sorted_samples()[n - 1 - j];
  if (!(scale > 0.0)) throw DomainError("x_0.001 must be positive to rescale");
  RescaledCcdf out;
  out.x_scale = scale;
  out.points = ccdf.points();
  for (auto& p : out.points) p.x /= scale;
  return out;
}

// ---------------------------------------------------------------------------

TailFit hill_tail_exponent_k(std::span<const double> samples, std::size_t k) {
  const std::size_t n = samples.size();
  if (k < 2) throw DomainError("Hill estimator needs k >= 2, got " + std::to_string(k));
  if (k >= n) throw DomainError("Hill estimator needs k < n");
  std::vector<double> top(samples.begin(), samples.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(top[i] > 0.0)) throw DomainError("Hill estimator requires positive samples (index " + std::to_string(i) + ")");
  }
  std::partial_sort(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k + 1), top.end(), std::greater<>());
  const double xk = top[k];
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += std::log(top[i] / xk);
  if (!(acc > 0.0)) throw DomainError("Hill estimator undefined: top order statistics are all equal");
  return {static_cast<double>(k) / acc, k, xk, n};
}

TailFit hill_tail_exponent(std::span<const double> samples, double cutoff_prob) {
  if (!(cutoff_prob > 0.0 && cutoff_prob < 1.0)) throw DomainError("cutoff probability must be in (0, 1)");
  const auto k = static_cast<std::size_t>(std::floor(cutoff_prob * static_cast<double>(samples.size())));
  return hill_tail_exponent_k(samples, k);
}

// ---------------------------------------------------------------------------

std::vector<LogPoint> rolling_log_average(std::span<const double> x, std::span<const double> y, std::size_t window) {
  if (x.size() != y.size()) throw DomainError("rolling average inputs differ in length");
  if (window == 0) throw DomainError("rolling window must be >= 1");
  std::vector<LogPoint> pts(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("rolling log average requires positive values");
    pts[i] = {std::log10(x[i]), std::log10(y[i])};
  }
  std::stable_sort(pts.begin(), pts.end(), [](const LogPoint& a, const LogPoint& b) { return a.log_x < b.log_x; });

  const std::size_t half = window / 2;
  const std::size_t n = pts.size();
  std::vector<LogPoint> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half + 1);
    double sx = 0.0, sy = 0.0;
    for (std::size_t j = lo; j < hi; ++j) {
      sx += pts[j].log_x;
      sy += pts[j].log_y;
    }
    const double m = static_cast<double>(hi - lo);
    out[i] = {sx / m, sy / m};
  }
  return out;
}

CrossSection cross_sectional_summary(std::span<const double> values) {
  CrossSection cs;
  cs.n = values.size();
  if (values.empty()) return cs;
  cs.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(cs.n);
  double ss = 0.0;
  for (double v : values) ss += (v - cs.mean) * (v - cs.mean);
  cs.rms_dispersion = std::sqrt(ss / static_cast<double>(cs.n));
  return cs;
}

}  // namespace invlab
