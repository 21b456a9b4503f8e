// Scaling-law statistics: log-log regression, empirical CCDFs, Hill tail
// exponents and centred rolling averages.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "invlab/common.hpp"

namespace invlab {

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;   // log10 units when produced by loglog_regression
  double stderr_slope = 0.0;
  double r2 = 0.0;
  int n_points = 0;
};

/// Ordinary least squares of y on x, equal weights. Requires >= 3 points
/// and non-constant x (DomainError otherwise).
RegressionResult linear_regression(std::span<const double> x, std::span<const double> y);

/// OLS on (log10 x, log10 y). All values must be positive.
RegressionResult loglog_regression(std::span<const double> x, std::span<const double> y);

struct CcdfPoint {
  double x = 0.0;
  double p_above = 0.0;     // P(X > x)
  double p_at_least = 0.0;  // P(X >= x), the left limit used for plotting
};

/// Empirical survival function.
class Ccdf {
 public:
  explicit Ccdf(std::span<const double> samples);

  /// P(X > x), right-continuous.
  double survival(double x) const;

  /// One row per distinct sample value, ascending.
  const std::vector<CcdfPoint>& points() const { return points_; }
  std::size_t sample_count() const { return sorted_.size(); }
  const std::vector<double>& sorted_samples() const { return sorted_; }

 private:
  std::vector<double> sorted_;
  std::vector<CcdfPoint> points_;
};

inline constexpr double kRescaleProbability = 1e-3;

struct RescaledCcdf {
  double x_scale = 0.0;  // x_{0.001}: P(X > x_scale) = 10^-3 up to one rank
  std::vector<CcdfPoint> points;
};

/// Divides the x-axis by x_{0.001}. Needs at least 1000 samples.
RescaledCcdf rescale_ccdf(const Ccdf& ccdf);

struct TailFit {
  double mu = 0.0;
  std::size_t k = 0;
  double cutoff_value = 0.0;  // X_k, the (k+1)-th largest sample
  std::size_t n_samples = 0;
};

inline constexpr double kDefaultCutoffProbability = 1e-2;

/// Hill estimator mu = [ (1/k) sum_{i<k} ln(X_i / X_k) ]^{-1} on the samples
/// sorted in descending order, with k = floor(cutoff_prob * n).
TailFit hill_tail_exponent(std::span<const double> samples, double cutoff_prob = kDefaultCutoffProbability);

/// Same with an explicit rank; requires 2 <= k < n.
TailFit hill_tail_exponent_k(std::span<const double> samples, std::size_t k);

struct LogPoint {
  double log_x = 0.0;
  double log_y = 0.0;
};

/// Centred moving mean in (log10 x, log10 y) space after sorting by x. The
/// window spans window/2 points on each side and is truncated at the ends.
std::vector<LogPoint> rolling_log_average(std::span<const double> x, std::span<const double> y,
                                          std::size_t window = 100);

/// Cross-sectional mean and root-mean-square dispersion.
struct CrossSection {
  double mean = 0.0;
  double rms_dispersion = 0.0;
  std::size_t n = 0;
};

CrossSection cross_sectional_summary(std::span<const double> values);

}  // namespace invlab
