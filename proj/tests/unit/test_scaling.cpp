#include <gtest/gtest.h>

#include <cmath>

#include "invlab/rng.hpp"
#include "invlab/scaling.hpp"
#include "oracle_values.hpp"

using namespace invlab;

TEST(Regression, ExactLine) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(2.5 * v - 1.0);
  const auto r = linear_regression(x, y);
  EXPECT_NEAR(r.slope, 2.5, 1e-12);
  EXPECT_NEAR(r.intercept, -1.0, 1e-12);
  EXPECT_NEAR(r.r2, 1.0, 1e-12);
  EXPECT_NEAR(r.stderr_slope, 0.0, 1e-12);
  EXPECT_EQ(r.n_points, 5);
}

TEST(Regression, LogLogPowerLaw) {
  std::vector<double> x, y;
  for (int i = 1; i <= 50; ++i) {
    x.push_back(i * 10.0);
    y.push_back(3.0 * std::pow(i * 10.0, 1.5));
  }
  const auto r = loglog_regression(x, y);
  EXPECT_NEAR(r.slope, 1.5, 1e-12);
  EXPECT_NEAR(r.intercept, std::log10(3.0), 1e-12);
}

TEST(Regression, KnownStandardError) {
  // Sxx = 5, Sxy = 3
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, 0, 3, 2};
  const auto r = linear_regression(x, y);
  EXPECT_NEAR(r.slope, 0.6, 1e-12);
  EXPECT_NEAR(r.intercept, 0.6, 1e-12);
  // rss = 3.2, s^2 = 1.6, Sxx = 5
  EXPECT_NEAR(r.stderr_slope, std::sqrt(1.6 / 5.0), 1e-12);
}

TEST(Regression, Degenerate) {
  const std::vector<double> x{1, 1, 1};
  const std::vector<double> y{1, 2, 3};
  EXPECT_THROW(linear_regression(x, y), DomainError);
  const std::vector<double> two{1, 2};
  EXPECT_THROW(linear_regression(two, two), DomainError);
  const std::vector<double> neg{1, -2, 3};
  EXPECT_THROW(loglog_regression(neg, y), DomainError);
}

TEST(Ccdf, StepFunctionWithTies) {
  const std::vector<double> s{3, 1, 2, 2};
  const Ccdf c(s);
  EXPECT_DOUBLE_EQ(c.survival(0.5), 1.0);
  EXPECT_DOUBLE_EQ(c.survival(1.0), 0.75);
  EXPECT_DOUBLE_EQ(c.survival(2.0), 0.25);
  EXPECT_DOUBLE_EQ(c.survival(3.0), 0.0);
  ASSERT_EQ(c.points().size(), 3u);
  EXPECT_DOUBLE_EQ(c.points()[1].x, 2.0);
  EXPECT_DOUBLE_EQ(c.points()[1].p_at_least, 0.75);
  EXPECT_DOUBLE_EQ(c.points()[1].p_above, 0.25);
  EXPECT_THROW(Ccdf(std::span<const double>{}), DomainError);
}

TEST(Ccdf, RescaleByThousandthQuantile) {
  std::vector<double> s;
  for (int i = 1; i <= 2000; ++i) s.push_back(i);
  const Ccdf c(s);
  const auto r = rescale_ccdf(c);
  // two samples lie above 1998
  EXPECT_DOUBLE_EQ(r.x_scale, 1998.0);
  EXPECT_DOUBLE_EQ(r.points.back().x, 2000.0 / 1998.0);
  const std::vector<double> few{1, 2, 3};
  EXPECT_THROW(rescale_ccdf(Ccdf(few)), DomainError);
}

TEST(Hill, SmallSampleByHand) {
  const std::vector<double> s{1, 8, 2, 4};
  const auto f = hill_tail_exponent_k(s, 2);
  EXPECT_NEAR(f.mu, oracle::kHillSmall, 1e-15);
  EXPECT_EQ(f.cutoff_value, 2.0);
  EXPECT_EQ(f.n_samples, 4u);
}

TEST(Hill, Validation) {
  const std::vector<double> s{1, 2, 3, 4};
  EXPECT_THROW(hill_tail_exponent_k(s, 1), DomainError);
  EXPECT_THROW(hill_tail_exponent_k(s, 4), DomainError);
  EXPECT_THROW(hill_tail_exponent(s, 0.0), DomainError);
  EXPECT_THROW(hill_tail_exponent(s, 0.01), DomainError);  // k = 0
  const std::vector<double> flat{5, 5, 5, 5, 1};
  EXPECT_THROW(hill_tail_exponent_k(flat, 2), DomainError);
}

TEST(Hill, RecoversParetoExponent) {
  for (double mu : {1.5, 2.5, 4.0}) {
    Rng rng(100 + static_cast<int>(mu * 10));
    std::vector<double> s(100'000);
    for (auto& v : s) v = rng.pareto(mu);
    const auto f = hill_tail_exponent(s, 0.01);
    EXPECT_EQ(f.k, 1000u);
    EXPECT_NEAR(f.mu / mu, 1.0, 0.1) << "mu=" << mu;
  }
}

TEST(Hill, ScaleInvariant) {
  Rng rng(1);
  std::vector<double> s(5000), t(5000);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = rng.pareto(2.0);
    t[i] = 37.5 * s[i];
  }
  EXPECT_NEAR(hill_tail_exponent(s).mu, hill_tail_exponent(t).mu, 1e-10);
}

TEST(Rolling, CentredWindowTruncatesAtEnds) {
  const std::vector<double> x{1000, 10, 100, 1};
  const std::vector<double> y{1, 1, 1, 1000};
  const auto r = rolling_log_average(x, y, 2);
  ASSERT_EQ(r.size(), 4u);
  // sorted by x: log x = 0,1,2,3 ; log y = 3,0,0,0
  EXPECT_DOUBLE_EQ(r[0].log_x, 0.5);
  EXPECT_DOUBLE_EQ(r[0].log_y, 1.5);
  EXPECT_DOUBLE_EQ(r[1].log_x, 1.0);
  EXPECT_DOUBLE_EQ(r[1].log_y, 1.0);
  EXPECT_DOUBLE_EQ(r[3].log_x, 2.5);
  EXPECT_THROW(rolling_log_average(x, y, 0), DomainError);
}

TEST(CrossSection, MeanAndRms) {
  const std::vector<double> v{1, 3};
  const auto c = cross_sectional_summary(v);
  EXPECT_DOUBLE_EQ(c.mean, 2.0);
  EXPECT_DOUBLE_EQ(c.rms_dispersion, 1.0);
  EXPECT_EQ(cross_sectional_summary(std::span<const double>{}).n, 0u);
}
