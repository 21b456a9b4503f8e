// Samples drawn from the crossover models with multiplicative lognormal
// noise, shared by the unit and acceptance tests.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "invlab/mastercurve.hpp"
#include "invlab/rng.hpp"

namespace invlab::testing {

struct CurveTruth {
  double sigma0 = 1.0;
  double N0 = 100.0;
  double Q0 = 10.0;
  double nu = kDefaultNu;
  double a = kDefaultNoiseLevel;
};

/// `count` log-uniform N values over [n_lo, n_hi]; sigma and Q each carry
/// independent noise exp(noise_sd * z).
inline std::vector<CurveSample> sample_curves(const CurveTruth& t, double n_lo, double n_hi, int count,
                                              double noise_sd, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CurveSample> out;
  out.reserve(static_cast<std::size_t>(count));
  const double l0 = std::log(n_lo), l1 = std::log(n_hi);
  for (int i = 0; i < count; ++i) {
    const double N = std::exp(l0 + (l1 - l0) * rng.uniform());
    const double s = sigma_model(N, t.sigma0, t.N0, t.a) * std::exp(noise_sd * rng.normal());
    const double q = q_model(N, t.Q0, t.N0, t.nu) * std::exp(noise_sd * rng.normal());
    out.push_back({N, s, q});
  }
  return out;
}

inline std::vector<CurvePoint> sigma_points(const std::vector<CurveSample>& s) {
  std::vector<CurvePoint> out;
  for (const auto& x : s) out.push_back({x.N, x.sigma});
  return out;
}

inline std::vector<CurvePoint> q_points(const std::vector<CurveSample>& s) {
  std::vector<CurvePoint> out;
  for (const auto& x : s) out.push_back({x.N, x.Q});
  return out;
}

struct OhlcBar {
  double open = 0.0, high = 0.0, low = 0.0, close = 0.0;
};

/// One bar of geometric Brownian motion with log-variance vol^2 and total log
/// drift `drift`. The path is advanced on `steps` grid points and the extreme
/// of each step is drawn from the Brownian-bridge law, so the bar's high and
/// low follow the continuous-time distribution.
inline OhlcBar brownian_bar(Rng& rng, double open, double vol, double drift, int steps) {
  const double var = vol * vol / steps;
  const double sd = std::sqrt(var);
  const double mu = drift / steps;
  double x = 0.0, hi = 0.0, lo = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double next = x + mu + sd * rng.normal();
    const double d = next - x;
    const double up = x + 0.5 * (d + std::sqrt(d * d - 2.0 * var * std::log(rng.uniform_open_low())));
    const double down = x + 0.5 * (d - std::sqrt(d * d - 2.0 * var * std::log(rng.uniform_open_low())));
    hi = std::max(hi, up);
    lo = std::min(lo, down);
    x = next;
  }
  return {open, open * std::exp(hi), open * std::exp(lo), open * std::exp(x)};
}

}  // namespace invlab::testing
