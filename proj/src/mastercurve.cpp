#include "invlab/mastercurve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "invlab/common.hpp"

namespace invlab {

double sigma_model(double N, double sigma0, double N0, double a) {
  const double n = N / N0;
  return sigma0 * std::sqrt(a + std::sqrt(n) + n);
}

double q_model(double N, double Q0, double N0, double nu) {
  return Q0 / (1.0 + std::pow(N / N0, -nu));
}

double itilde_model(double n, double I0, double a, double nu) {
  return I0 * std::sqrt(a / n + 1.0 / std::sqrt(n) + 1.0) / (1.0 + std::pow(n, -nu));
}

double asymptotic_invariant(double Q0, double sigma0, double N0) { return Q0 * sigma0 / std::sqrt(N0); }

namespace {

void check_points(std::span<const CurvePoint> points, std::size_t min_points, const char* what) {
  if (points.size() < min_points)
    throw DomainError(std::string(what) + " needs at least " + std::to_string(min_points) + " points, got " +
                      std::to_string(points.size()));
  for (const auto& p : points) {
    if (!(p.N > 0.0) || !(p.value > 0.0)) throw DomainError(std::string(what) + " requires positive N and values");
  }
}

constexpr double kInvPhi = 0.6180339887498949;

/// Golden-section minimisation on [lo, hi]; `trace` receives the best
/// objective seen after each iteration.
template <class F>
double golden_section(F&& f, double lo, double hi, double tol, double best_x, double best_f,
                      std::vector<double>* trace) {
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (hi - lo) > tol; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
    if (f1 < best_f) {
      best_f = f1;
      best_x = x1;
    }
    if (f2 < best_f) {
      best_f = f2;
      best_x = x2;
    }
    if (trace) trace->push_back(best_f);
  }
  return best_x;
}

}  // namespace

std::pair<double, double> sigma_profile(std::span<const CurvePoint> points, double N0, double a) {
  const double n = static_cast<double>(points.size());
  double c = 0.0;
  for (const auto& p : points) {
    const double r = p.N / N0;
    c += std::log(p.value) - 0.5 * std::log(a + std::sqrt(r) + r);
  }
  c /= n;
  double rss = 0.0;
  for (const auto& p : points) {
    const double r = p.N / N0;
    const double e = std::log(p.value) - c - 0.5 * std::log(a + std::sqrt(r) + r);
    rss += e * e;
  }
  return {c, rss};
}

double fit_sigma0_fixed(std::span<const CurvePoint> points, double N0, double a) {
  check_points(points, 1, "sigma0 fit");
  return std::exp(sigma_profile(points, N0, a).first);
}

SigmaFit fit_sigma_curve(std::span<const CurvePoint> points, const SigmaFitOptions& options) {
  check_points(points, 8, "sigma-curve fit");
  if (!(options.grid_step_decades > 0.0 && options.grid_step_decades <= 0.05))
    throw DomainError("grid resolution must be in (0, 0.05] decades");

  double lo_n = std::numeric_limits<double>::infinity(), hi_n = 0.0;
  for (const auto& p : points) {
    lo_n = std::min(lo_n, p.N);
    hi_n = std::max(hi_n, p.N);
  }
  SigmaFit fit;
  fit.a = options.a;
  fit.n_points = points.size();
  fit.weakly_identified = std::log10(hi_n / lo_n) < 1.0;

  const double g_lo = std::log10(lo_n) - options.grid_margin_decades;
  const double g_hi = std::log10(hi_n) + options.grid_margin_decades;
  const auto nodes = static_cast<std::int64_t>(std::ceil((g_hi - g_lo) / options.grid_step_decades)) + 1;
  const double step = (g_hi - g_lo) / static_cast<double>(nodes - 1);
  std::vector<double> rss(static_cast<std::size_t>(nodes));

  auto eval = [&](std::int64_t k) {
    rss[static_cast<std::size_t>(k)] =
        sigma_profile(points, std::pow(10.0, g_lo + step * static_cast<double>(k)), options.a).second;
  };
  if (options.exec == Exec::parallel) {
#pragma omp parallel for schedule(static) num_threads(thread_budget())
    for (std::int64_t k = 0; k < nodes; ++k) eval(k);
  } else {
    for (std::int64_t k = 0; k < nodes; ++k) eval(k);
  }

  const auto best_it = std::min_element(rss.begin(), rss.end());
  const auto best = static_cast<std::int64_t>(best_it - rss.begin());
  const double worst = *std::max_element(rss.begin(), rss.end());
  if (worst - *best_it <= 1e-12 * (1.0 + *best_it))
    throw FitError("N0 unidentifiable: sigma does not depend on N");
  if (best == 0 || best == nodes - 1)
    throw FitError(std::string("N0 unidentifiable: optimum at the ") + (best == 0 ? "lower" : "upper") +
                   " edge of the search range (" + (best == 0 ? "purely diffusive" : "flat") + " data)");

  const double x0 = g_lo + step * static_cast<double>(best);
  auto objective = [&](double log10_n0) { return sigma_profile(points, std::pow(10.0, log10_n0), options.a).second; };
  fit.refinement_trace.push_back(*best_it);
  const double x = golden_section(objective, x0 - step, x0 + step, options.tolerance_decades, x0, *best_it,
                                  &fit.refinement_trace);
  fit.N0 = std::pow(10.0, x);
  const auto [c, r] = sigma_profile(points, fit.N0, options.a);
  fit.sigma0 = std::exp(c);
  fit.rss = r;
  return fit;
}

QFit fit_q_curve(std::span<const CurvePoint> points, double N0, double nu) {
  check_points(points, 1, "trade-size fit");
  if (!(N0 > 0.0)) throw DomainError("trade-size fit requires N0 > 0");
  double c = 0.0;
  for (const auto& p : points) c += std::log(p.value) + std::log1p(std::pow(p.N / N0, -nu));
  c /= static_cast<double>(points.size());
  double rss = 0.0;
  for (const auto& p : points) {
    const double e = std::log(p.value) + std::log1p(std::pow(p.N / N0, -nu)) - c;
    rss += e * e;
  }
  return {std::exp(c), rss, points.size()};
}

double aggregated_q_rss(std::span<const ContractQData> contracts, double nu, Exec exec) {
  std::vector<double> partial(contracts.size());
  const auto n = static_cast<std::int64_t>(contracts.size());
  auto eval = [&](std::int64_t i) {
    const auto& c = contracts[static_cast<std::size_t>(i)];
    partial[static_cast<std::size_t>(i)] = fit_q_curve(c.points, c.N0, nu).rss;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) num_threads(thread_budget())
    for (std::int64_t i = 0; i < n; ++i) eval(i);
  } else {
    for (std::int64_t i = 0; i < n; ++i) eval(i);
  }
  double total = 0.0;
  for (double p : partial) total += p;  // fixed order
  return total;
}

NuFit fit_global_nu(std::span<const ContractQData> contracts, Exec exec) {
  if (contracts.empty()) throw DomainError("nu fit needs at least one contract");
  for (const auto& c : contracts) check_points(c.points, 1, "nu fit");
  constexpr double step = 0.01;
  const auto nodes = static_cast<int>(std::lround((kNuUpper - kNuLower) / step)) + 1;
  double best_nu = kNuLower, best_rss = std::numeric_limits<double>::infinity();
  int best_k = 0;
  for (int k = 0; k < nodes; ++k) {
    const double nu = kNuLower + step * k;
    const double r = aggregated_q_rss(contracts, nu, exec);
    if (r < best_rss) {
      best_rss = r;
      best_nu = nu;
      best_k = k;
    }
  }
  const double lo = std::max(kNuLower, best_nu - step);
  const double hi = std::min(kNuUpper, best_nu + step);
  auto objective = [&](double nu) { return aggregated_q_rss(contracts, nu, exec); };
  NuFit fit;
  fit.nu = golden_section(objective, lo, hi, 1e-7, best_nu, best_rss, nullptr);
  fit.rss = aggregated_q_rss(contracts, fit.nu, exec);
  fit.boundary_hit = best_k == 0 || best_k == nodes - 1;
  for (const auto& c : contracts) fit.Q0.push_back(fit_q_curve(c.points, c.N0, fit.nu).Q0);
  return fit;
}

MasterCurveFit make_master_fit(const SigmaFit& sigma, const QFit& q, double nu) {
  MasterCurveFit f;
  f.sigma0 = sigma.sigma0;
  f.N0 = sigma.N0;
  f.a = sigma.a;
  f.Q0 = q.Q0;
  f.nu = nu;
  f.I0 = asymptotic_invariant(q.Q0, sigma.sigma0, sigma.N0);
  f.rss_sigma = sigma.rss;
  f.rss_q = q.rss;
  f.weakly_identified = sigma.weakly_identified;
  return f;
}

std::string to_string(CurveKind k) {
  switch (k) {
    case CurveKind::sigma: return "sigma";
    case CurveKind::trade_size: return "q";
    case CurveKind::invariant: return "itilde";
  }
  return "?";
}

std::vector<CollapsePoint> collapse(std::span<const CurveSample> samples, const MasterCurveFit& fit, CurveKind kind) {
  if (!(fit.N0 > 0.0) || !(fit.sigma0 > 0.0)) throw DomainError("collapse requires fitted N0 and sigma0 > 0");
  if (kind != CurveKind::sigma && !(fit.Q0 > 0.0)) throw DomainError("collapse requires fitted Q0 > 0");
  std::vector<CollapsePoint> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    if (!(s.N > 0.0)) throw DomainError("collapse requires N > 0");
    double y = 0.0;
    switch (kind) {
      case CurveKind::sigma: y = s.sigma / fit.sigma0; break;
      case CurveKind::trade_size: y = s.Q / fit.Q0; break;
      case CurveKind::invariant: y = s.Q * s.sigma / std::sqrt(s.N) / fit.I0; break;
    }
    out.push_back({s.N / fit.N0, y});
  }
  return out;
}

double max_binned_log_distance(std::span<const CollapsePoint> a, std::span<const CollapsePoint> b,
                               double bin_width_decades, std::size_t min_count) {
  struct Acc {
    double sa = 0, sb = 0;
    std::size_t na = 0, nb = 0;
  };
  std::map<long, Acc> bins;
  auto key = [&](double n) { return static_cast<long>(std::floor(std::log10(n) / bin_width_decades)); };
  for (const auto& p : a) {
    auto& acc = bins[key(p.n)];
    acc.sa += std::log(p.y);
    ++acc.na;
  }
  for (const auto& p : b) {
    auto& acc = bins[key(p.n)];
    acc.sb += std::log(p.y);
    ++acc.nb;
  }
  double worst = 0.0;
  for (const auto& [k, acc] : bins) {
    if (acc.na < min_count || acc.nb < min_count) continue;
    worst = std::max(worst, std::abs(acc.sa / static_cast<double>(acc.na) - acc.sb / static_cast<double>(acc.nb)));
  }
  return worst;
}

}  // namespace invlab
