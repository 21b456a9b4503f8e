#include "invlab/analysis.hpp"

#include <cmath>
#include <numbers>

namespace invlab {

namespace {

constexpr double kLog10E = std::numbers::log10e;

ScalingExponents regress(const std::vector<double>& log_n, const std::vector<double>& log_w,
                         const std::vector<double>& log_s, const std::vector<double>& log_v) {
  ScalingExponents e;
  double lo = log_n.front(), hi = log_n.front();
  for (double x : log_n) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  e.log10_N_span = hi - lo;
  if (e.log10_N_span < kMinLog10NSpan)
    throw DomainError("insufficient N-span: log10 N covers " + format_double(e.log10_N_span) + " decades, need " +
                      format_double(kMinLog10NSpan));
  e.alpha = linear_regression(log_n, log_w);
  e.beta = linear_regression(log_n, log_s);
  e.gamma = linear_regression(log_n, log_v);
  return e;
}

std::optional<double> log_mean_of(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  return log_mean(values);
}

}  // namespace

ScalingExponents exponents_from_table(std::span<const BinOfDayStats> table) {
  if (table.size() < 3)
    throw DomainError("too few bin-of-day positions for regression: " + std::to_string(table.size()) + " (need >= 3)");
  std::vector<double> n, w, s, v;
  for (const auto& t : table) {
    n.push_back(t.mean_log_N * kLog10E);
    w.push_back(t.mean_log_W * kLog10E);
    s.push_back(t.mean_log_sigma * kLog10E);
    v.push_back(t.mean_log_V * kLog10E);
  }
  return regress(n, w, s, v);
}

ScalingExponents exponents_from_samples(std::span<const BinSample> samples) {
  if (samples.size() < 3)
    throw DomainError("too few bins for regression: " + std::to_string(samples.size()) + " (need >= 3)");
  std::vector<double> n, w, s, v;
  for (const auto& b : samples) {
    n.push_back(std::log10(b.N));
    w.push_back(std::log10(b.W));
    s.push_back(std::log10(b.sigma));
    v.push_back(std::log10(b.V));
  }
  return regress(n, w, s, v);
}

std::string to_string(RegressionMode m) { return m == RegressionMode::bin_of_day ? "bin_of_day" : "per_bin"; }

std::vector<BinSample> bin_samples(std::span<const Bin> bins, VolMethod method) {
  std::vector<BinSample> out;
  for (const auto& b : bins) {
    if (b.N <= 0 || b.V <= 0) continue;
    const auto vol = estimate_volatility(b, method);
    if (!vol || !(vol->sigma > 0.0)) continue;
    const auto inv = invariant_I(b.P, static_cast<double>(b.V), vol->sigma, b.N);
    out.push_back({b.day, b.bin_index, static_cast<double>(b.N), static_cast<double>(b.V), b.P, b.Q, vol->sigma,
                   inv.W, inv.I});
  }
  return out;
}

SymbolAnalysis analyze_bins(const BinsFile& file, const AnalysisOptions& options) {
  SymbolAnalysis a;
  a.meta = file.meta;
  a.method = options.method.value_or(default_vol_method(file.meta.tau));
  a.mode = file.meta.asset_class == AssetClass::future ? RegressionMode::bin_of_day : RegressionMode::per_bin;
  a.bins_total = file.bins.size();

  std::vector<double> n, v, q, p, s, vb, va;
  for (const auto& b : file.bins) {
    if (b.N <= 0) continue;
    n.push_back(static_cast<double>(b.N));
    v.push_back(static_cast<double>(b.V));
    q.push_back(b.Q);
    p.push_back(b.P);
    if (b.S_mean && *b.S_mean > 0.0) s.push_back(*b.S_mean);
    if (b.Vbid_mean && *b.Vbid_mean > 0.0) vb.push_back(*b.Vbid_mean);
    if (b.Vask_mean && *b.Vask_mean > 0.0) va.push_back(*b.Vask_mean);
  }
  a.bins_traded = n.size();
  if (a.bins_traded < 3)
    throw DomainError("too few bins with trades: " + std::to_string(a.bins_traded) + " (need >= 3)");
  a.N = log_mean(n);
  a.V = log_mean(v);
  a.Q = log_mean(q);
  a.P = log_mean(p);
  a.spread = log_mean_of(s);
  if (a.spread) a.spread_ticks = *a.spread / file.meta.tick_size;
  a.Vbid = log_mean_of(vb);
  a.Vask = log_mean_of(va);
  a.C = spread_cost_from_bins(file.bins);

  a.samples = bin_samples(file.bins, a.method);
  a.bins_used = a.samples.size();
  if (a.bins_used < 3)
    throw DomainError("too few bins with trades and non-zero volatility: " + std::to_string(a.bins_used) +
                      " (need >= 3)");
  std::vector<double> sig, ivals;
  sig.reserve(a.samples.size());
  ivals.reserve(a.samples.size());
  for (const auto& smp : a.samples) {
    sig.push_back(smp.sigma);
    ivals.push_back(smp.I);
  }
  a.sigma = log_mean(sig);
  a.sigma_ticks = a.sigma * a.P / file.meta.tick_size;
  a.I = log_mean(ivals);
  if (a.C) a.I_rescaled = rescaled_invariant(a.I, *a.C);
  else a.warnings.push_back("no quotes: spread cost and rescaled invariant unavailable");

  a.table = bin_of_day_table(file.bins, a.method, options.exec);
  a.exponents = a.mode == RegressionMode::bin_of_day ? exponents_from_table(a.table) : exponents_from_samples(a.samples);

  const auto k = static_cast<std::size_t>(std::floor(options.cutoff_prob * static_cast<double>(ivals.size())));
  if (k >= 2 && k < ivals.size()) {
    try {
      a.tail = hill_tail_exponent(ivals, options.cutoff_prob);
    } catch (const DomainError& e) {
      a.warnings.push_back(std::string("tail exponent unavailable: ") + e.what());
    }
  } else {
    a.warnings.push_back("tail exponent unavailable: " + std::to_string(ivals.size()) +
                         " samples give cutoff rank " + std::to_string(k) + " (need >= 2)");
  }
  return a;
}

}  // namespace invlab
