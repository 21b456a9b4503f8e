#include "invlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace invlab {

std::string to_string(VolMethod m) {
  return m == VolMethod::rogers_satchell ? "rs" : "sq10s";
}

VolMethod parse_vol_method(std::string_view text) {
  text = trim(text);
  if (text == "sq10s" || text == "squared_returns_10s" || text == "sq") return VolMethod::squared_returns_10s;
  if (text == "rs" || text == "rogers_satchell") return VolMethod::rogers_satchell;
  throw ConfigError("unknown volatility estimator '" + std::string(text) + "' (expected sq10s|rs)");
}

VolMethod default_vol_method(Duration tau) {
  return tau <= std::chrono::minutes(10) ? VolMethod::squared_returns_10s : VolMethod::rogers_satchell;
}

double log_mean(std::span<const double> values) {
  if (values.empty()) throw DomainError("log_mean of an empty sequence");
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0))
      throw DomainError("log_mean requires positive values; index " + std::to_string(i) + " is " +
                        format_double(values[i]));
    acc += std::log(values[i]);
  }
  return std::exp(acc / static_cast<double>(values.size()));
}

std::optional<VolatilityEstimate> vol_squared_returns(std::span<const double> returns_10s) {
  if (returns_10s.empty()) return std::nullopt;
  double ss = 0.0;
  for (double r : returns_10s) ss += r * r;
  return VolatilityEstimate{std::sqrt(ss), VolMethod::squared_returns_10s};
}

std::optional<VolatilityEstimate> vol_squared_returns(const Bin& bin) {
  return vol_squared_returns(std::span<const double>(bin.returns_10s));
}

double rogers_satchell_variance(double open, double high, double low, double close) {
  if (!(low > 0.0) || !(low <= open) || !(low <= close) || !(open <= high) || !(close <= high))
    throw DomainError("Rogers-Satchell requires 0 < low <= open, close <= high");
  const double ho = std::log(high / open);
  const double hc = std::log(high / close);
  const double lo = std::log(low / open);
  const double lc = std::log(low / close);
  // both products are of same-sign factors
  return ho * hc + lo * lc;
}

VolatilityEstimate vol_rogers_satchell(double open, double high, double low, double close) {
  return {std::sqrt(rogers_satchell_variance(open, high, low, close)), VolMethod::rogers_satchell};
}

std::optional<VolatilityEstimate> estimate_volatility(const Bin& bin, VolMethod method) {
  if (bin.N <= 0) return std::nullopt;
  if (method == VolMethod::squared_returns_10s) return vol_squared_returns(bin);
  return vol_rogers_satchell(bin.open, bin.high, bin.low, bin.close);
}

namespace {

struct LogAccumulator {
  double n = 0, v = 0, q = 0, p = 0, s = 0, w = 0;
  int days = 0;

  void add(const Bin& b, double sigma) {
    const double ln_n = std::log(static_cast<double>(b.N));
    const double ln_v = std::log(static_cast<double>(b.V));
    const double ln_p = std::log(b.P);
    const double ln_s = std::log(sigma);
    n += ln_n;
    v += ln_v;
    q += std::log(b.Q);
    p += ln_p;
    s += ln_s;
    w += ln_p + ln_v + ln_s;
    ++days;
  }

  BinOfDayStats finish(int bin_index) const {
    const double d = static_cast<double>(days);
    return {bin_index, n / d, v / d, q / d, p / d, s / d, w / d, days};
  }
};

std::optional<double> qualifying_sigma(const Bin& b, VolMethod method) {
  if (b.N <= 0 || b.V <= 0) return std::nullopt;
  const auto vol = estimate_volatility(b, method);
  if (!vol || !(vol->sigma > 0.0)) return std::nullopt;
  return vol->sigma;
}

}  // namespace

std::optional<BinOfDayStats> bin_of_day_average(std::span<const Bin> bins, int bin_index, VolMethod method) {
  LogAccumulator acc;
  for (const auto& b : bins) {
    if (b.bin_index != bin_index) continue;
    if (const auto s = qualifying_sigma(b, method)) acc.add(b, *s);
  }
  if (acc.days == 0) return std::nullopt;
  return acc.finish(bin_index);
}

std::vector<BinOfDayStats> bin_of_day_table(std::span<const Bin> bins, VolMethod method, Exec exec) {
  // Group bin positions by intraday index, preserving input (day) order.
  std::map<int, std::vector<std::size_t>> by_index;
  for (std::size_t i = 0; i < bins.size(); ++i) by_index[bins[i].bin_index].push_back(i);
  std::vector<int> indices;
  std::vector<const std::vector<std::size_t>*> members;
  for (const auto& [idx, list] : by_index) {
    indices.push_back(idx);
    members.push_back(&list);
  }

  std::vector<std::optional<BinOfDayStats>> slots(indices.size());
  auto reduce = [&](std::size_t k) {
    LogAccumulator acc;
    for (std::size_t i : *members[k]) {
      if (const auto s = qualifying_sigma(bins[i], method)) acc.add(bins[i], *s);
    }
    if (acc.days > 0) slots[k] = acc.finish(indices[k]);
  };

  const auto n = static_cast<std::int64_t>(indices.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) num_threads(thread_budget())
    for (std::int64_t k = 0; k < n; ++k) reduce(static_cast<std::size_t>(k));
  } else {
    for (std::int64_t k = 0; k < n; ++k) reduce(static_cast<std::size_t>(k));
  }

  std::vector<BinOfDayStats> out;
  out.reserve(slots.size());
  for (auto& s : slots) {
    if (s) out.push_back(*s);
  }
  return out;
}

InvariantSample invariant_I(double P, double V, double sigma, std::int64_t N) {
  if (N < 1) throw DomainError("invariant I is undefined for N = 0");
  if (!(V > 0.0)) throw DomainError("invariant I requires V > 0");
  if (!(P > 0.0)) throw DomainError("invariant I requires P > 0");
  if (!(sigma >= 0.0)) throw DomainError("invariant I requires sigma >= 0");
  InvariantSample s;
  s.W = P * V * sigma;
  s.N = N;
  s.I = s.W * std::pow(static_cast<double>(N), -1.5);
  return s;
}

double invariant_I_from_trade_size(double P, double sigma, double Q, double V) {
  return P * sigma * std::pow(Q, 1.5) / std::sqrt(V);
}

std::optional<double> spread_cost(std::span<const double> sq_samples) {
  if (sq_samples.empty()) return std::nullopt;
  return log_mean(sq_samples);
}

std::optional<double> spread_cost_from_bins(std::span<const Bin> bins) {
  double weighted = 0.0;
  double weight = 0.0;
  for (const auto& b : bins) {
    if (b.N <= 0 || !b.SQ_mean || !(*b.SQ_mean > 0.0)) continue;
    weighted += static_cast<double>(b.N) * std::log(*b.SQ_mean);
    weight += static_cast<double>(b.N);
  }
  if (weight == 0.0) return std::nullopt;
  return std::exp(weighted / weight);
}

double rescaled_invariant(double I, double C) {
  if (!(C > 0.0)) throw DomainError("rescaled invariant requires spread cost C > 0");
  return I / C;
}

InvariantSample with_spread_cost(InvariantSample sample, double C) {
  sample.I_rescaled = rescaled_invariant(sample.I, C);
  sample.C = C;
  return sample;
}

}  // namespace invlab
