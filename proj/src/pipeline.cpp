#include "invlab/pipeline.hpp"

#include <cmath>

namespace invlab {

std::vector<TauBins> simulate_and_bin(const SimConfig& config, std::span<const Duration> taus, Exec exec) {
  config.validate();
  if (taus.empty()) throw DomainError("simulate_and_bin needs at least one bin width");
  const auto contract = contract_for(config);
  std::vector<std::vector<BinLayout>> layouts;
  for (auto tau : taus) layouts.push_back(intraday_layout(contract, tau));

  const auto n_days = static_cast<std::size_t>(config.days);
  // per_day[d][k]: bins of day d at width k
  std::vector<std::vector<std::vector<Bin>>> per_day(n_days);
  auto run_day = [&](std::size_t d) {
    auto sim = simulate_day(config, static_cast<int>(d));
    const auto trades = filter_session(group_simultaneous(sim.trades), contract);
    auto& slot = per_day[d];
    slot.reserve(layouts.size());
    for (const auto& layout : layouts) slot.push_back(bin_day(sim.day, trades, sim.quotes, std::nullopt, layout));
  };
  const auto n = static_cast<std::int64_t>(n_days);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic) num_threads(thread_budget())
    for (std::int64_t d = 0; d < n; ++d) run_day(static_cast<std::size_t>(d));
  } else {
    for (std::int64_t d = 0; d < n; ++d) run_day(static_cast<std::size_t>(d));
  }

  std::vector<TauBins> out(taus.size());
  for (std::size_t k = 0; k < taus.size(); ++k) {
    out[k].tau = taus[k];
    out[k].bins.reserve(n_days * layouts[k].size());
    for (auto& day : per_day) std::move(day[k].begin(), day[k].end(), std::back_inserter(out[k].bins));
  }
  return out;
}

ThreeHalvesOracle oracle_three_halves(const SimConfig& config, Duration tau, std::optional<VolMethod> method,
                                      Exec exec) {
  const Duration taus[] = {tau};
  auto binned = simulate_and_bin(config, taus, exec);
  ThreeHalvesOracle o;
  o.method = method.value_or(default_vol_method(tau));
  o.regime = classify_tick_regime(config, tau);
  o.table = bin_of_day_table(binned.front().bins, o.method, exec);
  o.exponents = exponents_from_table(o.table);
  return o;
}

std::vector<SignaturePoint> signature_points(std::span<const BinOfDayStats> table, Duration tau) {
  std::vector<SignaturePoint> out;
  out.reserve(table.size());
  for (const auto& t : table) {
    SignaturePoint p;
    p.tau = tau;
    p.bin_index = t.bin_index;
    p.N = std::exp(t.mean_log_N);
    p.sigma = std::exp(t.mean_log_sigma);
    p.sigma2_over_N = p.sigma * p.sigma / p.N;
    p.n_days = t.n_days;
    out.push_back(p);
  }
  return out;
}

std::vector<SignaturePoint> oracle_subdiffusion(const SimConfig& config, std::span<const Duration> taus,
                                                std::optional<VolMethod> method, Exec exec) {
  auto binned = simulate_and_bin(config, taus, exec);
  std::vector<SignaturePoint> out;
  for (const auto& tb : binned) {
    const auto table = bin_of_day_table(tb.bins, method.value_or(default_vol_method(tb.tau)), exec);
    const auto pts = signature_points(table, tb.tau);
    out.insert(out.end(), pts.begin(), pts.end());
  }
  return out;
}

RegressionResult sigma_slope(std::span<const SignaturePoint> points, double n_min, double n_max) {
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (p.N >= n_min && p.N <= n_max) {
      x.push_back(p.N);
      y.push_back(p.sigma);
    }
  }
  return loglog_regression(x, y);
}

VisualCrossover visual_crossover(std::span<const SignaturePoint> points, double n_low_max, double n_high_min) {
  double low = 0.0, high = 0.0;
  std::size_t n_low = 0, n_high = 0;
  for (const auto& p : points) {
    if (p.N <= n_low_max) {
      low += std::log(p.sigma);
      ++n_low;
    }
    if (p.N >= n_high_min) {
      high += std::log(p.sigma) - 0.5 * std::log(p.N);
      ++n_high;
    }
  }
  if (n_low == 0 || n_high == 0) throw DomainError("visual crossover needs points on both sides");
  VisualCrossover v;
  v.plateau_sigma = std::exp(low / static_cast<double>(n_low));
  v.diffusive_coefficient = std::exp(high / static_cast<double>(n_high));
  const double r = v.plateau_sigma / v.diffusive_coefficient;
  v.N_cross = r * r;
  return v;
}

void redenominate(std::span<TradeRecord> trades, std::span<QuoteRecord> quotes, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("redenomination factor must be > 0");
  for (auto& t : trades) t.price *= lambda;
  for (auto& q : quotes) {
    q.bid *= lambda;
    q.ask *= lambda;
  }
}

}  // namespace invlab
