// Volatility estimators, the log-mean convention, bin-of-day averages and
// the trading invariants I = W / N^{3/2} and I / C.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invlab/common.hpp"
#include "invlab/ingest.hpp"
#include "invlab/parallel.hpp"

namespace invlab {

enum class VolMethod { squared_returns_10s, rogers_satchell };

std::string to_string(VolMethod m);
/// Accepts "sq10s" / "squared_returns_10s" and "rs" / "rogers_satchell".
VolMethod parse_vol_method(std::string_view text);

/// Squared 10 s returns up to 10-minute bins, Rogers-Satchell above.
VolMethod default_vol_method(Duration tau);

/// Per-bin volatility in log-return units. Never annualised.
struct VolatilityEstimate {
  double sigma = 0.0;
  VolMethod method = VolMethod::squared_returns_10s;

  /// sigma expressed in ticks at price `price`.
  double in_ticks(double price, double tick_size) const { return sigma * price / tick_size; }
};

/// exp(mean(log x)). Throws DomainError naming the first non-positive index.
double log_mean(std::span<const double> values);

/// sqrt of the summed squared returns; nullopt when there are no returns.
std::optional<VolatilityEstimate> vol_squared_returns(std::span<const double> returns_10s);
std::optional<VolatilityEstimate> vol_squared_returns(const Bin& bin);

/// Rogers-Satchell: var = ln(H/O) ln(H/C) + ln(L/O) ln(L/C).
/// Throws DomainError unless 0 < low <= open, close <= high.
VolatilityEstimate vol_rogers_satchell(double open, double high, double low, double close);
double rogers_satchell_variance(double open, double high, double low, double close);

/// Dispatch on method; nullopt when the bin has no trades or no returns.
std::optional<VolatilityEstimate> estimate_volatility(const Bin& bin, VolMethod method);

/// Across-days log averages for one intraday bin. Only days where both N and
/// sigma are strictly positive contribute; W = P V sigma is formed per day.
struct BinOfDayStats {
  int bin_index = 0;
  double mean_log_N = 0.0;
  double mean_log_V = 0.0;
  double mean_log_Q = 0.0;
  double mean_log_P = 0.0;
  double mean_log_sigma = 0.0;
  double mean_log_W = 0.0;
  int n_days = 0;
};

/// nullopt when no day qualifies at `bin_index`.
std::optional<BinOfDayStats> bin_of_day_average(std::span<const Bin> bins, int bin_index, VolMethod method);

/// All intraday positions present in `bins`, sorted by bin_index, omitting
/// positions without a qualifying day. Bin indices are reduced in parallel;
/// each index accumulates its days in input order, so results do not depend
/// on the schedule.
std::vector<BinOfDayStats> bin_of_day_table(std::span<const Bin> bins, VolMethod method,
                                            Exec exec = Exec::parallel);

struct InvariantSample {
  double I = 0.0;                    // dollars
  std::optional<double> I_rescaled;  // dimensionless, I / C
  double W = 0.0;                    // dollars, P V sigma
  std::int64_t N = 0;
  std::optional<double> C;           // dollars
};

/// W = P V sigma, I = W N^{-3/2}. Throws DomainError for N < 1, V <= 0,
/// P <= 0 or sigma < 0.
InvariantSample invariant_I(double P, double V, double sigma, std::int64_t N);

/// The equivalent form P sigma Q^{3/2} V^{-1/2}.
double invariant_I_from_trade_size(double P, double sigma, double Q, double V);

/// C = log-mean of trade-level S*Q samples; nullopt when empty.
std::optional<double> spread_cost(std::span<const double> sq_samples);

/// Pooled C from binned data. Each bin's SQ_mean is the log-mean over its N
/// trades, so the N-weighted mean of log SQ_mean is the trade-level log-mean.
std::optional<double> spread_cost_from_bins(std::span<const Bin> bins);

/// I / C. Throws DomainError when C <= 0.
double rescaled_invariant(double I, double C);

InvariantSample with_spread_cost(InvariantSample sample, double C);

}  // namespace invlab
