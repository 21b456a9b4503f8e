// Per-symbol statistics from binned data: summary log-means, the scaling
// exponents of W, sigma and V against N, the invariants and the tail of I.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invlab/estimators.hpp"
#include "invlab/ingest.hpp"
#include "invlab/scaling.hpp"

namespace invlab {

/// Minimum spread of log10 N needed for the exponent regressions.
inline constexpr double kMinLog10NSpan = 0.5;

struct ScalingExponents {
  RegressionResult alpha;  // log W vs log N
  RegressionResult beta;   // log sigma vs log N
  RegressionResult gamma;  // log V vs log N
  double log10_N_span = 0.0;
};

/// Regressions on bin-of-day averages. Throws DomainError("insufficient
/// N-span ...") when log10 N covers less than kMinLog10NSpan.
ScalingExponents exponents_from_table(std::span<const BinOfDayStats> table);

/// One bin that has trades and a positive volatility.
struct BinSample {
  std::int64_t day = 0;
  int bin_index = 0;
  double N = 0.0;
  double V = 0.0;
  double P = 0.0;
  double Q = 0.0;
  double sigma = 0.0;
  double W = 0.0;
  double I = 0.0;
};

/// Regressions on raw per-bin values (used for stocks).
ScalingExponents exponents_from_samples(std::span<const BinSample> samples);

struct AnalysisOptions {
  std::optional<VolMethod> method;  // default chosen from tau
  double cutoff_prob = kDefaultCutoffProbability;
  Exec exec = Exec::parallel;
};

enum class RegressionMode { bin_of_day, per_bin };
std::string to_string(RegressionMode m);

struct SymbolAnalysis {
  BinsMeta meta;
  VolMethod method = VolMethod::squared_returns_10s;
  RegressionMode mode = RegressionMode::bin_of_day;

  // Fields below do not depend on the volatility estimator: log-means over
  // bins with N > 0 (quote fields over those bins where present).
  std::size_t bins_total = 0;
  std::size_t bins_traded = 0;
  double N = 0.0;
  double V = 0.0;
  double Q = 0.0;
  double P = 0.0;
  std::optional<double> spread;       // dollars
  std::optional<double> spread_ticks;
  std::optional<double> Vbid;
  std::optional<double> Vask;
  std::optional<double> C;            // dollars, pooled over all trades

  // Volatility-derived fields.
  std::size_t bins_used = 0;          // N > 0 and sigma > 0
  double sigma = 0.0;                 // log-return units
  double sigma_ticks = 0.0;
  ScalingExponents exponents;
  double I = 0.0;                     // dollars
  std::optional<double> I_rescaled;
  std::optional<TailFit> tail;
  std::vector<std::string> warnings;

  std::vector<BinSample> samples;     // used bins in file order
  std::vector<BinOfDayStats> table;   // bin-of-day averages
};

/// Throws DomainError when fewer than three usable bins (or bin-of-day
/// positions for futures) remain.
SymbolAnalysis analyze_bins(const BinsFile& file, const AnalysisOptions& options = {});

/// Used bins with their per-bin invariant.
std::vector<BinSample> bin_samples(std::span<const Bin> bins, VolMethod method);

}  // namespace invlab
