// In-memory simulate-and-bin runs and the oracles built on them.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "invlab/analysis.hpp"
#include "invlab/simulator.hpp"

namespace invlab {

struct TauBins {
  Duration tau{0};
  std::vector<Bin> bins;
};

/// Simulates each day, merges simultaneous trades, applies the session
/// filter and bins the day at every `tau`, without materialising the whole
/// tick history. Days run in parallel; bins come back in day order. Each
/// simulated day starts without a prevailing quote.
std::vector<TauBins> simulate_and_bin(const SimConfig& config, std::span<const Duration> taus,
                                      Exec exec = Exec::parallel);

struct ThreeHalvesOracle {
  ScalingExponents exponents;
  std::vector<BinOfDayStats> table;
  TickRegimePrediction regime;
  VolMethod method = VolMethod::squared_returns_10s;
};

/// Full pipeline on simulated data down to the regression of <log W>_bin on
/// <log N>_bin (plus the sigma and V exponents on the same table).
ThreeHalvesOracle oracle_three_halves(const SimConfig& config, Duration tau,
                                      std::optional<VolMethod> method = std::nullopt, Exec exec = Exec::parallel);

struct SignaturePoint {
  Duration tau{0};
  int bin_index = 0;
  double N = 0.0;      // exp <log N>_bin
  double sigma = 0.0;  // exp <log sigma>_bin, log-return units
  double sigma2_over_N = 0.0;
  int n_days = 0;
};

std::vector<SignaturePoint> signature_points(std::span<const BinOfDayStats> table, Duration tau);

/// Signature plot over several bin widths. The estimator defaults to the
/// usual choice for each width.
std::vector<SignaturePoint> oracle_subdiffusion(const SimConfig& config, std::span<const Duration> taus,
                                                std::optional<VolMethod> method = std::nullopt,
                                                Exec exec = Exec::parallel);

/// Log-log slope of sigma against N over points with n_min <= N <= n_max.
RegressionResult sigma_slope(std::span<const SignaturePoint> points, double n_min, double n_max);

/// Intersection of the low-N plateau (log-mean sigma over N <= n_low_max)
/// with the diffusive line sigma = c sqrt(N) fitted on N >= n_high_min.
struct VisualCrossover {
  double plateau_sigma = 0.0;
  double diffusive_coefficient = 0.0;
  double N_cross = 0.0;
};

VisualCrossover visual_crossover(std::span<const SignaturePoint> points, double n_low_max, double n_high_min);

/// Multiplies every price by `lambda` (bids, asks and trade prices).
void redenominate(std::span<TradeRecord> trades, std::span<QuoteRecord> quotes, double lambda);

}  // namespace invlab
