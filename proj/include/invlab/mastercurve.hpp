// Crossover models for volatility and trade size versus trade count, their
// log-space fits, and the rescaling used to collapse contracts onto master
// curves.
//
//   sigma(N) = sigma0 [a + (N/N0)^{1/2} + N/N0]^{1/2}
//   Q(N)     = Q0 / (1 + (N/N0)^{-nu})
//   I~(n)    = I0 (a/n + n^{-1/2} + 1)^{1/2} / (1 + n^{-nu}),  n = N/N0
//   I0       = Q0 sigma0 / sqrt(N0)
#pragma once

#include <span>
#include <string>
#include <vector>

#include "invlab/common.hpp"
#include "invlab/parallel.hpp"

namespace invlab {

inline constexpr double kDefaultNoiseLevel = 0.5;  // `a`
inline constexpr double kDefaultNu = 0.54;
inline constexpr double kNuLower = 0.1;
inline constexpr double kNuUpper = 1.5;

double sigma_model(double N, double sigma0, double N0, double a = kDefaultNoiseLevel);
double q_model(double N, double Q0, double N0, double nu = kDefaultNu);
double itilde_model(double n, double I0, double a = kDefaultNoiseLevel, double nu = kDefaultNu);
double asymptotic_invariant(double Q0, double sigma0, double N0);

struct CurvePoint {
  double N = 0.0;
  double value = 0.0;
};

struct SigmaFitOptions {
  double a = kDefaultNoiseLevel;
  double grid_step_decades = 0.02;   // must be <= 0.05
  double grid_margin_decades = 3.0;  // search beyond the observed N range
  double tolerance_decades = 1e-12;
  Exec exec = Exec::parallel;
};

struct SigmaFit {
  double sigma0 = 0.0;
  double N0 = 0.0;
  double a = kDefaultNoiseLevel;
  double rss = 0.0;                     // sum of squared log residuals
  std::size_t n_points = 0;
  bool weakly_identified = false;       // N spans less than one decade
  std::vector<double> refinement_trace; // best objective after each refinement step
};

/// Least squares in log space. sigma0 is profiled in closed form at each
/// grid node over log10 N0; the best node is refined by golden-section
/// search. Needs >= 8 points. Throws FitError("N0 unidentifiable ...") when
/// the optimum sits on the edge of the search range, which is what flat
/// (N-independent) data produce.
SigmaFit fit_sigma_curve(std::span<const CurvePoint> points, const SigmaFitOptions& options = {});

/// Profile objective at a given N0: returns {log sigma0, rss}.
std::pair<double, double> sigma_profile(std::span<const CurvePoint> points, double N0, double a);

/// sigma0 with N0 held fixed (time-rescaling fits reuse a reference N0).
double fit_sigma0_fixed(std::span<const CurvePoint> points, double N0, double a = kDefaultNoiseLevel);

struct QFit {
  double Q0 = 0.0;
  double rss = 0.0;
  std::size_t n_points = 0;
};

/// Q0 profiled in closed form with N0 and nu fixed.
QFit fit_q_curve(std::span<const CurvePoint> points, double N0, double nu = kDefaultNu);

struct ContractQData {
  std::string symbol;
  std::vector<CurvePoint> points;  // (N, Q)
  double N0 = 0.0;
};

struct NuFit {
  double nu = kDefaultNu;
  double rss = 0.0;
  bool boundary_hit = false;
  std::vector<double> Q0;  // per contract, input order
};

/// One nu shared by all contracts, minimising the aggregated log RSS over
/// [0.1, 1.5] with per-contract Q0 profiled out. Per-contract partial sums
/// are computed in parallel and combined in input order.
NuFit fit_global_nu(std::span<const ContractQData> contracts, Exec exec = Exec::parallel);

double aggregated_q_rss(std::span<const ContractQData> contracts, double nu, Exec exec = Exec::serial);

struct MasterCurveFit {
  std::string symbol;
  double sigma0 = 0.0;
  double N0 = 0.0;
  double Q0 = 0.0;
  double a = kDefaultNoiseLevel;
  double nu = kDefaultNu;
  double I0 = 0.0;
  double rss_sigma = 0.0;
  double rss_q = 0.0;
  bool weakly_identified = false;
};

MasterCurveFit make_master_fit(const SigmaFit& sigma, const QFit& q, double nu);

/// Binned observation fed to the collapse.
struct CurveSample {
  double N = 0.0;
  double sigma = 0.0;
  double Q = 0.0;
};

enum class CurveKind { sigma, trade_size, invariant };
std::string to_string(CurveKind k);

struct CollapsePoint {
  double n = 0.0;  // N / N0
  double y = 0.0;  // sigma/sigma0, Q/Q0 or I~/I0
};

/// Rescales samples by the fitted parameters. For the invariant curve the
/// sample value is I~ = Q sigma / sqrt(N).
std::vector<CollapsePoint> collapse(std::span<const CurveSample> samples, const MasterCurveFit& fit, CurveKind kind);

/// Largest |mean ln y_A - mean ln y_B| over log10(n) bins of the given width
/// that hold at least `min_count` points from each curve. Returns 0 when no
/// bin overlaps.
double max_binned_log_distance(std::span<const CollapsePoint> a, std::span<const CollapsePoint> b,
                               double bin_width_decades = 0.25, std::size_t min_count = 5);

}  // namespace invlab
