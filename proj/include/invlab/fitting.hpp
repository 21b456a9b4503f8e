// Master-curve fitting over binned files: per-contract fits at a reference
// bin width, the shared trade-size exponent, fixed-N0 refits at the other
// bin widths and the rescaled (collapsed) curves.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invlab/estimators.hpp"
#include "invlab/ingest.hpp"
#include "invlab/mastercurve.hpp"

namespace invlab {

/// Bin-of-day points of one file: N, sigma in ticks and Q.
struct CurveData {
  std::string symbol;
  Duration tau{0};
  double tick_size = 0.0;
  std::vector<CurveSample> samples;
  std::optional<double> spread_over_tick;
  std::optional<double> V_best;  // (V_bid + V_ask) / 2 from log-mean depths
};

CurveData curve_data(const BinsFile& file, std::optional<VolMethod> method = std::nullopt,
                     Exec exec = Exec::parallel);

struct FitOptions {
  double a = kDefaultNoiseLevel;
  std::optional<double> nu;  // fixed value; empty means fit across contracts
  Duration reference_tau = std::chrono::minutes(5);
  std::optional<VolMethod> method;
  Exec exec = Exec::parallel;
};

struct ContractFitRow {
  MasterCurveFit fit;
  Duration tau{0};
  std::optional<double> spread_over_tick;
  std::optional<double> V_best;
};

struct TauFitRow {
  std::string symbol;
  Duration tau{0};
  double sigma0 = 0.0;
  double Q0 = 0.0;
  double I0 = 0.0;
};

struct CollapseSeries {
  std::string symbol;
  Duration tau{0};
  CurveKind kind = CurveKind::sigma;
  std::vector<CollapsePoint> points;
};

struct FitReport {
  double nu = kDefaultNu;
  bool nu_fitted = false;
  bool nu_boundary_hit = false;
  std::vector<std::string> notices;
  std::vector<ContractFitRow> contracts;        // symbol order
  std::vector<TauFitRow> tau_rows;              // symbol, then tau order
  std::vector<CollapseSeries> across_contracts; // reference width only
  std::vector<CollapseSeries> across_tau;       // every width, N0 fixed per symbol
};

/// Files are grouped by symbol. A symbol's reference file is the one at
/// `reference_tau`, else its narrowest width (with a notice). With a single
/// contract the exponent fit is skipped and the fixed or default nu is used.
FitReport fit_master_curves(std::span<const BinsFile> files, const FitOptions& options = {});

}  // namespace invlab
