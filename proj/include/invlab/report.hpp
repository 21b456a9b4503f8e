// Serialisation of analysis and fit results, and the plot-ready report files.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "invlab/analysis.hpp"
#include "invlab/fitting.hpp"

namespace invlab {

using Json = nlohmann::ordered_json;

/// File names used by `analyze` for one (symbol, tau) record.
std::string record_stem(const std::string& symbol, Duration tau);

/// One stats record. `samples_file` and `table_file` name the companion CSVs.
Json analysis_json(const SymbolAnalysis& a, double cutoff_prob, const std::string& samples_file,
                   const std::string& table_file);

/// Per-bin samples: day,bin_index,N,V,P,Q,sigma,W,I.
void write_samples_csv(std::ostream& out, const SymbolAnalysis& a);
/// Bin-of-day averages (natural logs) with the day count.
void write_table_csv(std::ostream& out, const SymbolAnalysis& a);

Json fit_summary_json(const FitReport& report, const FitOptions& options);

/// Writes the fit CSVs into `dir` and returns their names (relative).
std::vector<std::string> write_fit_tables(const FitReport& report, const std::filesystem::path& dir);

/// Builds every report file that the available inputs allow. `analysis_dir`
/// must hold stats.json; `fits_dir` (optional) must hold fit_summary.json.
/// Throws Error naming the first missing upstream file. Returns the written
/// file names relative to `out_dir`, sorted.
std::vector<std::string> write_report(const std::filesystem::path& analysis_dir,
                                      const std::optional<std::filesystem::path>& fits_dir,
                                      const std::filesystem::path& out_dir);

}  // namespace invlab
