// Trade/quote ingestion: parsing, simultaneous-trade merging, session
// filtering and aggregation into fixed-width intraday bins.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invlab/common.hpp"
#include "invlab/parallel.hpp"

namespace invlab {

class KeyValueConfig;

struct TradeRecord {
  Timestamp timestamp = 0;
  double price = 0.0;       // dollars per share/contract
  std::int64_t size = 0;    // shares/contracts, >= 1

  friend bool operator==(const TradeRecord&, const TradeRecord&) = default;
};

struct QuoteRecord {
  Timestamp timestamp = 0;
  double bid = 0.0;
  double ask = 0.0;
  std::int64_t bid_size = 0;
  std::int64_t ask_size = 0;

  double spread() const { return ask - bid; }
  friend bool operator==(const QuoteRecord&, const QuoteRecord&) = default;
};

enum class AssetClass { future, stock };

std::string to_string(AssetClass c);
AssetClass parse_asset_class(std::string_view text);

/// Half-open window [begin, end) in minutes after midnight UTC.
struct TimeWindow {
  int begin = 0;
  int end = 1440;

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

struct SessionSpec {
  int open = 0;       // minutes after midnight UTC
  int close = 1440;
  std::vector<TimeWindow> exclusions;
};

inline constexpr int kStockOpenCloseBufferMinutes = 30;

struct ContractSpec {
  std::string symbol;
  double tick_size = 0.01;
  AssetClass asset_class = AssetClass::future;
  SessionSpec session;

  /// Intraday windows whose records are retained. Stocks lose the first and
  /// last 30 minutes of the session; futures keep the whole session. Listed
  /// exclusions are removed for both.
  std::vector<TimeWindow> keep_windows() const;

  void validate() const;
};

ContractSpec parse_contract_spec(const KeyValueConfig& cfg);
ContractSpec load_contract_spec(const std::filesystem::path& path);
std::string contract_spec_text(const ContractSpec& spec);

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct ParseIssue {
  enum class Severity { warning, error };
  std::size_t line = 0;
  Severity severity = Severity::warning;
  std::string message;
};

template <class Record>
struct ParseResult {
  std::vector<Record> records;
  std::vector<ParseIssue> issues;

  std::size_t rejected_rows() const {
    std::size_t n = 0;
    for (const auto& i : issues) n += i.severity == ParseIssue::Severity::error;
    return n;
  }
};

/// Reads the `timestamp_ns,price,size` format. Rows violating record
/// invariants are rejected and reported; prices off the tick grid are kept
/// with a warning. Decreasing timestamps throw ParseError.
ParseResult<TradeRecord> parse_trades(std::istream& in, const ContractSpec& contract);

/// Reads the `timestamp_ns,bid,ask,bid_size,ask_size` format.
ParseResult<QuoteRecord> parse_quotes(std::istream& in);

void write_trades_csv(std::ostream& out, std::span<const TradeRecord> trades, double tick_size);
void write_quotes_csv(std::ostream& out, std::span<const QuoteRecord> quotes, double tick_size);

// ---------------------------------------------------------------------------
// Cleaning
// ---------------------------------------------------------------------------

/// Collapses runs of identical timestamps into one trade: sizes summed,
/// price the size-weighted mean. Input must be sorted by timestamp.
std::vector<TradeRecord> group_simultaneous(std::span<const TradeRecord> trades);

bool in_session(Timestamp t, std::span<const TimeWindow> keep);

std::vector<TradeRecord> filter_session(std::span<const TradeRecord> trades, const ContractSpec& contract);
std::vector<QuoteRecord> filter_session(std::span<const QuoteRecord> quotes, const ContractSpec& contract);

// ---------------------------------------------------------------------------
// Binning
// ---------------------------------------------------------------------------

inline constexpr Duration kReturnGrid = std::chrono::seconds(10);

/// Aggregate over one intraday interval. Trade-derived fields (Q, P, OHLC)
/// are NaN when N == 0; quote-derived fields are empty when no quote applies.
struct Bin {
  std::int64_t day = 0;     // days since epoch
  int bin_index = 0;
  Timestamp start = 0;
  std::int64_t N = 0;
  std::int64_t V = 0;
  double Q = kMissing;
  double P = kMissing;
  double open = kMissing;
  double high = kMissing;
  double low = kMissing;
  double close = kMissing;
  std::vector<double> returns_10s;
  std::optional<double> S_mean;
  std::optional<double> SQ_mean;
  std::optional<double> Vbid_mean;
  std::optional<double> Vask_mean;

  bool empty() const { return N == 0; }
};

struct BinLayout {
  Timestamp start = 0;   // offset from midnight, ns
  Timestamp end = 0;
};

/// Intraday bin boundaries: each keep window is tiled from its start by
/// `tau`; a trailing remainder shorter than `tau` forms a final partial bin.
std::vector<BinLayout> intraday_layout(const ContractSpec& contract, Duration tau);

/// Bins for one day. `trades` and `quotes` are that day's records (already
/// merged and filtered); `prior_quote` is the quote prevailing at midnight.
std::vector<Bin> bin_day(std::int64_t day, std::span<const TradeRecord> trades,
                         std::span<const QuoteRecord> quotes,
                         const std::optional<QuoteRecord>& prior_quote,
                         std::span<const BinLayout> layout);

/// Bins every day touched by the trades or quotes. Days are processed
/// independently; Exec::parallel distributes them over OpenMP threads.
std::vector<Bin> bin_series(std::span<const TradeRecord> trades, std::span<const QuoteRecord> quotes,
                            const ContractSpec& contract, Duration tau, Exec exec = Exec::parallel);

/// Log-returns of the last-trade price sampled at the close of each 10 s
/// sub-interval of [start, end). Sub-intervals before the first trade are
/// skipped, so a bin with m populated sub-interval closes has m - 1 returns.
std::vector<double> sampled_log_returns(std::span<const TradeRecord> trades, Timestamp start, Timestamp end,
                                        Duration grid = kReturnGrid);

// ---------------------------------------------------------------------------
// Bins CSV
// ---------------------------------------------------------------------------

struct BinsMeta {
  std::string symbol;
  double tick_size = 0.0;
  AssetClass asset_class = AssetClass::future;
  Duration tau{0};
};

struct BinsFile {
  BinsMeta meta;
  std::vector<Bin> bins;
};

/// Header: `day,bin_index,start,N,V,Q,P,open,high,low,close,returns_10s,
/// S_mean,SQ_mean,Vbid_mean,Vask_mean`. Metadata goes in leading `#` lines.
void write_bins_csv(std::ostream& out, const BinsMeta& meta, std::span<const Bin> bins);
BinsFile read_bins_csv(std::istream& in);
BinsFile read_bins_csv(const std::filesystem::path& path);

}  // namespace invlab
