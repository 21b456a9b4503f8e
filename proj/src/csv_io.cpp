#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "invlab/ingest.hpp"

namespace invlab {

namespace {

constexpr std::string_view kTradesHeader = "timestamp_ns,price,size";
constexpr std::string_view kQuotesHeader = "timestamp_ns,bid,ask,bid_size,ask_size";
constexpr std::string_view kBinsHeader =
    "day,bin_index,start,N,V,Q,P,open,high,low,close,returns_10s,S_mean,SQ_mean,Vbid_mean,Vask_mean";
constexpr std::size_t kBinsColumns = 16;
constexpr std::array<std::string_view, kBinsColumns> kBinsColumnNames = {
    "day", "bin_index", "start", "N", "V", "Q", "P", "open", "high", "low", "close",
    "returns_10s", "S_mean", "SQ_mean", "Vbid_mean", "Vask_mean"};

/// Splits on ',' into `fields`; returns the field count.
std::size_t split_fields(std::string_view line, std::vector<std::string_view>& fields) {
  fields.clear();
  while (true) {
    const auto comma = line.find(',');
    fields.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line = line.substr(comma + 1);
  }
  return fields.size();
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

/// Reads lines until the header; '#' lines and blanks before it are skipped.
void expect_header(std::istream& in, std::string_view header, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t != header)
      throw ParseError("unexpected header '" + std::string(t) + "', expected '" + std::string(header) + "'",
                       line_no);
    return;
  }
  throw ParseError("missing header '" + std::string(header) + "'");
}

void append(std::string& buf, std::int64_t v) {
  std::array<char, 24> tmp{};
  auto r = std::to_chars(tmp.data(), tmp.data() + tmp.size(), v);
  buf.append(tmp.data(), r.ptr);
}

}  // namespace

ParseResult<TradeRecord> parse_trades(std::istream& in, const ContractSpec& contract) {
  ParseResult<TradeRecord> result;
  std::size_t line_no = 0;
  expect_header(in, kTradesHeader, line_no);
  std::string line;
  std::vector<std::string_view> f;
  Timestamp last = std::numeric_limits<Timestamp>::min();
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (trim(line).empty()) continue;
    if (split_fields(line, f) != 3) {
      result.issues.push_back({line_no, ParseIssue::Severity::error, "expected 3 fields"});
      continue;
    }
    TradeRecord r;
    try {
      r.timestamp = parse_int(f[0]);
      r.price = parse_double(f[1]);
      r.size = parse_int(f[2]);
    } catch (const ParseError& e) {
      result.issues.push_back({line_no, ParseIssue::Severity::error, e.what()});
      continue;
    }
    if (r.size < 1) {
      result.issues.push_back({line_no, ParseIssue::Severity::error, "size must be >= 1"});
      continue;
    }
    if (!(r.price > 0.0) || !std::isfinite(r.price)) {
      result.issues.push_back({line_no, ParseIssue::Severity::error, "price must be > 0"});
      continue;
    }
    if (r.timestamp < last) throw ParseError("timestamps must be non-decreasing", line_no);
    last = r.timestamp;
    const double ticks = r.price / contract.tick_size;
    if (std::abs(std::round(ticks) * contract.tick_size - r.price) > 1e-9 * r.price) {
      result.issues.push_back({line_no, ParseIssue::Severity::warning, "price off the tick grid"});
    }
    result.records.push_back(r);
  }
  return result;
}

ParseResult<QuoteRecord> parse_quotes(std::istream& in) {
  ParseResult<QuoteRecord> result;
  std::size_t line_no = 0;
  expect_header(in, kQuotesHeader, line_no);
  std::string line;
  std::vector<std::string_view> f;
  Timestamp last = std::numeric_limits<Timestamp>::min();
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (trim(line).empty()) continue;
    if (split_fields(line, f) != 5) {
      result.issues.push_back({line_no, ParseIssue::Severity::error, "expected 5 fields"});
      continue;
    }
    QuoteRecord q;
    try {
      q.timestamp = parse_int(f[0]);
      q.bid = parse_double(f[1]);
      q.ask = parse_double(f[2]);
      q.bid_size = parse_int(f[3]);
      q.ask_size = parse_int(f[4]);
    } catch (const ParseError& e) {
      result.issues.push_back({line_no, ParseIssue::Severity::error, e.what()});
      continue;
    }
    if (!(q.bid > 0.0) || q.ask < q.bid) {
      result.issues.push_back({line_no, ParseIssue::Severity::error, "requires ask >= bid > 0"});
      continue;
    }
    if (q.bid_size < 0 || q.ask_size < 0) {
      result.issues.push_back({line_no, ParseIssue::Severity::error, "sizes must be >= 0"});
      continue;
    }
    if (q.timestamp < last) throw ParseError("timestamps must be non-decreasing", line_no);
    last = q.timestamp;
    result.records.push_back(q);
  }
  return result;
}

void write_trades_csv(std::ostream& out, std::span<const TradeRecord> trades, double tick_size) {
  const int decimals = decimals_for_tick(tick_size);
  std::string buf;
  buf.reserve(1 << 20);
  buf.append(kTradesHeader).push_back('\n');
  for (const auto& t : trades) {
    append(buf, t.timestamp);
    buf.push_back(',');
    buf += format_fixed(t.price, decimals);
    buf.push_back(',');
    append(buf, t.size);
    buf.push_back('\n');
    if (buf.size() > (1 << 20) - 128) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

void write_quotes_csv(std::ostream& out, std::span<const QuoteRecord> quotes, double tick_size) {
  const int decimals = decimals_for_tick(tick_size);
  std::string buf;
  buf.reserve(1 << 20);
  buf.append(kQuotesHeader).push_back('\n');
  for (const auto& q : quotes) {
    append(buf, q.timestamp);
    buf.push_back(',');
    buf += format_fixed(q.bid, decimals);
    buf.push_back(',');
    buf += format_fixed(q.ask, decimals);
    buf.push_back(',');
    append(buf, q.bid_size);
    buf.push_back(',');
    append(buf, q.ask_size);
    buf.push_back('\n');
    if (buf.size() > (1 << 20) - 128) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

// ---------------------------------------------------------------------------

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; }

}  // namespace

void write_bins_csv(std::ostream& out, const BinsMeta& meta, std::span<const Bin> bins) {
  out << "# symbol=" << meta.symbol << "\n";
  out << "# tick_size=" << format_double(meta.tick_size) << "\n";
  out << "# asset_class=" << to_string(meta.asset_class) << "\n";
  out << "# tau=" << format_duration(meta.tau) << "\n";
  out << kBinsHeader << "\n";
  std::string row;
  for (const auto& b : bins) {
    row.clear();
    row += date_string(b.day);
    row += ',' + std::to_string(b.bin_index);
    row += ',' + std::to_string(b.start);
    row += ',' + std::to_string(b.N);
    row += ',' + std::to_string(b.V);
    for (double v : {b.Q, b.P, b.open, b.high, b.low, b.close}) row += ',' + format_double(v);
    row += ',';
    for (std::size_t i = 0; i < b.returns_10s.size(); ++i) {
      if (i) row += ';';
      row += format_double(b.returns_10s[i]);
    }
    row += ',' + opt(b.S_mean) + ',' + opt(b.SQ_mean) + ',' + opt(b.Vbid_mean) + ',' + opt(b.Vask_mean);
    row += '\n';
    out << row;
  }
}

BinsFile read_bins_csv(std::istream& in) {
  BinsFile file;
  std::size_t line_no = 0;
  std::string line;
  bool header_seen = false;
  bool have_symbol = false, have_tick = false, have_tau = false;
  std::vector<std::string_view> f;

  auto column_error = [&](std::size_t col, const std::string& why) {
    return ParseError("column '" + std::string(kBinsColumnNames[col]) + "': " + why, line_no);
  };

  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    const auto t = trim(line);
    if (t.empty()) continue;
    if (!header_seen) {
      if (t.front() == '#') {
        const auto body = trim(t.substr(1));
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) continue;
        const auto key = trim(body.substr(0, eq));
        const auto value = trim(body.substr(eq + 1));
        if (key == "symbol") {
          file.meta.symbol = std::string(value);
          have_symbol = true;
        } else if (key == "tick_size") {
          file.meta.tick_size = parse_double(value);
          have_tick = true;
        } else if (key == "asset_class") {
          file.meta.asset_class = parse_asset_class(value);
        } else if (key == "tau") {
          file.meta.tau = parse_duration(value);
          have_tau = true;
        }
        continue;
      }
      if (t != kBinsHeader) {
        split_fields(t, f);
        for (std::size_t i = 0; i < kBinsColumns; ++i) {
          if (i >= f.size()) throw ParseError("missing column '" + std::string(kBinsColumnNames[i]) + "'", line_no);
          if (trim(f[i]) != kBinsColumnNames[i])
            throw ParseError("unexpected column '" + std::string(trim(f[i])) + "', expected '" +
                                 std::string(kBinsColumnNames[i]) + "'",
                             line_no);
        }
        throw ParseError("unexpected extra columns in header", line_no);
      }
      if (!have_symbol || !have_tick || !have_tau)
        throw ParseError("bins file lacks '# symbol=', '# tick_size=' or '# tau=' metadata", line_no);
      header_seen = true;
      continue;
    }
    if (t.front() == '#') continue;
    if (split_fields(t, f) != kBinsColumns)
      throw ParseError("expected " + std::to_string(kBinsColumns) + " columns, got " + std::to_string(f.size()),
                       line_no);
    Bin b;
    std::size_t col = 0;
    try {
      b.day = parse_date(f[col]);
      col = 1;
      b.bin_index = static_cast<int>(parse_int(f[col]));
      col = 2;
      b.start = parse_int(f[col]);
      col = 3;
      b.N = parse_int(f[col]);
      col = 4;
      b.V = parse_int(f[col]);
      for (double* dst : {&b.Q, &b.P, &b.open, &b.high, &b.low, &b.close}) {
        ++col;
        *dst = trim(f[col]).empty() ? kMissing : parse_double(f[col]);
      }
      col = 11;
      std::string_view rets = trim(f[col]);
      while (!rets.empty()) {
        const auto semi = rets.find(';');
        b.returns_10s.push_back(parse_double(rets.substr(0, semi)));
        if (semi == std::string_view::npos) break;
        rets = rets.substr(semi + 1);
      }
      for (auto* dst : {&b.S_mean, &b.SQ_mean, &b.Vbid_mean, &b.Vask_mean}) {
        ++col;
        if (!trim(f[col]).empty()) *dst = parse_double(f[col]);
      }
    } catch (const ParseError& e) {
      throw column_error(col, e.what());
    }
    if (b.N < 0 || b.V < 0) throw column_error(b.N < 0 ? 3 : 4, "must be >= 0");
    if (b.N > 0 && (std::isnan(b.open) || std::isnan(b.high) || std::isnan(b.low) || std::isnan(b.close)))
      throw column_error(7, "OHLC required when N > 0");
    file.bins.push_back(std::move(b));
  }
  if (!header_seen) throw ParseError("missing bins header");
  return file;
}

BinsFile read_bins_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open bins file '" + path.string() + "'");
  try {
    return read_bins_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace invlab
