#include "invlab/ingest.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "invlab/config.hpp"

namespace invlab {

std::string to_string(AssetClass c) { return c == AssetClass::future ? "future" : "stock"; }

AssetClass parse_asset_class(std::string_view text) {
  text = trim(text);
  if (text == "future" || text == "futures") return AssetClass::future;
  if (text == "stock" || text == "stocks") return AssetClass::stock;
  throw ConfigError("unknown asset_class '" + std::string(text) + "' (expected future|stock)");
}

namespace {

std::vector<TimeWindow> subtract(std::vector<TimeWindow> keep, const std::vector<TimeWindow>& remove) {
  for (const auto& r : remove) {
    std::vector<TimeWindow> next;
    for (const auto& w : keep) {
      if (r.end <= w.begin || r.begin >= w.end) {
        next.push_back(w);
        continue;
      }
      if (r.begin > w.begin) next.push_back({w.begin, r.begin});
      if (r.end < w.end) next.push_back({r.end, w.end});
    }
    keep = std::move(next);
  }
  std::sort(keep.begin(), keep.end(), [](const auto& a, const auto& b) { return a.begin < b.begin; });
  return keep;
}

TimeWindow parse_window(std::string_view text) {
  const auto dash = text.find('-');
  if (dash == std::string_view::npos)
    throw ConfigError("invalid session window '" + std::string(text) + "', expected HH:MM-HH:MM");
  TimeWindow w{parse_clock_minutes(text.substr(0, dash)), parse_clock_minutes(text.substr(dash + 1))};
  if (w.begin >= w.end) throw ConfigError("empty session window '" + std::string(text) + "'");
  return w;
}

}  // namespace

std::vector<TimeWindow> ContractSpec::keep_windows() const {
  TimeWindow base{session.open, session.close};
  if (asset_class == AssetClass::stock) {
    base.begin += kStockOpenCloseBufferMinutes;
    base.end -= kStockOpenCloseBufferMinutes;
    if (base.begin >= base.end) return {};
  }
  return subtract({base}, session.exclusions);
}

void ContractSpec::validate() const {
  if (!(tick_size > 0.0) || !std::isfinite(tick_size)) throw ConfigError("tick_size must be > 0");
  if (session.open < 0 || session.close > 1440 || session.open >= session.close)
    throw ConfigError("session.open must precede session.close within 00:00-24:00");
  auto ex = session.exclusions;
  std::sort(ex.begin(), ex.end(), [](const auto& a, const auto& b) { return a.begin < b.begin; });
  for (std::size_t i = 0; i < ex.size(); ++i) {
    if (ex[i].begin < 0 || ex[i].end > 1440 || ex[i].begin >= ex[i].end)
      throw ConfigError("session exclusion outside 00:00-24:00");
    if (i > 0 && ex[i].begin < ex[i - 1].end) throw ConfigError("session exclusions overlap");
  }
}

ContractSpec parse_contract_spec(const KeyValueConfig& cfg) {
  ContractSpec spec;
  spec.symbol = cfg.require("symbol");
  spec.tick_size = cfg.require_double("tick_size");
  spec.asset_class = parse_asset_class(cfg.require("asset_class"));
  if (auto v = cfg.get("session.open")) spec.session.open = parse_clock_minutes(*v);
  if (auto v = cfg.get("session.close")) spec.session.close = parse_clock_minutes(*v);
  for (const auto& item : cfg.get_list("session.exclusions")) spec.session.exclusions.push_back(parse_window(item));
  spec.validate();
  return spec;
}

ContractSpec load_contract_spec(const std::filesystem::path& path) {
  return parse_contract_spec(KeyValueConfig::load(path));
}

std::string contract_spec_text(const ContractSpec& spec) {
  std::string out;
  out += "symbol = " + spec.symbol + "\n";
  out += "tick_size = " + format_double(spec.tick_size) + "\n";
  out += "asset_class = " + to_string(spec.asset_class) + "\n";
  out += "session.open = " + format_clock_minutes(spec.session.open) + "\n";
  out += "session.close = " + format_clock_minutes(spec.session.close) + "\n";
  std::string ex;
  for (const auto& w : spec.session.exclusions) {
    if (!ex.empty()) ex += ", ";
    ex += format_clock_minutes(w.begin) + "-" + format_clock_minutes(w.end);
  }
  out += "session.exclusions = " + ex + "\n";
  return out;
}

// ---------------------------------------------------------------------------

std::vector<TradeRecord> group_simultaneous(std::span<const TradeRecord> trades) {
  std::vector<TradeRecord> out;
  out.reserve(trades.size());
  std::size_t i = 0;
  while (i < trades.size()) {
    std::size_t j = i + 1;
    while (j < trades.size() && trades[j].timestamp == trades[i].timestamp) ++j;
    if (j == i + 1) {
      out.push_back(trades[i]);
    } else {
      std::int64_t size = 0;
      double notional = 0.0;
      bool same_price = true;
      for (std::size_t k = i; k < j; ++k) {
        size += trades[k].size;
        notional += trades[k].price * static_cast<double>(trades[k].size);
        same_price = same_price && trades[k].price == trades[i].price;
      }
      // a run at a single price keeps that exact price
      const double price = same_price ? trades[i].price : notional / static_cast<double>(size);
      out.push_back({trades[i].timestamp, price, size});
    }
    i = j;
  }
  return out;
}

bool in_session(Timestamp t, std::span<const TimeWindow> keep) {
  const std::int64_t offset = t - day_number(t) * kNanosPerDay;
  const std::int64_t nanos_per_minute = 60 * kNanosPerSecond;
  for (const auto& w : keep) {
    if (offset >= w.begin * nanos_per_minute && offset < w.end * nanos_per_minute) return true;
  }
  return false;
}

namespace {

template <class Record>
std::vector<Record> filter_records(std::span<const Record> records, const ContractSpec& contract) {
  const auto keep = contract.keep_windows();
  std::vector<Record> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (in_session(r.timestamp, keep)) out.push_back(r);
  }
  return out;
}

}  // namespace

std::vector<TradeRecord> filter_session(std::span<const TradeRecord> trades, const ContractSpec& contract) {
  return filter_records(trades, contract);
}

std::vector<QuoteRecord> filter_session(std::span<const QuoteRecord> quotes, const ContractSpec& contract) {
  return filter_records(quotes, contract);
}

// ---------------------------------------------------------------------------

std::vector<BinLayout> intraday_layout(const ContractSpec& contract, Duration tau) {
  if (tau.count() <= 0) throw DomainError("bin width must be positive");
  std::vector<BinLayout> out;
  const std::int64_t nanos_per_minute = 60 * kNanosPerSecond;
  for (const auto& w : contract.keep_windows()) {
    const Timestamp end = w.end * nanos_per_minute;
    for (Timestamp s = w.begin * nanos_per_minute; s < end; s += tau.count()) {
      out.push_back({s, std::min(s + tau.count(), end)});
    }
  }
  return out;
}

std::vector<double> sampled_log_returns(std::span<const TradeRecord> trades, Timestamp start, Timestamp end,
                                        Duration grid) {
  std::vector<double> out;
  std::size_t next = 0;
  double last_sample = 0.0;
  bool have_sample = false;
  for (Timestamp close = start + grid.count(); close <= end; close += grid.count()) {
    while (next < trades.size() && trades[next].timestamp < close) ++next;
    if (next == 0) continue;
    const double price = trades[next - 1].price;
    if (have_sample) out.push_back(std::log(price / last_sample));
    last_sample = price;
    have_sample = true;
  }
  return out;
}

std::vector<Bin> bin_day(std::int64_t day, std::span<const TradeRecord> trades,
                         std::span<const QuoteRecord> quotes, const std::optional<QuoteRecord>& prior_quote,
                         std::span<const BinLayout> layout) {
  const Timestamp midnight = day * kNanosPerDay;
  std::vector<Bin> out;
  out.reserve(layout.size());

  std::size_t ti = 0;  // first trade not yet consumed
  std::size_t qi = 0;  // first quote with timestamp > last processed time
  std::optional<QuoteRecord> prevailing = prior_quote;

  auto advance_quotes = [&](Timestamp t) {  // all quotes with timestamp <= t become prevailing
    while (qi < quotes.size() && quotes[qi].timestamp <= t) prevailing = quotes[qi++];
  };

  for (std::size_t b = 0; b < layout.size(); ++b) {
    Bin bin;
    bin.day = day;
    bin.bin_index = static_cast<int>(b);
    bin.start = midnight + layout[b].start;
    const Timestamp end = midnight + layout[b].end;

    while (ti < trades.size() && trades[ti].timestamp < bin.start) ++ti;
    std::size_t tj = ti;
    while (tj < trades.size() && trades[tj].timestamp < end) ++tj;
    const auto members = trades.subspan(ti, tj - ti);

    // quote state entering the bin
    while (qi < quotes.size() && quotes[qi].timestamp < bin.start) prevailing = quotes[qi++];
    std::optional<QuoteRecord> entering = prevailing;
    std::size_t q_begin = qi;
    std::size_t q_end = q_begin;
    while (q_end < quotes.size() && quotes[q_end].timestamp < end) ++q_end;

    if (q_end > q_begin) {
      double s = 0.0, vb = 0.0, va = 0.0;
      for (std::size_t k = q_begin; k < q_end; ++k) {
        s += quotes[k].spread();
        vb += static_cast<double>(quotes[k].bid_size);
        va += static_cast<double>(quotes[k].ask_size);
      }
      const double n = static_cast<double>(q_end - q_begin);
      bin.S_mean = s / n;
      bin.Vbid_mean = vb / n;
      bin.Vask_mean = va / n;
    } else if (entering) {
      bin.S_mean = entering->spread();
      bin.Vbid_mean = static_cast<double>(entering->bid_size);
      bin.Vask_mean = static_cast<double>(entering->ask_size);
    }

    if (!members.empty()) {
      bin.N = static_cast<std::int64_t>(members.size());
      double price_sum = 0.0;
      double hi = members.front().price, lo = members.front().price;
      double log_sq_sum = 0.0;
      std::size_t sq_count = 0;
      for (const auto& t : members) {
        bin.V += t.size;
        price_sum += t.price;
        hi = std::max(hi, t.price);
        lo = std::min(lo, t.price);
        advance_quotes(t.timestamp);
        if (prevailing) {
          const double sq = prevailing->spread() * static_cast<double>(t.size);
          if (sq > 0.0) {
            log_sq_sum += std::log(sq);
            ++sq_count;
          }
        }
      }
      bin.Q = static_cast<double>(bin.V) / static_cast<double>(bin.N);
      bin.P = price_sum / static_cast<double>(bin.N);
      bin.open = members.front().price;
      bin.close = members.back().price;
      bin.high = hi;
      bin.low = lo;
      bin.returns_10s = sampled_log_returns(members, bin.start, end);
      if (sq_count > 0) bin.SQ_mean = std::exp(log_sq_sum / static_cast<double>(sq_count));
    }
    advance_quotes(end - 1);
    ti = tj;
    out.push_back(std::move(bin));
  }
  return out;
}

std::vector<Bin> bin_series(std::span<const TradeRecord> trades, std::span<const QuoteRecord> quotes,
                            const ContractSpec& contract, Duration tau, Exec exec) {
  std::vector<std::int64_t> days;
  for (const auto& t : trades) {
    const auto d = day_number(t.timestamp);
    if (days.empty() || days.back() != d) days.push_back(d);
  }
  for (const auto& q : quotes) days.push_back(day_number(q.timestamp));
  std::sort(days.begin(), days.end());
  days.erase(std::unique(days.begin(), days.end()), days.end());

  const auto layout = intraday_layout(contract, tau);
  std::vector<std::vector<Bin>> per_day(days.size());

  auto run_day = [&](std::size_t i) {
    const Timestamp lo = days[i] * kNanosPerDay;
    const Timestamp hi = lo + kNanosPerDay;
    auto by_ts = [](const auto& r, Timestamp t) { return r.timestamp < t; };
    const auto t0 = std::lower_bound(trades.begin(), trades.end(), lo, by_ts);
    const auto t1 = std::lower_bound(t0, trades.end(), hi, by_ts);
    const auto q0 = std::lower_bound(quotes.begin(), quotes.end(), lo, by_ts);
    const auto q1 = std::lower_bound(q0, quotes.end(), hi, by_ts);
    std::optional<QuoteRecord> prior;
    if (q0 != quotes.begin()) prior = *(q0 - 1);
    per_day[i] = bin_day(days[i], std::span(t0, t1), std::span(q0, q1), prior, layout);
  };

  const auto n_days = static_cast<std::int64_t>(days.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic) num_threads(thread_budget())
    for (std::int64_t i = 0; i < n_days; ++i) run_day(static_cast<std::size_t>(i));
  } else {
    for (std::int64_t i = 0; i < n_days; ++i) run_day(static_cast<std::size_t>(i));
  }

  std::vector<Bin> out;
  out.reserve(days.size() * layout.size());
  for (auto& d : per_day) std::move(d.begin(), d.end(), std::back_inserter(out));
  return out;
}

}  // namespace invlab
