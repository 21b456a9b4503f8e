#include "invlab/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "invlab/config.hpp"
#include "invlab/rng.hpp"

namespace invlab {

namespace {

constexpr double kSecondsPerDayD = 86400.0;

/// Integral of a log-linear rate from r0 to r1 across [0, width], evaluated
/// over the first `u` fraction of the segment.
double segment_integral(double r0, double r1, double width, double u) {
  const double k = std::log(r1 / r0);
  if (std::abs(k) < 1e-12) return r0 * width * u;
  return r0 * width * std::expm1(k * u) / k;
}

/// Price of an integer tick count, rounded the same way the decimal text of
/// that price parses back.
struct TickPricer {
  double units;
  double scale;

  explicit TickPricer(double tick) {
    scale = std::pow(10.0, decimals_for_tick(tick));
    units = std::round(tick * scale);
  }

  double operator()(std::int64_t ticks) const { return static_cast<double>(ticks) * units / scale; }
};

}  // namespace

IntensityProfile::IntensityProfile(std::vector<Knot> knots) : knots_(std::move(knots)) {
  if (knots_.empty()) throw ConfigError("intensity profile needs at least one knot");
  std::sort(knots_.begin(), knots_.end(), [](const Knot& a, const Knot& b) { return a.second < b.second; });
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!(knots_[i].rate > 0.0) || !std::isfinite(knots_[i].rate))
      throw ConfigError("intensity rates must be positive and finite");
    if (knots_[i].second < 0.0 || knots_[i].second >= kSecondsPerDayD)
      throw ConfigError("intensity knots must lie within the day");
    if (i > 0 && knots_[i].second == knots_[i - 1].second) throw ConfigError("duplicate intensity knot");
  }
  // Make the profile periodic: prepend the value at midnight, append the wrap.
  const Knot first = knots_.front();
  const Knot last = knots_.back();
  if (first.second > 0.0) {
    const double span = first.second + (kSecondsPerDayD - last.second);
    const double u = (kSecondsPerDayD - last.second) / span;
    const double rate0 = std::exp(std::log(last.rate) + u * (std::log(first.rate) - std::log(last.rate)));
    knots_.insert(knots_.begin(), Knot{0.0, rate0});
  }
  knots_.push_back({kSecondsPerDayD, knots_.front().rate});
  max_rate_ = 0.0;
  min_rate_ = knots_.front().rate;
  for (const auto& k : knots_) {
    max_rate_ = std::max(max_rate_, k.rate);
    min_rate_ = std::min(min_rate_, k.rate);
  }
}

IntensityProfile IntensityProfile::constant(double rate) { return IntensityProfile({{0.0, rate}}); }

IntensityProfile IntensityProfile::three_session(double low, double high) {
  if (!(low > 0.0) || !(high >= low)) throw ConfigError("three_session intensity needs 0 < low <= high");
  const double mid = std::sqrt(low * high);
  auto h = [](double hours) { return hours * 3600.0; };
  return IntensityProfile({{h(0.0), low},
                           {h(6.0), low},
                           {h(7.0), mid},
                           {h(12.5), mid},
                           {h(13.5), high},
                           {h(20.0), high},
                           {h(21.0), low}});
}

double IntensityProfile::rate(double second) const {
  second = std::clamp(second, 0.0, kSecondsPerDayD);
  auto it = std::upper_bound(knots_.begin(), knots_.end(), second,
                             [](double s, const Knot& k) { return s < k.second; });
  if (it == knots_.end()) return knots_.back().rate;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double u = (second - lo.second) / (hi.second - lo.second);
  return std::exp(std::log(lo.rate) + u * (std::log(hi.rate) - std::log(lo.rate)));
}

double IntensityProfile::cumulative(double second) const {
  second = std::clamp(second, 0.0, kSecondsPerDayD);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const auto& a = knots_[i];
    const auto& b = knots_[i + 1];
    const double width = b.second - a.second;
    if (second >= b.second) {
      acc += segment_integral(a.rate, b.rate, width, 1.0);
    } else {
      acc += segment_integral(a.rate, b.rate, width, (second - a.second) / width);
      break;
    }
  }
  return acc;
}

std::string IntensityProfile::to_text() const {
  std::string out;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    if (!out.empty()) out += ", ";
    const auto total = static_cast<long>(std::lround(knots_[i].second));
    char clock[48];
    std::snprintf(clock, sizeof clock, "%02ld:%02ld:%02ld", total / 3600, (total / 60) % 60, total % 60);
    out += clock;
    out += "=" + format_double(knots_[i].rate);
  }
  return out;
}

IntensityProfile IntensityProfile::parse(std::string_view text) {
  std::vector<Knot> knots;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw ConfigError("intensity knot '" + std::string(item) + "' lacks '='");
      const auto clock = trim(item.substr(0, eq));
      double seconds = 0.0;
      if (std::count(clock.begin(), clock.end(), ':') == 2) {
        const auto last = clock.rfind(':');
        seconds = parse_clock_minutes(clock.substr(0, last)) * 60.0 +
                  static_cast<double>(parse_int(clock.substr(last + 1)));
      } else {
        seconds = parse_clock_minutes(clock) * 60.0;
      }
      try {
        knots.push_back({seconds, parse_double(item.substr(eq + 1))});
      } catch (const ParseError& e) {
        throw ConfigError("intensity knot '" + std::string(item) + "': " + e.what());
      }
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return IntensityProfile(std::move(knots));
}

// ---------------------------------------------------------------------------

int SpreadModel::ticks_at(double price, double tick_size) const {
  switch (kind) {
    case SpreadKind::one_tick: return 1;
    case SpreadKind::const_ticks: return ticks;
    case SpreadKind::proportional:
      return std::max(1, static_cast<int>(std::lround(price * bps * 1e-4 / tick_size)));
  }
  return 1;
}

void SimConfig::validate() const {
  if (days < 1) throw ConfigError("days must be >= 1");
  if (!(latent_vol > 0.0)) throw ConfigError("latent_vol must be > 0");
  if (!(tick_size > 0.0)) throw ConfigError("tick_size must be > 0");
  if (!(start_price > tick_size)) throw ConfigError("start_price must exceed tick_size");
  if (!(size_log_sd >= 0.0) || !(depth_log_sd >= 0.0)) throw ConfigError("lognormal widths must be >= 0");
  if (spread.kind == SpreadKind::const_ticks && spread.ticks < 1) throw ConfigError("spread.ticks must be >= 1");
  if (spread.kind == SpreadKind::proportional && !(spread.bps > 0.0)) throw ConfigError("spread.bps must be > 0");
  if (session_open < 0 || session_close > 1440 || session_open >= session_close)
    throw ConfigError("session.open must precede session.close within 00:00-24:00");
}

namespace {

std::uint64_t parse_seed(const std::string& text) {
  const auto t = trim(text);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size()) throw ConfigError("invalid seed '" + std::string(t) + "'");
  return v;
}

SpreadModel parse_spread(const KeyValueConfig& cfg) {
  SpreadModel m;
  const auto kind = std::string(trim(cfg.get("spread.model").value_or("one_tick")));
  if (kind == "one_tick") {
    m.kind = SpreadKind::one_tick;
  } else if (kind == "const_ticks") {
    m.kind = SpreadKind::const_ticks;
    m.ticks = static_cast<int>(cfg.require_int("spread.ticks"));
  } else if (kind == "proportional") {
    m.kind = SpreadKind::proportional;
    m.bps = cfg.require_double("spread.bps");
  } else {
    throw ConfigError("unknown spread.model '" + kind + "' (expected one_tick|const_ticks|proportional)");
  }
  return m;
}

IntensityProfile parse_intensity(const KeyValueConfig& cfg) {
  const auto kind = std::string(trim(cfg.get("intensity.profile").value_or("constant")));
  if (kind == "constant") return IntensityProfile::constant(cfg.get_double("intensity.rate", 1.0));
  if (kind == "three_session")
    return IntensityProfile::three_session(cfg.require_double("intensity.low"), cfg.require_double("intensity.high"));
  if (kind == "knots") return IntensityProfile::parse(cfg.require("intensity.knots"));
  throw ConfigError("unknown intensity.profile '" + kind + "' (expected constant|three_session|knots)");
}

}  // namespace

SimConfig parse_sim_config(const KeyValueConfig& cfg) {
  SimConfig c;
  c.seed = parse_seed(cfg.require("seed"));
  c.days = static_cast<int>(cfg.require_int("days"));
  c.latent_vol = cfg.require_double("latent_vol");
  c.tick_size = cfg.require_double("tick_size");
  c.start_price = cfg.require_double("start_price");
  if (auto v = cfg.get("symbol")) c.symbol = std::string(trim(*v));
  if (auto v = cfg.get("start_date")) c.start_day = parse_date(*v);
  c.intensity = parse_intensity(cfg);
  c.size_log_mean = cfg.get_double("trade_size.log_mean", c.size_log_mean);
  c.size_log_sd = cfg.get_double("trade_size.log_sd", c.size_log_sd);
  c.depth_log_mean = cfg.get_double("depth.log_mean", c.depth_log_mean);
  c.depth_log_sd = cfg.get_double("depth.log_sd", c.depth_log_sd);
  c.spread = parse_spread(cfg);
  if (auto v = cfg.get("vol_clock")) {
    const auto t = trim(*v);
    if (t == "trade") c.vol_clock = VolClock::trade;
    else if (t == "wall") c.vol_clock = VolClock::wall;
    else throw ConfigError("unknown vol_clock '" + std::string(t) + "' (expected trade|wall)");
  }
  if (auto v = cfg.get("asset_class")) c.asset_class = parse_asset_class(*v);
  if (auto v = cfg.get("session.open")) c.session_open = parse_clock_minutes(*v);
  if (auto v = cfg.get("session.close")) c.session_close = parse_clock_minutes(*v);
  c.validate();
  return c;
}

SimConfig load_sim_config(const std::filesystem::path& path) { return parse_sim_config(KeyValueConfig::load(path)); }

std::string sim_config_text(const SimConfig& c) {
  std::string out;
  auto line = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  line("symbol", c.symbol);
  line("seed", std::to_string(c.seed));
  line("days", std::to_string(c.days));
  line("start_date", date_string(c.start_day));
  line("latent_vol", format_double(c.latent_vol));
  line("tick_size", format_double(c.tick_size));
  line("start_price", format_double(c.start_price));
  line("intensity.profile", "knots");
  line("intensity.knots", c.intensity.to_text());
  line("trade_size.log_mean", format_double(c.size_log_mean));
  line("trade_size.log_sd", format_double(c.size_log_sd));
  line("depth.log_mean", format_double(c.depth_log_mean));
  line("depth.log_sd", format_double(c.depth_log_sd));
  switch (c.spread.kind) {
    case SpreadKind::one_tick: line("spread.model", "one_tick"); break;
    case SpreadKind::const_ticks:
      line("spread.model", "const_ticks");
      line("spread.ticks", std::to_string(c.spread.ticks));
      break;
    case SpreadKind::proportional:
      line("spread.model", "proportional");
      line("spread.bps", format_double(c.spread.bps));
      break;
  }
  line("vol_clock", c.vol_clock == VolClock::trade ? "trade" : "wall");
  line("asset_class", to_string(c.asset_class));
  line("session.open", format_clock_minutes(c.session_open));
  line("session.close", format_clock_minutes(c.session_close));
  return out;
}

ContractSpec contract_for(const SimConfig& config) {
  ContractSpec spec;
  spec.symbol = config.symbol;
  spec.tick_size = config.tick_size;
  spec.asset_class = config.asset_class;
  spec.session.open = config.session_open;
  spec.session.close = config.session_close;
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------

SimulatedDay simulate_day(const SimConfig& config, int index) {
  if (index < 0 || index >= config.days) throw DomainError("day index out of range");
  Rng rng(derive_stream_seed(config.seed, static_cast<std::uint64_t>(index)));
  SimulatedDay out;
  out.day = config.start_day + index;
  const Timestamp midnight = out.day * kNanosPerDay;

  const auto& phi = config.intensity;
  const double open_s = config.session_open * 60.0;
  const double close_s = config.session_close * 60.0;
  const double phi_max = phi.max_rate();
  const double mean_rate = (phi.cumulative(close_s) - phi.cumulative(open_s)) / (close_s - open_s);
  const double var_rate = config.latent_vol * config.latent_vol;
  const double s = config.tick_size;
  const TickPricer price_of(s);

  double t = open_s;
  double last_t = open_s;
  double last_cum = phi.cumulative(open_s);
  double x = 0.0;
  std::int64_t prev_bid = -1, prev_ask = -1;

  while (true) {
    t += rng.exponential(phi_max);
    if (t >= close_s) break;
    const double rate_t = phi.rate(t);
    if (rng.uniform() * phi_max >= rate_t) continue;

    double dvar = 0.0;
    if (config.vol_clock == VolClock::trade) {
      const double cum = phi.cumulative(t);
      dvar = var_rate * (cum - last_cum) / mean_rate;
      last_cum = cum;
    } else {
      dvar = var_rate * (t - last_t);
    }
    last_t = t;
    x += std::sqrt(dvar) * rng.normal();

    const double latent = config.start_price * std::exp(x);
    const int k = config.spread.ticks_at(latent, s);
    const auto bid = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(latent / s - 0.5 * k + 0.5)));
    const std::int64_t ask = bid + k;
    const Timestamp ts = midnight + static_cast<Timestamp>(std::llround(t * 1e9));

    if (bid != prev_bid || ask != prev_ask) {
      QuoteRecord q;
      q.timestamp = ts;
      q.bid = price_of(bid);
      q.ask = price_of(ask);
      q.bid_size = std::max<std::int64_t>(1, std::llround(std::exp(config.depth_log_mean + config.depth_log_sd * rng.normal())));
      q.ask_size = std::max<std::int64_t>(1, std::llround(std::exp(config.depth_log_mean + config.depth_log_sd * rng.normal())));
      out.quotes.push_back(q);
      prev_bid = bid;
      prev_ask = ask;
    }
    const bool buy = rng.coin();
    const auto size =
        std::max<std::int64_t>(1, std::llround(std::exp(config.size_log_mean + config.size_log_sd * rng.normal())));
    out.trades.push_back({ts, price_of(buy ? ask : bid), size});
    out.latent_log_price.push_back(x);
  }
  return out;
}

SimulatedMarket simulate_market(const SimConfig& config, Exec exec) {
  config.validate();
  std::vector<SimulatedDay> days(static_cast<std::size_t>(config.days));
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic) num_threads(thread_budget())
    for (int d = 0; d < config.days; ++d) days[static_cast<std::size_t>(d)] = simulate_day(config, d);
  } else {
    for (int d = 0; d < config.days; ++d) days[static_cast<std::size_t>(d)] = simulate_day(config, d);
  }
  SimulatedMarket m;
  std::size_t nt = 0, nq = 0;
  for (const auto& d : days) {
    nt += d.trades.size();
    nq += d.quotes.size();
  }
  m.trades.reserve(nt);
  m.quotes.reserve(nq);
  for (auto& d : days) {
    m.trades.insert(m.trades.end(), d.trades.begin(), d.trades.end());
    m.quotes.insert(m.quotes.end(), d.quotes.begin(), d.quotes.end());
  }
  return m;
}

SimulationFiles write_simulation(const SimConfig& config, const std::filesystem::path& dir, Exec exec) {
  std::filesystem::create_directories(dir);
  const auto market = simulate_market(config, exec);
  SimulationFiles files{dir / "trades.csv", dir / "quotes.csv", dir / "contract.cfg"};
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write '" + p.string() + "'");
    return f;
  };
  {
    auto f = open(files.trades);
    write_trades_csv(f, market.trades, config.tick_size);
  }
  {
    auto f = open(files.quotes);
    write_quotes_csv(f, market.quotes, config.tick_size);
  }
  {
    auto f = open(files.contract);
    f << contract_spec_text(contract_for(config));
  }
  return files;
}

// ---------------------------------------------------------------------------

std::string to_string(TickRegime r) { return r == TickRegime::small_tick ? "small_tick" : "large_tick"; }

TickRegimePrediction classify_tick_regime(const SimConfig& config, Duration tau) {
  const double seconds = std::chrono::duration<double>(tau).count();
  TickRegimePrediction p;
  p.dollar_vol_over_tick = config.start_price * config.latent_vol * std::sqrt(seconds) / config.tick_size;
  if (p.dollar_vol_over_tick > 10.0) {
    p.regime = TickRegime::small_tick;
    p.beta = 0.5;
    p.crossover = false;
  } else {
    p.regime = TickRegime::large_tick;
    p.beta = 0.25;  // rounding noise dominates at small N
    p.crossover = true;
  }
  p.gamma = 1.0;
  return p;
}

}  // namespace invlab
