// Synthetic tick market used as a verification oracle.
//
// A latent log-price performs Brownian motion; trades arrive as an
// inhomogeneous Poisson process with a periodic intraday intensity; each
// trade prints at the bid or the ask of a tick-aligned quote straddling the
// latent price. With the default trade-clock volatility the latent variance
// accrued between two instants is proportional to the expected number of
// trades between them, so binned volatility scales as sqrt(N) across the day.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invlab/ingest.hpp"
#include "invlab/parallel.hpp"

namespace invlab {

class KeyValueConfig;

/// Periodic piecewise log-linear intensity phi(t) in trades per second,
/// defined by knots (seconds after midnight, rate). The last knot wraps to
/// the first one at the next midnight.
class IntensityProfile {
 public:
  struct Knot {
    double second = 0.0;
    double rate = 0.0;
  };

  IntensityProfile() : IntensityProfile(std::vector<Knot>{{0.0, 1.0}}) {}
  explicit IntensityProfile(std::vector<Knot> knots);

  static IntensityProfile constant(double rate);

  /// Low activity overnight (Asia), intermediate in the European morning,
  /// `high` during the American afternoon, with one-hour log-linear
  /// transitions between them.
  static IntensityProfile three_session(double low, double high);

  double rate(double second) const;
  /// Integral of phi over [0, second], second in [0, 86400].
  double cumulative(double second) const;
  double max_rate() const { return max_rate_; }
  double min_rate() const { return min_rate_; }
  const std::vector<Knot>& knots() const { return knots_; }

  /// Round-trip text form "HH:MM=rate,HH:MM=rate,...".
  std::string to_text() const;
  static IntensityProfile parse(std::string_view text);

 private:
  std::vector<Knot> knots_;  // extended with a wrap-around knot at 86400
  double max_rate_ = 0.0;
  double min_rate_ = 0.0;
};

enum class SpreadKind { one_tick, const_ticks, proportional };

struct SpreadModel {
  SpreadKind kind = SpreadKind::one_tick;
  int ticks = 1;       // const_ticks
  double bps = 0.0;    // proportional: spread ~ bps * 1e-4 * price, at least one tick

  /// Spread in ticks at price `price`.
  int ticks_at(double price, double tick_size) const;
};

/// Clock that drives the latent variance: `trade` accrues variance in
/// proportion to expected trade count (mean rate equals latent_vol^2 per
/// second over the session), `wall` accrues latent_vol^2 per second.
enum class VolClock { trade, wall };

struct SimConfig {
  std::string symbol = "SIM";
  std::uint64_t seed = 0;
  int days = 1;
  std::int64_t start_day = 19723;   // 2024-01-01
  double latent_vol = 0.0;          // log-price units per sqrt(second)
  double tick_size = 0.0;
  double start_price = 0.0;
  IntensityProfile intensity;
  double size_log_mean = 2.0;       // lognormal trade size
  double size_log_sd = 0.8;
  double depth_log_mean = 4.0;      // lognormal quoted depth
  double depth_log_sd = 0.5;
  SpreadModel spread;
  VolClock vol_clock = VolClock::trade;
  AssetClass asset_class = AssetClass::future;
  int session_open = 0;             // minutes after midnight
  int session_close = 1440;

  void validate() const;
};

/// Required keys: seed, days, latent_vol, tick_size, start_price. See the
/// README for the optional ones.
SimConfig parse_sim_config(const KeyValueConfig& cfg);
SimConfig load_sim_config(const std::filesystem::path& path);
std::string sim_config_text(const SimConfig& config);

/// Contract matching the simulated market (session taken from the config).
ContractSpec contract_for(const SimConfig& config);

struct SimulatedDay {
  std::int64_t day = 0;
  std::vector<TradeRecord> trades;
  std::vector<QuoteRecord> quotes;
  std::vector<double> latent_log_price;  // log(latent / start_price), one per trade
};

/// Day `index` (0-based) of the run; uses its own random stream derived
/// from (seed, index), so any subset of days can be generated independently.
SimulatedDay simulate_day(const SimConfig& config, int index);

struct SimulatedMarket {
  std::vector<TradeRecord> trades;
  std::vector<QuoteRecord> quotes;
};

/// All days, generated in parallel and concatenated in day order.
SimulatedMarket simulate_market(const SimConfig& config, Exec exec = Exec::parallel);

struct SimulationFiles {
  std::filesystem::path trades;
  std::filesystem::path quotes;
  std::filesystem::path contract;
};

/// Writes trades.csv, quotes.csv and contract.cfg into `dir`.
SimulationFiles write_simulation(const SimConfig& config, const std::filesystem::path& dir,
                                 Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

enum class TickRegime { small_tick, large_tick };
std::string to_string(TickRegime r);

struct TickRegimePrediction {
  TickRegime regime = TickRegime::small_tick;
  double dollar_vol_over_tick = 0.0;  // latent dollar volatility per bin / tick
  double beta = 0.5;                  // expected below any crossover
  double gamma = 1.0;
  bool crossover = false;
};

/// Small tick when the latent dollar volatility over `tau` exceeds ten ticks.
TickRegimePrediction classify_tick_regime(const SimConfig& config, Duration tau);

}  // namespace invlab
