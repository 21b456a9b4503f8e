#include "invlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "invlab/scaling.hpp"

namespace invlab {

namespace {

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; }

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write '" + p.string() + "'");
  return f;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("missing upstream file: " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Rows of a small comma-separated file; '#' lines and the header are skipped.
std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& p) {
  std::istringstream in(read_text(p));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
      const auto c = line.find(',', pos);
      cells.push_back(line.substr(pos, c == std::string::npos ? std::string::npos : c - pos));
      if (c == std::string::npos) break;
      pos = c + 1;
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

Json regression_json(const RegressionResult& r) {
  return Json{{"slope", r.slope}, {"stderr", r.stderr_slope}, {"intercept", r.intercept}, {"r2", r.r2},
              {"n_points", r.n_points}};
}

}  // namespace

std::string record_stem(const std::string& symbol, Duration tau) { return symbol + "_" + format_duration(tau); }

Json analysis_json(const SymbolAnalysis& a, double cutoff_prob, const std::string& samples_file,
                   const std::string& table_file) {
  Json j;
  j["symbol"] = a.meta.symbol;
  j["tau"] = format_duration(a.meta.tau);
  j["asset_class"] = to_string(a.meta.asset_class);
  j["tick_size"] = a.meta.tick_size;
  j["vol_estimator"] = to_string(a.method);
  j["regression"] = to_string(a.mode);
  j["samples_file"] = samples_file;
  j["table_file"] = table_file;
  j["summary"] = Json{{"bins", a.bins_total},
                      {"bins_traded", a.bins_traded},
                      {"N", a.N},
                      {"V", a.V},
                      {"Q", a.Q},
                      {"P", a.P},
                      {"S", opt_json(a.spread)},
                      {"S_ticks", opt_json(a.spread_ticks)},
                      {"V_bid", opt_json(a.Vbid)},
                      {"V_ask", opt_json(a.Vask)},
                      {"C", opt_json(a.C)}};
  Json v;
  v["bins_used"] = a.bins_used;
  v["sigma"] = a.sigma;
  v["sigma_ticks"] = a.sigma_ticks;
  v["alpha"] = a.exponents.alpha.slope;
  v["stderr"] = a.exponents.alpha.stderr_slope;
  v["intercept"] = a.exponents.alpha.intercept;
  v["r2"] = a.exponents.alpha.r2;
  v["n_points"] = a.exponents.alpha.n_points;
  v["beta"] = regression_json(a.exponents.beta);
  v["gamma"] = regression_json(a.exponents.gamma);
  v["log10_N_span"] = a.exponents.log10_N_span;
  v["I"] = a.I;
  v["I_rescaled"] = opt_json(a.I_rescaled);
  v["mu"] = a.tail ? Json(a.tail->mu) : Json(nullptr);
  v["k"] = a.tail ? Json(a.tail->k) : Json(nullptr);
  v["cutoff_value"] = a.tail ? Json(a.tail->cutoff_value) : Json(nullptr);
  v["cutoff_prob"] = cutoff_prob;
  j["volatility"] = v;
  j["warnings"] = a.warnings;
  return j;
}

void write_samples_csv(std::ostream& out, const SymbolAnalysis& a) {
  out << "# symbol=" << a.meta.symbol << " tau=" << format_duration(a.meta.tau)
      << " vol_estimator=" << to_string(a.method) << "\n";
  out << "day,bin_index,N,V,P,Q,sigma,W,I\n";
  for (const auto& s : a.samples) {
    out << date_string(s.day) << ',' << s.bin_index << ',' << format_double(s.N) << ',' << format_double(s.V) << ','
        << format_double(s.P) << ',' << format_double(s.Q) << ',' << format_double(s.sigma) << ','
        << format_double(s.W) << ',' << format_double(s.I) << '\n';
  }
}

void write_table_csv(std::ostream& out, const SymbolAnalysis& a) {
  out << "# symbol=" << a.meta.symbol << " tau=" << format_duration(a.meta.tau)
      << " vol_estimator=" << to_string(a.method) << " (natural logs)\n";
  out << "bin_index,n_days,mean_log_N,mean_log_V,mean_log_Q,mean_log_P,mean_log_sigma,mean_log_W\n";
  for (const auto& t : a.table) {
    out << t.bin_index << ',' << t.n_days << ',' << format_double(t.mean_log_N) << ',' << format_double(t.mean_log_V)
        << ',' << format_double(t.mean_log_Q) << ',' << format_double(t.mean_log_P) << ','
        << format_double(t.mean_log_sigma) << ',' << format_double(t.mean_log_W) << '\n';
  }
}

Json fit_summary_json(const FitReport& r, const FitOptions& options) {
  Json j;
  j["a"] = options.a;
  j["reference_tau"] = format_duration(options.reference_tau);
  j["nu"] = r.nu;
  j["nu_fitted"] = r.nu_fitted;
  j["nu_boundary_hit"] = r.nu_boundary_hit;
  j["notices"] = r.notices;
  Json rows = Json::array();
  for (const auto& c : r.contracts) {
    rows.push_back({{"symbol", c.fit.symbol},
                    {"tau", format_duration(c.tau)},
                    {"spread_over_tick", opt_json(c.spread_over_tick)},
                    {"N0", c.fit.N0},
                    {"sigma0", c.fit.sigma0},
                    {"Q0", c.fit.Q0},
                    {"I0", c.fit.I0},
                    {"V_best", opt_json(c.V_best)},
                    {"a", c.fit.a},
                    {"nu", c.fit.nu},
                    {"rss_sigma", c.fit.rss_sigma},
                    {"rss_q", c.fit.rss_q},
                    {"weakly_identified", c.fit.weakly_identified}});
  }
  j["contracts"] = rows;
  Json taus = Json::array();
  for (const auto& t : r.tau_rows) {
    taus.push_back({{"symbol", t.symbol}, {"binsize", format_duration(t.tau)}, {"sigma0", t.sigma0}, {"Q0", t.Q0},
                    {"I0", t.I0}});
  }
  j["tau_fits"] = taus;
  auto series = [](const std::vector<CollapseSeries>& list) {
    Json arr = Json::array();
    for (const auto& s : list) {
      Json n = Json::array(), y = Json::array();
      for (const auto& p : s.points) {
        n.push_back(p.n);
        y.push_back(p.y);
      }
      arr.push_back({{"symbol", s.symbol}, {"tau", format_duration(s.tau)}, {"curve", to_string(s.kind)},
                     {"n", n}, {"y", y}});
    }
    return arr;
  };
  j["collapse_across_contracts"] = series(r.across_contracts);
  j["collapse_across_tau"] = series(r.across_tau);
  return j;
}

std::vector<std::string> write_fit_tables(const FitReport& r, const std::filesystem::path& dir) {
  std::vector<std::string> written;
  {
    auto f = open_out(dir / "fits_contracts.csv");
    f << "symbol,spread_over_tick,N0,sigma0,Q0,I0,V_best\n";
    for (const auto& c : r.contracts) {
      f << c.fit.symbol << ',' << opt_text(c.spread_over_tick) << ',' << format_double(c.fit.N0) << ','
        << format_double(c.fit.sigma0) << ',' << format_double(c.fit.Q0) << ',' << format_double(c.fit.I0) << ','
        << opt_text(c.V_best) << '\n';
    }
    written.push_back("fits_contracts.csv");
  }
  std::map<std::string, std::vector<const TauFitRow*>> by_symbol;
  for (const auto& t : r.tau_rows) by_symbol[t.symbol].push_back(&t);
  for (const auto& [symbol, rows] : by_symbol) {
    const std::string name = "fit_tau_" + symbol + ".csv";
    auto f = open_out(dir / name);
    f << "binsize,sigma0,Q0,I0\n";
    for (const auto* t : rows) {
      f << format_duration(t->tau) << ',' << format_double(t->sigma0) << ',' << format_double(t->Q0) << ','
        << format_double(t->I0) << '\n';
    }
    written.push_back(name);
  }
  {
    auto f = open_out(dir / "collapse_contracts.csv");
    f << "symbol,curve,n,y\n";
    for (const auto& s : r.across_contracts) {
      for (const auto& p : s.points)
        f << s.symbol << ',' << to_string(s.kind) << ',' << format_double(p.n) << ',' << format_double(p.y) << '\n';
    }
    written.push_back("collapse_contracts.csv");
  }
  std::map<std::string, std::vector<const CollapseSeries*>> tau_by_symbol;
  for (const auto& s : r.across_tau) tau_by_symbol[s.symbol].push_back(&s);
  for (const auto& [symbol, list] : tau_by_symbol) {
    const std::string name = "collapse_tau_" + symbol + ".csv";
    auto f = open_out(dir / name);
    f << "binsize,curve,n,y\n";
    for (const auto* s : list) {
      for (const auto& p : s->points)
        f << format_duration(s->tau) << ',' << to_string(s->kind) << ',' << format_double(p.n) << ','
          << format_double(p.y) << '\n';
    }
    written.push_back(name);
  }
  return written;
}

// ---------------------------------------------------------------------------

namespace {

struct Record {
  Json stats;
  std::string stem;
  std::vector<std::vector<std::string>> samples;
  std::vector<std::vector<std::string>> table;
};

double cell(const std::vector<std::string>& row, std::size_t i) { return parse_double(row.at(i)); }

void write_wn_scatter(const std::vector<Record>& recs, const std::filesystem::path& out) {
  auto f = open_out(out);
  f << "# log10 W against log10 N. bin_of_day rows are across-day averages of\n"
       "# logs per intraday bin; per_bin rows are single bins.\n";
  for (const auto& r : recs) {
    f << "# " << r.stats["symbol"].get<std::string>() << ' ' << r.stats["tau"].get<std::string>()
      << " alpha=" << format_double(r.stats["volatility"]["alpha"].get<double>())
      << " stderr=" << format_double(r.stats["volatility"]["stderr"].get<double>()) << '\n';
  }
  f << "symbol,tau,mode,log10_N,log10_W\n";
  for (const auto& r : recs) {
    const auto sym = r.stats["symbol"].get<std::string>();
    const auto tau = r.stats["tau"].get<std::string>();
    if (r.stats["regression"] == "bin_of_day") {
      for (const auto& row : r.table) {
        f << sym << ',' << tau << ",bin_of_day," << format_double(cell(row, 2) * std::numbers::log10e) << ','
          << format_double(cell(row, 7) * std::numbers::log10e) << '\n';
      }
    } else {
      for (const auto& row : r.samples) {
        f << sym << ',' << tau << ",per_bin," << format_double(std::log10(cell(row, 2))) << ','
          << format_double(std::log10(cell(row, 7))) << '\n';
      }
    }
  }
}

void write_ccdf(const Record& r, const std::filesystem::path& out) {
  std::vector<double> values;
  for (const auto& row : r.samples) values.push_back(cell(row, 8));
  const Ccdf ccdf(values);
  std::optional<double> scale;
  if (ccdf.sample_count() >= 1000) scale = rescale_ccdf(ccdf).x_scale;
  auto f = open_out(out);
  const auto& v = r.stats["volatility"];
  f << "# survival function of the invariant I (dollars), "
    << r.stats["symbol"].get<std::string>() << ' ' << r.stats["tau"].get<std::string>() << '\n';
  f << "# samples=" << ccdf.sample_count() << " mean_I=" << format_double(v["I"].get<double>());
  if (!v["mu"].is_null()) f << " mu=" << format_double(v["mu"].get<double>()) << " k=" << v["k"].get<std::size_t>();
  f << '\n';
  if (scale) f << "# x_0.001=" << format_double(*scale) << " (x_rescaled = x / x_0.001)\n";
  else f << "# fewer than 1000 samples: x_rescaled left empty\n";
  f << "# p_at_least = P(I >= x), p_above = P(I > x)\n";
  f << "x,x_rescaled,p_at_least,p_above\n";
  for (const auto& p : ccdf.points()) {
    f << format_double(p.x) << ',' << (scale ? format_double(p.x / *scale) : std::string{}) << ','
      << format_double(p.p_at_least) << ',' << format_double(p.p_above) << '\n';
  }
}

void write_rolling(const Record& r, const std::filesystem::path& out) {
  std::vector<double> n, w;
  for (const auto& row : r.samples) {
    n.push_back(cell(row, 2));
    w.push_back(cell(row, 7));
  }
  const auto pts = rolling_log_average(n, w, 100);
  auto f = open_out(out);
  f << "# centred rolling mean (window 100) of log10 W along log10 N, display only;\n";
  f << "# alpha=" << format_double(r.stats["volatility"]["alpha"].get<double>())
    << " comes from the regression on unsmoothed bins\n";
  f << "log10_N,log10_W\n";
  for (const auto& p : pts) f << format_double(p.log_x) << ',' << format_double(p.log_y) << '\n';
}

void write_signature(const Record& r, const std::filesystem::path& out) {
  const double tick = r.stats["tick_size"].get<double>();
  std::vector<std::pair<double, double>> pts;  // N, sigma_ticks^2 / N
  if (r.stats["regression"] == "bin_of_day") {
    for (const auto& row : r.table) {
      const double N = std::exp(cell(row, 2));
      const double s = std::exp(cell(row, 6) + cell(row, 5)) / tick;
      pts.push_back({N, s * s / N});
    }
  } else {
    for (const auto& row : r.samples) {
      const double N = cell(row, 2);
      const double s = cell(row, 6) * cell(row, 4) / tick;
      pts.push_back({N, s * s / N});
    }
  }
  auto f = open_out(out);
  f << "# signature plot: sigma^2 / N with sigma in ticks. kind=binned rows are\n"
       "# log-means over consecutive quarter-decade bins of N.\n";
  f << "kind,N,sigma2_over_N\n";
  for (const auto& [N, y] : pts) f << "point," << format_double(N) << ',' << format_double(y) << '\n';
  std::map<long, std::pair<double, double>> bins;
  std::map<long, int> counts;
  for (const auto& [N, y] : pts) {
    const long k = static_cast<long>(std::floor(std::log10(N) * 4.0));
    bins[k].first += std::log(N);
    bins[k].second += std::log(y);
    ++counts[k];
  }
  for (const auto& [k, acc] : bins) {
    const double c = counts[k];
    f << "binned," << format_double(std::exp(acc.first / c)) << ',' << format_double(std::exp(acc.second / c)) << '\n';
  }
}

void write_fit_panels(const Json& fits, const std::filesystem::path& dir, std::vector<std::string>& written) {
  const double a = fits["a"].get<double>();
  const double nu = fits["nu"].get<double>();
  {
    const std::string name = "master_curves.csv";
    auto f = open_out(dir / name);
    f << "# model master curves with a=" << format_double(a) << " nu=" << format_double(nu) << "\n";
    f << "n,sigma_over_sigma0,q_over_Q0,itilde_over_I0\n";
    for (int i = 0; i <= 60; ++i) {
      const double n = std::pow(10.0, -3.0 + 0.1 * i);
      f << format_double(n) << ',' << format_double(sigma_model(n, 1.0, 1.0, a)) << ','
        << format_double(q_model(n, 1.0, 1.0, nu)) << ',' << format_double(itilde_model(n, 1.0, a, nu)) << '\n';
    }
    written.push_back(name);
  }
  for (const char* curve : {"sigma", "q", "itilde"}) {
    const std::string name = std::string("collapse_contracts_") + curve + ".csv";
    auto f = open_out(dir / name);
    f << "# rescaled curves across contracts at the reference width; n = N/N0\n";
    f << "symbol,n,y\n";
    for (const auto& s : fits["collapse_across_contracts"]) {
      if (s["curve"] != curve) continue;
      for (std::size_t i = 0; i < s["n"].size(); ++i)
        f << s["symbol"].get<std::string>() << ',' << format_double(s["n"][i].get<double>()) << ','
          << format_double(s["y"][i].get<double>()) << '\n';
    }
    written.push_back(name);
  }
  std::map<std::string, std::vector<const Json*>> by_symbol;
  for (const auto& s : fits["collapse_across_tau"]) by_symbol[s["symbol"].get<std::string>()].push_back(&s);
  for (const auto& [symbol, list] : by_symbol) {
    for (const char* curve : {"sigma", "q", "itilde"}) {
      const std::string name = "collapse_tau_" + symbol + "_" + curve + ".csv";
      auto f = open_out(dir / name);
      f << "# rescaled curves across bin widths for " << symbol << ", N0 fixed at the reference width\n";
      f << "binsize,n,y\n";
      for (const auto* s : list) {
        if ((*s)["curve"] != curve) continue;
        for (std::size_t i = 0; i < (*s)["n"].size(); ++i)
          f << (*s)["tau"].get<std::string>() << ',' << format_double((*s)["n"][i].get<double>()) << ','
            << format_double((*s)["y"][i].get<double>()) << '\n';
      }
      written.push_back(name);
    }
  }
  {
    const std::string name = "q0_vs_depth.csv";
    auto f = open_out(dir / name);
    f << "# fitted Q0 against V_best = (V_bid + V_ask) / 2\n";
    f << "symbol,V_best,Q0\n";
    for (const auto& c : fits["contracts"]) {
      f << c["symbol"].get<std::string>() << ','
        << (c["V_best"].is_null() ? std::string{} : format_double(c["V_best"].get<double>())) << ','
        << format_double(c["Q0"].get<double>()) << '\n';
    }
    written.push_back(name);
  }
}

}  // namespace

std::vector<std::string> write_report(const std::filesystem::path& analysis_dir,
                                      const std::optional<std::filesystem::path>& fits_dir,
                                      const std::filesystem::path& out_dir) {
  Json stats;
  const auto stats_path = analysis_dir / "stats.json";
  try {
    stats = Json::parse(read_text(stats_path));
  } catch (const Json::parse_error& e) {
    throw ParseError(stats_path.string() + ": " + e.what());
  }
  Json fits;
  if (fits_dir) {
    const auto p = *fits_dir / "fit_summary.json";
    try {
      fits = Json::parse(read_text(p));
    } catch (const Json::parse_error& e) {
      throw ParseError(p.string() + ": " + e.what());
    }
  }

  std::vector<Record> recs;
  for (const auto& s : stats["records"]) {
    Record r;
    r.stats = s;
    r.stem = record_stem(s["symbol"].get<std::string>(), parse_duration(s["tau"].get<std::string>()));
    r.samples = read_rows(analysis_dir / s["samples_file"].get<std::string>());
    r.table = read_rows(analysis_dir / s["table_file"].get<std::string>());
    recs.push_back(std::move(r));
  }

  std::filesystem::create_directories(out_dir);
  std::vector<std::string> written;
  write_wn_scatter(recs, out_dir / "wn_scatter.csv");
  written.push_back("wn_scatter.csv");
  for (const auto& r : recs) {
    if (!r.samples.empty()) {
      write_ccdf(r, out_dir / ("ccdf_invariant_" + r.stem + ".csv"));
      written.push_back("ccdf_invariant_" + r.stem + ".csv");
    }
    if (r.stats["regression"] == "per_bin" && !r.samples.empty()) {
      write_rolling(r, out_dir / ("rolling_wn_" + r.stem + ".csv"));
      written.push_back("rolling_wn_" + r.stem + ".csv");
    }
    write_signature(r, out_dir / ("signature_" + r.stem + ".csv"));
    written.push_back("signature_" + r.stem + ".csv");
  }
  {
    auto f = open_out(out_dir / "invariant_vs_tau.csv");
    f << "# I / C against bin width; C is the pooled trade-level log-mean of S*Q\n";
    f << "# reference ranges of I/C: futures 0.30 +- 0.09, stocks 0.86 +- 0.54\n";
    f << "symbol,asset_class,tau_minutes,I,C,I_over_C\n";
    for (const auto& r : recs) {
      const auto& s = r.stats;
      const double minutes =
          std::chrono::duration<double, std::ratio<60>>(parse_duration(s["tau"].get<std::string>())).count();
      f << s["symbol"].get<std::string>() << ',' << s["asset_class"].get<std::string>() << ','
        << format_double(minutes) << ',' << format_double(s["volatility"]["I"].get<double>()) << ','
        << (s["summary"]["C"].is_null() ? std::string{} : format_double(s["summary"]["C"].get<double>())) << ','
        << (s["volatility"]["I_rescaled"].is_null() ? std::string{}
                                                    : format_double(s["volatility"]["I_rescaled"].get<double>()))
        << '\n';
    }
    written.push_back("invariant_vs_tau.csv");
  }
  {
    auto f = open_out(out_dir / "invariant_vs_cost.csv");
    f << "# mean invariant, spread cost and tail exponent per record\n";
    f << "symbol,tau,asset_class,spread_over_tick,C,I,I_rescaled,mu\n";
    auto num = [](const Json& v) { return v.is_null() ? std::string{} : format_double(v.get<double>()); };
    for (const auto& r : recs) {
      const auto& s = r.stats;
      f << s["symbol"].get<std::string>() << ',' << s["tau"].get<std::string>() << ','
        << s["asset_class"].get<std::string>() << ',' << num(s["summary"]["S_ticks"]) << ','
        << num(s["summary"]["C"]) << ',' << num(s["volatility"]["I"]) << ',' << num(s["volatility"]["I_rescaled"])
        << ',' << num(s["volatility"]["mu"]) << '\n';
    }
    written.push_back("invariant_vs_cost.csv");
  }
  if (fits_dir) write_fit_panels(fits, out_dir, written);
  std::sort(written.begin(), written.end());
  return written;
}

}  // namespace invlab
