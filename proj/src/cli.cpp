#include "invlab/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "CLI11.hpp"
#include "invlab/config.hpp"
#include "invlab/fitting.hpp"
#include "invlab/manifest.hpp"
#include "invlab/report.hpp"
#include "invlab/simulator.hpp"

namespace invlab {

namespace {

namespace fs = std::filesystem;

constexpr std::size_t kMaxReportedIssues = 20;

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write '" + p.string() + "'");
  return f;
}

std::ifstream open_in(const std::string& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw Error("cannot read '" + p + "'");
  return f;
}

/// Shared state for one invocation.
struct Context {
  std::vector<std::string> args;
  std::ostream& out;
  std::ostream& err;
};

RunManifest new_manifest(const Context& ctx, const std::string& command, const std::string& out_dir) {
  RunManifest m;
  m.command = command;
  m.argv = ctx.args;
  m.out_dir = out_dir;
  m.version = INVLAB_VERSION;
  return m;
}

void finish(RunManifest& m, const std::vector<std::string>& outputs) {
  const fs::path dir(m.out_dir);
  for (const auto& name : outputs) m.outputs.push_back(digest_file(dir / name, name));
  auto f = open_out(dir / ("manifest_" + m.command + ".json"));
  f << manifest_json(m);
}

template <class Issue>
void report_issues(const std::string& path, const std::vector<Issue>& issues, std::ostream& err) {
  std::size_t shown = 0;
  for (const auto& i : issues) {
    if (shown++ == kMaxReportedIssues) {
      err << path << ": " << issues.size() - kMaxReportedIssues << " more issues not shown\n";
      break;
    }
    err << path << ':' << i.line << ": "
        << (i.severity == ParseIssue::Severity::error ? "error (row rejected)" : "warning") << ": " << i.message
        << '\n';
  }
}

std::optional<VolMethod> vol_method_arg(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_vol_method(text);
}

std::vector<BinsFile> read_bins_files(const std::vector<std::string>& paths, RunManifest& m) {
  std::vector<BinsFile> files;
  for (const auto& p : paths) {
    if (!fs::exists(p)) throw Error("missing bins file: " + p);
    try {
      files.push_back(read_bins_csv(fs::path(p)));
    } catch (const ParseError& e) {
      throw Error(p + ": " + e.what());
    }
    m.inputs.push_back(digest_file(p, p));
  }
  return files;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
};

int cmd_simulate(const Context& ctx, const SimulateArgs& a) {
  auto cfg = KeyValueConfig::load(a.config);
  if (a.seed_opt->count() > 0) cfg.set("seed", std::to_string(a.seed));
  const auto sim = parse_sim_config(cfg);
  fs::create_directories(a.out);
  auto m = new_manifest(ctx, "simulate", a.out);
  m.config_paths.push_back(a.config);
  m.inputs.push_back(digest_file(a.config, a.config));
  m.seed = sim.seed;

  write_simulation(sim, a.out);
  {
    auto f = open_out(fs::path(a.out) / "sim_config.cfg");
    f << sim_config_text(sim);
  }
  finish(m, {"trades.csv", "quotes.csv", "contract.cfg", "sim_config.cfg"});
  ctx.out << "simulated " << sim.days << " day(s) of " << sim.symbol << " into " << a.out << '\n';
  return kExitOk;
}

struct BinArgs {
  std::string trades;
  std::string quotes;
  std::string contract;
  std::vector<std::string> taus;
  std::string out;
};

int cmd_bin(const Context& ctx, const BinArgs& a) {
  const auto contract = load_contract_spec(a.contract);
  std::vector<Duration> taus;
  for (const auto& t : a.taus) taus.push_back(parse_duration(t));
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

  auto m = new_manifest(ctx, "bin", a.out);
  m.config_paths.push_back(a.contract);
  m.inputs.push_back(digest_file(a.contract, a.contract));

  auto tin = open_in(a.trades);
  ParseResult<TradeRecord> trades;
  try {
    trades = parse_trades(tin, contract);
  } catch (const ParseError& e) {
    throw Error(a.trades + ": " + e.what());
  }
  report_issues(a.trades, trades.issues, ctx.err);
  m.inputs.push_back(digest_file(a.trades, a.trades));

  std::vector<QuoteRecord> quotes;
  if (!a.quotes.empty()) {
    auto qin = open_in(a.quotes);
    ParseResult<QuoteRecord> parsed;
    try {
      parsed = parse_quotes(qin);
    } catch (const ParseError& e) {
      throw Error(a.quotes + ": " + e.what());
    }
    report_issues(a.quotes, parsed.issues, ctx.err);
    quotes = std::move(parsed.records);
    m.inputs.push_back(digest_file(a.quotes, a.quotes));
  } else {
    ctx.err << "notice: no quotes given, spread and depth fields will be empty\n";
  }

  const auto kept = filter_session(group_simultaneous(trades.records), contract);
  fs::create_directories(a.out);
  std::vector<std::string> outputs;
  for (auto tau : taus) {
    const auto bins = bin_series(kept, quotes, contract, tau);
    const std::string name = "bins_" + contract.symbol + "_" + format_duration(tau) + ".csv";
    auto f = open_out(fs::path(a.out) / name);
    write_bins_csv(f, {contract.symbol, contract.tick_size, contract.asset_class, tau}, bins);
    outputs.push_back(name);
    ctx.out << name << ": " << bins.size() << " bins\n";
  }
  finish(m, outputs);
  return kExitOk;
}

struct AnalyzeArgs {
  std::vector<std::string> bins;
  std::string tau;
  std::string vol_estimator;
  double cutoff_prob = kDefaultCutoffProbability;
  std::string out;
};

int cmd_analyze(const Context& ctx, const AnalyzeArgs& a) {
  if (!(a.cutoff_prob > 0.0 && a.cutoff_prob < 1.0)) throw ConfigError("--cutoff-prob must be in (0, 1)");
  AnalysisOptions options;
  options.method = vol_method_arg(a.vol_estimator);
  options.cutoff_prob = a.cutoff_prob;

  auto m = new_manifest(ctx, "analyze", a.out);
  auto files = read_bins_files(a.bins, m);
  if (!a.tau.empty()) {
    const auto tau = parse_duration(a.tau);
    std::erase_if(files, [&](const BinsFile& f) { return f.meta.tau != tau; });
    if (files.empty()) throw ConfigError("no bins file has width " + format_duration(tau));
  }
  std::sort(files.begin(), files.end(), [](const BinsFile& x, const BinsFile& y) {
    return std::tie(x.meta.symbol, x.meta.tau) < std::tie(y.meta.symbol, y.meta.tau);
  });
  for (std::size_t i = 1; i < files.size(); ++i) {
    if (files[i].meta.symbol == files[i - 1].meta.symbol && files[i].meta.tau == files[i - 1].meta.tau)
      throw ConfigError("duplicate bins for " + files[i].meta.symbol + " at " + format_duration(files[i].meta.tau));
  }

  fs::create_directories(a.out);
  std::vector<std::string> outputs;
  Json records = Json::array();
  for (const auto& f : files) {
    SymbolAnalysis an;
    try {
      an = analyze_bins(f, options);
    } catch (const DomainError& e) {
      throw DomainError(f.meta.symbol + " " + format_duration(f.meta.tau) + ": " + e.what());
    }
    const auto stem = record_stem(f.meta.symbol, f.meta.tau);
    const std::string samples = "samples_" + stem + ".csv";
    const std::string table = "binofday_" + stem + ".csv";
    {
      auto o = open_out(fs::path(a.out) / samples);
      write_samples_csv(o, an);
    }
    {
      auto o = open_out(fs::path(a.out) / table);
      write_table_csv(o, an);
    }
    outputs.push_back(samples);
    outputs.push_back(table);
    records.push_back(analysis_json(an, a.cutoff_prob, samples, table));
    for (const auto& w : an.warnings) ctx.err << stem << ": warning: " << w << '\n';
    ctx.out << stem << ": alpha=" << format_double(an.exponents.alpha.slope) << " I=" << format_double(an.I);
    if (an.I_rescaled) ctx.out << " I/C=" << format_double(*an.I_rescaled);
    if (an.tail) ctx.out << " mu=" << format_double(an.tail->mu);
    ctx.out << '\n';
  }
  {
    Json stats;
    stats["records"] = records;
    auto o = open_out(fs::path(a.out) / "stats.json");
    o << stats.dump(2) << '\n';
  }
  outputs.push_back("stats.json");
  finish(m, outputs);
  return kExitOk;
}

struct FitArgs {
  std::vector<std::string> bins;
  double a = kDefaultNoiseLevel;
  std::string nu = "fit";
  std::string reference_tau = "5m";
  std::string vol_estimator;
  std::string out;
};

int cmd_fit(const Context& ctx, const FitArgs& a) {
  FitOptions options;
  if (!(a.a >= 0.0)) throw ConfigError("--a must be >= 0");
  options.a = a.a;
  if (a.nu != "fit") {
    try {
      options.nu = parse_double(a.nu);
    } catch (const ParseError&) {
      throw ConfigError("--nu expects 'fit' or a number, got '" + a.nu + "'");
    }
    if (!(*options.nu > 0.0)) throw ConfigError("--nu must be > 0");
  }
  options.reference_tau = parse_duration(a.reference_tau);
  options.method = vol_method_arg(a.vol_estimator);

  auto m = new_manifest(ctx, "fit", a.out);
  const auto files = read_bins_files(a.bins, m);
  const auto report = fit_master_curves(files, options);
  for (const auto& n : report.notices) ctx.err << "notice: " << n << '\n';

  fs::create_directories(a.out);
  auto outputs = write_fit_tables(report, a.out);
  {
    auto o = open_out(fs::path(a.out) / "fit_summary.json");
    o << fit_summary_json(report, options).dump(2) << '\n';
  }
  outputs.push_back("fit_summary.json");
  finish(m, outputs);
  for (const auto& c : report.contracts) {
    ctx.out << c.fit.symbol << ": N0=" << format_double(c.fit.N0) << " sigma0=" << format_double(c.fit.sigma0)
            << " Q0=" << format_double(c.fit.Q0) << " I0=" << format_double(c.fit.I0) << '\n';
  }
  ctx.out << "nu=" << format_double(report.nu) << (report.nu_fitted ? " (fitted)" : " (fixed)") << '\n';
  return kExitOk;
}

struct ReportArgs {
  std::string analysis;
  std::string fits;
  std::string out;
};

int cmd_report(const Context& ctx, const ReportArgs& a) {
  auto m = new_manifest(ctx, "report", a.out);
  const auto stats = fs::path(a.analysis) / "stats.json";
  if (!fs::exists(stats)) throw Error("missing upstream file: " + stats.string());
  m.inputs.push_back(digest_file(stats, stats.string()));
  std::optional<fs::path> fits;
  if (!a.fits.empty()) {
    fits = fs::path(a.fits);
    const auto summary = *fits / "fit_summary.json";
    if (!fs::exists(summary)) throw Error("missing upstream file: " + summary.string());
    m.inputs.push_back(digest_file(summary, summary.string()));
  }
  const auto written = write_report(a.analysis, fits, a.out);
  finish(m, written);
  ctx.out << "wrote " << written.size() << " report files into " << a.out << '\n';
  return kExitOk;
}

struct VerifyArgs {
  std::string manifest;
  bool rerun = false;
};

int cmd_verify(const Context& ctx, const VerifyArgs& a) {
  const auto m = load_manifest(a.manifest);
  std::size_t bad = 0;
  for (const auto& in : m.inputs) {
    if (!fs::exists(in.path) || sha256_file(in.path) != in.sha256) {
      ctx.err << "input changed: " << in.path << '\n';
      ++bad;
    }
  }
  fs::path dir = m.out_dir;
  fs::path scratch;
  if (a.rerun) {
    scratch = fs::temp_directory_path() / ("invlab-verify-" + sha256_hex(manifest_json(m)).substr(0, 16));
    fs::remove_all(scratch);
    auto args = m.argv;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--out" && i + 1 < args.size()) args[i + 1] = scratch.string();
      else if (args[i].rfind("--out=", 0) == 0) args[i] = "--out=" + scratch.string();
    }
    std::ostringstream sink;
    const int rc = run_cli(args, sink, ctx.err);
    if (rc != kExitOk) {
      ctx.err << "re-run of '" << m.command << "' failed with exit code " << rc << '\n';
      return kExitRuntime;
    }
    dir = scratch;
  }
  for (const auto& o : m.outputs) {
    const auto p = dir / o.path;
    if (!fs::exists(p) || sha256_file(p) != o.sha256) {
      ctx.err << "output differs: " << o.path << '\n';
      ++bad;
    }
  }
  if (!scratch.empty()) fs::remove_all(scratch);
  if (bad > 0) {
    ctx.err << bad << " digest mismatch(es)\n";
    return kExitRuntime;
  }
  ctx.out << "ok: " << m.outputs.size() << " output(s) " << (a.rerun ? "reproduced" : "verified") << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{args, out, err};
  CLI::App app{"Tick-data toolkit for trading-invariance analysis", "invlab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(INVLAB_VERSION));

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Generate a synthetic market (trades, quotes, contract spec)");
  s->add_option("--config", sim.config, "Simulator config file")->required();
  s->add_option("--out", sim.out, "Output directory")->required();
  sim.seed_opt = s->add_option("--seed", sim.seed, "Override the config seed");

  BinArgs bin;
  auto* b = app.add_subcommand("bin", "Aggregate trades and quotes into fixed-width bins");
  b->add_option("--trades", bin.trades, "Trades CSV")->required();
  b->add_option("--quotes", bin.quotes, "Quotes CSV");
  b->add_option("--contract", bin.contract, "Contract spec file")->required();
  b->add_option("--tau", bin.taus, "Bin width, e.g. 1m, 5m, 2h (repeatable)")->required();
  b->add_option("--out", bin.out, "Output directory")->required();

  AnalyzeArgs an;
  auto* a = app.add_subcommand("analyze", "Summary statistics, exponents and invariants per symbol");
  a->add_option("--bins", an.bins, "Bins CSV (repeatable)")->required();
  a->add_option("--tau", an.tau, "Only analyse files of this width");
  a->add_option("--vol-estimator", an.vol_estimator, "sq10s or rs (default by width)");
  a->add_option("--cutoff-prob", an.cutoff_prob, "Hill cutoff probability");
  a->add_option("--out", an.out, "Output directory")->required();

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit the volatility and trade-size master curves");
  f->add_option("--bins", fit.bins, "Bins CSV (repeatable)")->required();
  f->add_option("--a", fit.a, "Noise level a");
  f->add_option("--nu", fit.nu, "'fit' or a fixed exponent");
  f->add_option("--reference-tau", fit.reference_tau, "Width used for the per-contract fits");
  f->add_option("--vol-estimator", fit.vol_estimator, "sq10s or rs (default by width)");
  f->add_option("--out", fit.out, "Output directory")->required();

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Write plot-ready CSV files");
  r->add_option("--analysis", rep.analysis, "Directory written by analyze")->required();
  r->add_option("--fits", rep.fits, "Directory written by fit");
  r->add_option("--out", rep.out, "Output directory")->required();

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Check the digests recorded in a run manifest");
  v->add_option("--manifest", ver.manifest, "Manifest JSON")->required();
  v->add_flag("--rerun", ver.rerun, "Re-run the recorded command and compare outputs");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (s->parsed()) return cmd_simulate(ctx, sim);
    if (b->parsed()) return cmd_bin(ctx, bin);
    if (a->parsed()) return cmd_analyze(ctx, an);
    if (f->parsed()) return cmd_fit(ctx, fit);
    if (r->parsed()) return cmd_report(ctx, rep);
    if (v->parsed()) return cmd_verify(ctx, ver);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace invlab
