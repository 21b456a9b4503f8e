// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Pass criterion numbers as arguments to
// run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "invlab/analysis.hpp"
#include "invlab/cli.hpp"
#include "invlab/estimators.hpp"
#include "invlab/manifest.hpp"
#include "invlab/mastercurve.hpp"
#include "invlab/pipeline.hpp"
#include "invlab/rng.hpp"
#include "invlab/scaling.hpp"
#include "oracle_values.hpp"
#include "support/synthetic.hpp"

using namespace invlab;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
    if (!ok) {
      pass = false;
      detail += " [fail]";
    }
  }
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Small-tick market: the tick is far below the per-bin price move.
SimConfig small_tick_config() {
  SimConfig c;
  c.symbol = "SMALL";
  c.seed = 7;
  c.days = 60;
  c.latent_vol = 0.01 / std::sqrt(86400.0);
  c.tick_size = 1e-5;
  c.start_price = 100.0;
  c.intensity = IntensityProfile::three_session(0.5, 16.0);
  return c;
}

// Large-tick market: per-trade latent variance 6.25e-9. One-minute bins in
// the quiet session carry about 0.15 tick of latent dollar volatility and
// four-hour bins in the busy session several ticks, so the sampled N range
// straddles the crossover.
SimConfig large_tick_config() {
  SimConfig c = small_tick_config();
  c.symbol = "LARGE";
  c.days = 20;
  c.tick_size = 0.25;
  const double mean_rate = c.intensity.cumulative(86400.0) / 86400.0;
  c.latent_vol = std::sqrt(6.25e-9 * mean_rate);
  return c;
}

// ---------------------------------------------------------------------------

Outcome identities() {
  Outcome o;
  Rng rng(2024);
  double worst_dual = 0.0, worst_curve = 0.0, worst_i0 = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    const double P = std::exp(1.0 + 4.0 * rng.uniform());
    const auto N = static_cast<std::int64_t>(1 + std::floor(std::exp(12.0 * rng.uniform())));
    const double Q = std::exp(5.0 * rng.uniform());
    const double V = Q * static_cast<double>(N);
    const double sigma = std::exp(-9.0 + 6.0 * rng.uniform());
    const double lhs = invariant_I_from_trade_size(P, sigma, Q, V);
    const double rhs = invariant_I(P, V, sigma, N).I;
    worst_dual = std::max(worst_dual, rel(lhs, rhs));

    const double sigma0 = std::exp(rng.normal()), N0 = std::exp(1.0 + 8.0 * rng.uniform());
    const double Q0 = std::exp(4.0 * rng.uniform()), nu = kNuLower + (kNuUpper - kNuLower) * rng.uniform();
    const double a = rng.uniform();
    const double n = std::exp(-8.0 + 16.0 * rng.uniform());
    const double Nn = n * N0;
    const double product = q_model(Nn, Q0, N0, nu) * sigma_model(Nn, sigma0, N0, a) / std::sqrt(Nn);
    const double I0 = asymptotic_invariant(Q0, sigma0, N0);
    worst_curve = std::max(worst_curve, rel(itilde_model(n, I0, a, nu), product));

    SigmaFit sf;
    sf.sigma0 = sigma0;
    sf.N0 = N0;
    sf.a = a;
    QFit qf;
    qf.Q0 = Q0;
    worst_i0 = std::max(worst_i0, rel(make_master_fit(sf, qf, nu).I0, Q0 * sigma0 / std::sqrt(N0)));
  }
  o.check(worst_dual <= 1e-12, "dual form max rel err " + num(worst_dual, 3));
  o.check(worst_curve <= 1e-12, "I~ recombination max rel err " + num(worst_curve, 3));
  o.check(worst_i0 <= 1e-12, "I0 max rel err " + num(worst_i0, 3));
  const double row = asymptotic_invariant(oracle::kRowQ0, oracle::kRowSigma0, oracle::kRowN0);
  o.check(rel(row, oracle::kRowI0Printed) <= 0.01, "row I0 " + num(row, 6) + " vs 2.65");
  return o;
}

// Criteria 2 and 3 share one 60-day simulation.
struct SmallTickRun {
  ThreeHalvesOracle result;
  double intensity_decades = 0.0;
};

const SmallTickRun& small_tick_run() {
  static const SmallTickRun run = [] {
    const auto c = small_tick_config();
    SmallTickRun r;
    r.intensity_decades = std::log10(c.intensity.max_rate() / c.intensity.min_rate());
    r.result = oracle_three_halves(c, 5min);
    return r;
  }();
  return run;
}

Outcome three_halves() {
  Outcome o;
  const auto& r = small_tick_run();
  o.check(small_tick_config().days >= 60, "days 60");
  o.check(r.intensity_decades >= 1.5, "intensity spans " + num(r.intensity_decades, 3) + " decades");
  o.check(r.result.regime.regime == TickRegime::small_tick, "regime " + to_string(r.result.regime.regime));
  const double alpha = r.result.exponents.alpha.slope;
  o.check(std::abs(alpha - 1.5) <= 0.05, "alpha " + num(alpha, 5) + " (1.50 +- 0.05)");
  return o;
}

Outcome diffusive_exponents() {
  Outcome o;
  const auto& e = small_tick_run().result.exponents;
  o.check(std::abs(e.beta.slope - 0.5) <= 0.03, "beta " + num(e.beta.slope, 5) + " (0.50 +- 0.03)");
  o.check(std::abs(e.gamma.slope - 1.0) <= 0.03, "gamma " + num(e.gamma.slope, 5) + " (1.00 +- 0.03)");
  return o;
}

Outcome subdiffusion() {
  Outcome o;
  const auto c = large_tick_config();
  const auto regime = classify_tick_regime(c, 5min);
  o.check(regime.regime == TickRegime::large_tick,
          "5m dollar vol / tick " + num(regime.dollar_vol_over_tick, 3));
  const Duration taus[] = {1min, 2min, 5min, 10min, 30min, 60min, 120min, 240min};
  const auto pts = oracle_subdiffusion(c, taus, VolMethod::rogers_satchell);
  double nmin = pts.front().N, nmax = pts.front().N;
  for (const auto& p : pts) {
    nmin = std::min(nmin, p.N);
    nmax = std::max(nmax, p.N);
  }
  const auto vc = visual_crossover(pts, 3.0 * nmin, nmax / 10.0);
  const double nx = vc.N_cross;
  const auto below = sigma_slope(pts, 0.0, nx / 3.0);
  const auto above = sigma_slope(pts, 30.0 * nx, nmax);
  o.check(below.slope < 0.45, "slope below crossover " + num(below.slope, 3) + " (" +
                                  std::to_string(below.n_points) + " pts, < 0.45)");
  o.check(std::abs(above.slope - 0.5) <= 0.03, "slope above " + num(above.slope, 4) + " (" +
                                                   std::to_string(above.n_points) + " pts, 0.50 +- 0.03)");
  std::vector<CurvePoint> cp;
  for (const auto& p : pts) cp.push_back({p.N, p.sigma});
  const auto fit = fit_sigma_curve(cp);
  const double decades = std::abs(std::log10(fit.N0 / nx));
  o.check(decades <= 1.0, "fitted N0 " + num(fit.N0) + " vs visual " + num(nx) + " (" + num(decades, 3) +
                              " decades)");
  return o;
}

Outcome parameter_recovery() {
  Outcome o;
  testing::CurveTruth truth{oracle::kRowSigma0, oracle::kRowN0, oracle::kRowQ0, 0.54};
  // 4000 points over two decades of N centred on N0, 10% lognormal noise on
  // sigma and Q
  const auto s = testing::sample_curves(truth, truth.N0 / 10.0, truth.N0 * 10.0, 4000, 0.10, 31);
  const auto sf = fit_sigma_curve(testing::sigma_points(s));
  std::vector<ContractQData> q{{"SPMINI", testing::q_points(s), sf.N0}};
  const auto nf = fit_global_nu(q);
  const auto qf = fit_q_curve(q.front().points, sf.N0, nf.nu);
  o.check(rel(sf.sigma0, truth.sigma0) <= 0.10, "sigma0 " + num(sf.sigma0));
  o.check(rel(sf.N0, truth.N0) <= 0.10, "N0 " + num(sf.N0));
  o.check(rel(qf.Q0, truth.Q0) <= 0.10, "Q0 " + num(qf.Q0));
  o.check(std::abs(nf.nu - truth.nu) <= 0.05, "nu " + num(nf.nu));
  return o;
}

Outcome hill() {
  Outcome o;
  for (double mu : {1.5, 2.5, 4.0}) {
    double sum = 0.0, worst = 0.0;
    int within = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(derive_stream_seed(seed, static_cast<std::uint64_t>(mu * 10)));
      std::vector<double> x(100'000);
      for (auto& v : x) v = rng.pareto(mu);
      const double est = hill_tail_exponent(x, 0.01).mu;
      sum += est;
      worst = std::max(worst, rel(est, mu));
      within += rel(est, mu) <= 0.04;
    }
    const double mean = sum / 20.0;
    o.check(rel(mean, mu) <= 0.04, "mu " + num(mu, 2) + ": mean " + num(mean, 4) + ", " + std::to_string(within) +
                                       "/20 seeds within 4%, worst " + num(100 * worst, 3) + "%");
  }
  return o;
}

Outcome rogers_satchell() {
  Outcome o;
  bool zero = true;
  for (double lo : {1.0, 17.5, 250.0}) {
    for (double up : {1.001, 1.3, 4.0}) {
      zero = zero && rogers_satchell_variance(lo, lo * up, lo, lo * up) == 0.0;
      zero = zero && rogers_satchell_variance(lo * up, lo * up, lo, lo) == 0.0;
    }
  }
  o.check(zero, "monotone bars give exactly 0");
  // 1e4 bars per drift; extremes follow the continuous-path law
  constexpr int bars = 10'000, steps = 100;
  for (double drift : {0.0, 1.0, 2.5, 5.0}) {
    Rng rng(derive_stream_seed(77, static_cast<std::uint64_t>(drift * 10)));
    const double vol = 0.02;
    double sum = 0.0;
    for (int b = 0; b < bars; ++b) {
      const auto bar = testing::brownian_bar(rng, 50.0, vol, drift * vol, steps);
      sum += rogers_satchell_variance(bar.open, bar.high, bar.low, bar.close);
    }
    const double ratio = sum / bars / (vol * vol);
    o.check(std::abs(ratio - 1.0) <= 0.05, "drift " + num(drift, 2) + ": mean/true " + num(ratio, 4));
  }
  return o;
}

Outcome collapse_property() {
  Outcome o;
  const testing::CurveTruth A{1.34, 156.88, 24.77, 0.54}, B{0.6, 3000.0, 5.0, 0.54};
  const auto sa = testing::sample_curves(A, 1.0, 1e5, 5000, 0.10, 81);
  const auto sb = testing::sample_curves(B, 20.0, 2e6, 5000, 0.10, 82);
  const auto fa = fit_sigma_curve(testing::sigma_points(sa));
  const auto fb = fit_sigma_curve(testing::sigma_points(sb));
  std::vector<ContractQData> q{{"A", testing::q_points(sa), fa.N0}, {"B", testing::q_points(sb), fb.N0}};
  const auto nf = fit_global_nu(q);
  const auto ma = make_master_fit(fa, fit_q_curve(q[0].points, fa.N0, nf.nu), nf.nu);
  const auto mb = make_master_fit(fb, fit_q_curve(q[1].points, fb.N0, nf.nu), nf.nu);
  for (auto kind : {CurveKind::sigma, CurveKind::trade_size, CurveKind::invariant}) {
    const double d = max_binned_log_distance(collapse(sa, ma, kind), collapse(sb, mb, kind));
    o.check(d < 0.05, to_string(kind) + " distance " + num(d, 3));
  }
  MasterCurveFit raw;
  raw.sigma0 = raw.N0 = raw.Q0 = raw.I0 = 1.0;
  const double before = max_binned_log_distance(collapse(sa, raw, CurveKind::sigma), collapse(sb, raw, CurveKind::sigma));
  o.check(before > 0.05, "unscaled sigma distance " + num(before, 3));
  return o;
}

// ---------------------------------------------------------------------------

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int rc = run_cli(args, out, err);
  if (rc != 0) std::fprintf(stderr, "invlab %s failed: %s\n", args.front().c_str(), err.str().c_str());
  return rc;
}

// Runs simulate -> bin -> analyze -> fit -> report into `dir`.
bool full_pipeline(const fs::path& dir, const fs::path& config) {
  const auto s = (dir / "sim").string(), b = (dir / "bins").string();
  if (cli({"simulate", "--config", config.string(), "--out", s}) != 0) return false;
  if (cli({"bin", "--trades", s + "/trades.csv", "--quotes", s + "/quotes.csv", "--contract", s + "/contract.cfg",
           "--tau", "1m", "--tau", "5m", "--tau", "30m", "--tau", "2h", "--out", b}) != 0)
    return false;
  std::vector<std::string> bins;
  for (const char* t : {"1m", "5m", "30m", "2h"}) {
    bins.push_back("--bins");
    bins.push_back(b + "/bins_DET_" + t + ".csv");
  }
  auto with = [&](std::vector<std::string> head, std::vector<std::string> tail) {
    head.insert(head.end(), bins.begin(), bins.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  };
  if (cli(with({"analyze"}, {"--out", (dir / "analysis").string()})) != 0) return false;
  if (cli(with({"fit"}, {"--vol-estimator", "rs", "--out", (dir / "fits").string()})) != 0) return false;
  return cli({"report", "--analysis", (dir / "analysis").string(), "--fits", (dir / "fits").string(), "--out",
              (dir / "report").string()}) == 0;
}

// Relative path -> digest for every artifact. Manifests are compared on
// their recorded output digests, since argv differs by directory.
std::map<std::string, std::string> artifact_digests(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto relpath = fs::relative(e.path(), dir).string();
    if (e.path().filename().string().rfind("manifest_", 0) == 0) {
      const auto m = load_manifest(e.path());
      for (const auto& f : m.outputs) out[relpath + "#" + f.path] = f.sha256;
    } else {
      out[relpath] = sha256_file(e.path());
    }
  }
  return out;
}

Outcome determinism() {
  Outcome o;
  const auto root = fs::temp_directory_path() / "invlab_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto config = root / "det.cfg";
  std::ofstream(config) << "symbol = DET\nseed = 99\ndays = 4\ntick_size = 0.25\nstart_price = 100\n"
                           "latent_vol = 0.00018920985171505796\nintensity.profile = three_session\n"
                           "intensity.low = 0.5\nintensity.high = 16\n";
  std::map<std::string, std::map<std::string, std::string>> runs;
  for (auto [name, threads] : {std::pair{"a", 1}, {"b", 1}, {"c", 4}}) {
    ScopedThreadBudget budget(threads);
    const auto dir = root / name;
    if (!full_pipeline(dir, config)) {
      o.check(false, std::string("pipeline run ") + name);
      return o;
    }
    runs[name] = artifact_digests(dir);
  }
  o.check(runs["a"].size() > 20, std::to_string(runs["a"].size()) + " artifacts");
  o.check(runs["a"] == runs["b"], "same seed twice identical");
  o.check(runs["a"] == runs["c"], "1 vs 4 threads identical");
  fs::remove_all(root);
  return o;
}

Outcome redenomination() {
  Outcome o;
  auto c = small_tick_config();
  c.days = 6;
  c.tick_size = 0.01;
  const auto market = simulate_market(c);
  const auto contract = contract_for(c);
  auto analyze_at = [&](double lambda) {
    auto trades = market.trades;
    auto quotes = market.quotes;
    redenominate(trades, quotes, lambda);
    auto spec = contract;
    spec.tick_size *= lambda;
    const auto bins = bin_series(group_simultaneous(trades), quotes, spec, 5min);
    return analyze_bins({{c.symbol, spec.tick_size, spec.asset_class, 5min}, bins});
  };
  const auto base = analyze_at(1.0);
  for (double lambda : {0.01, 7.3}) {
    const auto s = analyze_at(lambda);
    const double d_exp = std::max({std::abs(s.exponents.alpha.slope - base.exponents.alpha.slope),
                                   std::abs(s.exponents.beta.slope - base.exponents.beta.slope),
                                   std::abs(s.exponents.gamma.slope - base.exponents.gamma.slope)});
    const double d_tail = std::abs(s.tail->mu - base.tail->mu);
    const double d_rescaled = rel(*s.I_rescaled, *base.I_rescaled);
    const double d_I = rel(s.I / base.I, lambda);
    const double d_C = rel(*s.C / *base.C, lambda);
    const double d_sigma = rel(s.sigma, base.sigma);
    const std::string tag = "lambda " + num(lambda, 3) + ": ";
    o.check(d_exp <= 1e-9 && d_tail <= 1e-9, tag + "exponents moved " + num(std::max(d_exp, d_tail), 2));
    o.check(d_rescaled <= 1e-9 && d_sigma <= 1e-9, tag + "I/C moved " + num(d_rescaled, 2));
    o.check(d_I <= 1e-9 && d_C <= 1e-9, tag + "I and C scale by lambda (" + num(std::max(d_I, d_C), 2) + ")");
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "algebraic identities", identities},
      {2, "three-halves law oracle", three_halves},
      {3, "diffusive exponents", diffusive_exponents},
      {4, "sub-diffusion crossover", subdiffusion},
      {5, "master-curve parameter recovery", parameter_recovery},
      {6, "Hill estimator", hill},
      {7, "Rogers-Satchell estimator", rogers_satchell},
      {8, "collapse property", collapse_property},
      {9, "determinism", determinism},
      {10, "redenomination invariance", redenomination},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
