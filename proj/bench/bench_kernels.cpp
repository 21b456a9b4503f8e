// Serial reference path against the OpenMP path for each parallel kernel.
// The second benchmark argument selects the path: 0 = serial, 1 = parallel.
// Thread count follows INVLAB_THREADS (or the OpenMP default).

#include <benchmark/benchmark.h>

#include "invlab/estimators.hpp"
#include "invlab/ingest.hpp"
#include "invlab/mastercurve.hpp"
#include "invlab/simulator.hpp"
#include "support/synthetic.hpp"

using namespace invlab;
using namespace std::chrono_literals;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(1) == 0 ? Exec::serial : Exec::parallel; }

SimConfig bench_config(int days) {
  SimConfig c;
  c.symbol = "BN";
  c.seed = 77;
  c.days = days;
  c.latent_vol = 3.4e-5;
  c.tick_size = 0.01;
  c.start_price = 100.0;
  c.intensity = IntensityProfile::three_session(0.05, 1.5);
  return c;
}

struct Prepared {
  ContractSpec contract;
  std::vector<TradeRecord> trades;
  std::vector<QuoteRecord> quotes;
  std::vector<Bin> bins;
};

const Prepared& prepared() {
  static const Prepared p = [] {
    Prepared out;
    const auto cfg = bench_config(8);
    const auto market = simulate_market(cfg, Exec::serial);
    out.contract = contract_for(cfg);
    out.trades = filter_session(group_simultaneous(market.trades), out.contract);
    out.quotes = market.quotes;
    out.bins = bin_series(out.trades, out.quotes, out.contract, 5min, Exec::serial);
    return out;
  }();
  return p;
}

void BM_SimulateMarket(benchmark::State& state) {
  const auto cfg = bench_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_market(cfg, exec_of(state)));
}

void BM_BinSeries(benchmark::State& state) {
  const auto& p = prepared();
  const Duration tau = std::chrono::minutes(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bin_series(p.trades, p.quotes, p.contract, tau, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.trades.size()));
}

void BM_BinOfDayTable(benchmark::State& state) {
  const auto& p = prepared();
  const auto method = state.range(0) == 0 ? VolMethod::squared_returns_10s : VolMethod::rogers_satchell;
  for (auto _ : state) benchmark::DoNotOptimize(bin_of_day_table(p.bins, method, exec_of(state)));
}

void BM_FitSigmaCurve(benchmark::State& state) {
  const invlab::testing::CurveTruth truth{1.3, 150.0, 25.0, 0.54};
  const auto points = invlab::testing::sigma_points(
      invlab::testing::sample_curves(truth, 15.0, 1500.0, static_cast<int>(state.range(0)), 0.1, 3));
  SigmaFitOptions opt;
  opt.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(fit_sigma_curve(points, opt));
}

void BM_FitGlobalNu(benchmark::State& state) {
  std::vector<ContractQData> contracts;
  for (int k = 0; k < state.range(0); ++k) {
    const invlab::testing::CurveTruth truth{1.0, 50.0 * (k + 1), 10.0 + k, 0.54};
    const auto s = invlab::testing::sample_curves(truth, truth.N0 / 10, truth.N0 * 10, 2000, 0.1, 100 + k);
    contracts.push_back({"C" + std::to_string(k), invlab::testing::q_points(s), truth.N0});
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_global_nu(contracts, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_SimulateMarket)->ArgsProduct({{4}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BinSeries)->ArgsProduct({{1, 5, 30}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BinOfDayTable)->ArgsProduct({{0, 1}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FitSigmaCurve)->ArgsProduct({{400, 4000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitGlobalNu)->ArgsProduct({{4, 16}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
