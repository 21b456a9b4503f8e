#include "invlab/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace invlab {

CurveData curve_data(const BinsFile& file, std::optional<VolMethod> method, Exec exec) {
  CurveData d;
  d.symbol = file.meta.symbol;
  d.tau = file.meta.tau;
  d.tick_size = file.meta.tick_size;
  const auto table = bin_of_day_table(file.bins, method.value_or(default_vol_method(file.meta.tau)), exec);
  for (const auto& t : table) {
    d.samples.push_back({std::exp(t.mean_log_N), std::exp(t.mean_log_sigma + t.mean_log_P) / file.meta.tick_size,
                         std::exp(t.mean_log_Q)});
  }
  std::vector<double> s, vb, va;
  for (const auto& b : file.bins) {
    if (b.N <= 0) continue;
    if (b.S_mean && *b.S_mean > 0.0) s.push_back(*b.S_mean);
    if (b.Vbid_mean && *b.Vbid_mean > 0.0) vb.push_back(*b.Vbid_mean);
    if (b.Vask_mean && *b.Vask_mean > 0.0) va.push_back(*b.Vask_mean);
  }
  if (!s.empty()) d.spread_over_tick = log_mean(s) / file.meta.tick_size;
  if (!vb.empty() && !va.empty()) d.V_best = 0.5 * (log_mean(vb) + log_mean(va));
  return d;
}

namespace {

std::vector<CurvePoint> sigma_points(const CurveData& d) {
  std::vector<CurvePoint> p;
  for (const auto& s : d.samples) p.push_back({s.N, s.sigma});
  return p;
}

std::vector<CurvePoint> q_points(const CurveData& d) {
  std::vector<CurvePoint> p;
  for (const auto& s : d.samples) p.push_back({s.N, s.Q});
  return p;
}

void add_collapse(std::vector<CollapseSeries>& out, const CurveData& d, const MasterCurveFit& fit) {
  for (auto kind : {CurveKind::sigma, CurveKind::trade_size, CurveKind::invariant})
    out.push_back({d.symbol, d.tau, kind, collapse(d.samples, fit, kind)});
}

}  // namespace

FitReport fit_master_curves(std::span<const BinsFile> files, const FitOptions& options) {
  if (files.empty()) throw DomainError("fit needs at least one bins file");
  std::map<std::string, std::vector<const BinsFile*>> by_symbol;
  for (const auto& f : files) by_symbol[f.meta.symbol].push_back(&f);

  FitReport report;
  struct Pending {
    CurveData reference;
    SigmaFit sigma;
    std::vector<CurveData> all;  // every width, ascending tau
  };
  std::vector<Pending> pending;

  for (auto& [symbol, list] : by_symbol) {
    std::sort(list.begin(), list.end(), [](const BinsFile* a, const BinsFile* b) { return a->meta.tau < b->meta.tau; });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i]->meta.tau == list[i - 1]->meta.tau)
        throw ConfigError("two bins files for " + symbol + " at width " + format_duration(list[i]->meta.tau));
    }
    Pending p;
    const BinsFile* ref = list.front();
    bool found = false;
    for (const auto* f : list) {
      if (f->meta.tau == options.reference_tau) {
        ref = f;
        found = true;
      }
    }
    if (!found)
      report.notices.push_back(symbol + ": no bins at " + format_duration(options.reference_tau) + ", using " +
                               format_duration(ref->meta.tau) + " as the reference width");
    for (const auto* f : list) {
      p.all.push_back(curve_data(*f, options.method, options.exec));
      if (f == ref) p.reference = p.all.back();
    }
    SigmaFitOptions so;
    so.a = options.a;
    so.exec = options.exec;
    try {
      p.sigma = fit_sigma_curve(sigma_points(p.reference), so);
    } catch (const Error& e) {
      throw FitError(symbol + ": " + e.what());
    }
    if (p.sigma.weakly_identified) report.notices.push_back(symbol + ": N0 weakly identified (N spans < 1 decade)");
    pending.push_back(std::move(p));
  }

  if (options.nu) {
    report.nu = *options.nu;
  } else if (pending.size() < 2) {
    report.nu = kDefaultNu;
    report.notices.push_back("single contract: nu fit skipped, using nu = " + format_double(kDefaultNu));
  } else {
    std::vector<ContractQData> qdata;
    for (const auto& p : pending) qdata.push_back({p.reference.symbol, q_points(p.reference), p.sigma.N0});
    const auto nf = fit_global_nu(qdata, options.exec);
    report.nu = nf.nu;
    report.nu_fitted = true;
    report.nu_boundary_hit = nf.boundary_hit;
    if (nf.boundary_hit) report.notices.push_back("nu fit hit the search boundary at " + format_double(nf.nu));
  }

  for (const auto& p : pending) {
    const auto q = fit_q_curve(q_points(p.reference), p.sigma.N0, report.nu);
    ContractFitRow row;
    row.fit = make_master_fit(p.sigma, q, report.nu);
    row.fit.symbol = p.reference.symbol;
    row.tau = p.reference.tau;
    row.spread_over_tick = p.reference.spread_over_tick;
    row.V_best = p.reference.V_best;
    add_collapse(report.across_contracts, p.reference, row.fit);

    for (const auto& d : p.all) {
      MasterCurveFit f = row.fit;
      const auto sp = sigma_points(d);
      f.sigma0 = fit_sigma0_fixed(sp, f.N0, options.a);
      f.Q0 = fit_q_curve(q_points(d), f.N0, report.nu).Q0;
      f.I0 = asymptotic_invariant(f.Q0, f.sigma0, f.N0);
      report.tau_rows.push_back({d.symbol, d.tau, f.sigma0, f.Q0, f.I0});
      add_collapse(report.across_tau, d, f);
    }
    report.contracts.push_back(std::move(row));
  }
  return report;
}

}  // namespace invlab
