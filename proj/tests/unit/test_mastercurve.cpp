#include <gtest/gtest.h>

#include <cmath>

#include "invlab/mastercurve.hpp"
#include "oracle_values.hpp"
#include "support/synthetic.hpp"

using namespace invlab;
using invlab::testing::CurveTruth;
using invlab::testing::q_points;
using invlab::testing::sample_curves;
using invlab::testing::sigma_points;

TEST(Models, FrozenValues) {
  EXPECT_NEAR(sigma_model(1e-4, 1.0, 1.0), oracle::kSigmaAtTinyN, 1e-15);
  EXPECT_NEAR(sigma_model(1.0, 1.0, 1.0), oracle::kSigmaAtN0, 1e-15);
  EXPECT_NEAR(sigma_model(1e4, 1.0, 1.0) / 100.0, oracle::kSigmaDiffusiveRatio, 1e-15);
  EXPECT_NEAR(q_model(100.0, 1.0, 1.0), oracle::kQAt100, 1e-15);
  EXPECT_NEAR(itilde_model(1.0, 1.0), oracle::kItildeAtOne, 1e-15);
  EXPECT_NEAR(asymptotic_invariant(oracle::kRowQ0, oracle::kRowSigma0, oracle::kRowN0), oracle::kRowI0Exact, 1e-14);
}

TEST(Models, Limits) {
  // small N: sigma -> sigma0 sqrt(a), Q -> 0
  EXPECT_NEAR(sigma_model(1e-12, 2.0, 1.0, 0.5), 2.0 * std::sqrt(0.5), 1e-5);
  EXPECT_LT(q_model(1e-8, 5.0, 1.0), 1e-3);
  // large N: Q -> Q0
  EXPECT_NEAR(q_model(1e12, 5.0, 1.0), 5.0, 1e-4);
}

TEST(Models, InvariantIsProductOfCurves) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double sigma0 = std::exp(rng.normal()), N0 = std::exp(3 + 2 * rng.normal());
    const double Q0 = std::exp(2 + rng.normal()), nu = 0.2 + rng.uniform();
    const double a = rng.uniform();
    const double N = std::exp(std::log(N0) + 4 * rng.normal());
    const double direct = q_model(N, Q0, N0, nu) * sigma_model(N, sigma0, N0, a) / std::sqrt(N);
    const double via = itilde_model(N / N0, asymptotic_invariant(Q0, sigma0, N0), a, nu);
    ASSERT_NEAR(via / direct, 1.0, 1e-12);
  }
}

TEST(SigmaFit, RecoversNoiselessParameters) {
  const CurveTruth truth{1.34, 156.88, 24.77};
  const auto s = sample_curves(truth, 1.0, 1e5, 300, 0.0, 1);
  const auto fit = fit_sigma_curve(sigma_points(s));
  EXPECT_NEAR(fit.N0 / truth.N0, 1.0, 1e-6);
  EXPECT_NEAR(fit.sigma0 / truth.sigma0, 1.0, 1e-6);
  EXPECT_LT(fit.rss, 1e-10);
  EXPECT_FALSE(fit.weakly_identified);
  EXPECT_EQ(fit.n_points, 300u);
}

TEST(SigmaFit, RefinementTraceIsMonotone) {
  const auto s = sample_curves({}, 1.0, 1e5, 200, 0.1, 2);
  const auto fit = fit_sigma_curve(sigma_points(s));
  ASSERT_FALSE(fit.refinement_trace.empty());
  for (std::size_t i = 1; i < fit.refinement_trace.size(); ++i)
    EXPECT_LE(fit.refinement_trace[i], fit.refinement_trace[i - 1]);
  EXPECT_DOUBLE_EQ(fit.refinement_trace.back(), fit.rss);
}

TEST(SigmaFit, FlatDataIsUnidentifiable) {
  std::vector<CurvePoint> flat;
  for (int i = 0; i < 40; ++i) flat.push_back({std::pow(10.0, i * 0.1), 3.0});
  try {
    fit_sigma_curve(flat);
    FAIL() << "expected FitError";
  } catch (const FitError& e) {
    EXPECT_NE(std::string(e.what()).find("N0 unidentifiable"), std::string::npos);
  }
}

TEST(SigmaFit, PureDiffusionPushesN0ToTheEdge) {
  std::vector<CurvePoint> pts;
  for (int i = 0; i < 40; ++i) {
    const double N = std::pow(10.0, 2 + i * 0.1);
    pts.push_back({N, std::sqrt(N)});
  }
  EXPECT_THROW(fit_sigma_curve(pts), FitError);
}

TEST(SigmaFit, InputValidation) {
  std::vector<CurvePoint> few(5, {1.0, 1.0});
  EXPECT_THROW(fit_sigma_curve(few), DomainError);
  std::vector<CurvePoint> bad(10, {1.0, 1.0});
  bad[3].value = -1.0;
  EXPECT_THROW(fit_sigma_curve(bad), DomainError);
  const auto s = sample_curves({}, 1.0, 1e5, 50, 0.05, 3);
  SigmaFitOptions coarse;
  coarse.grid_step_decades = 0.1;
  EXPECT_THROW(fit_sigma_curve(sigma_points(s), coarse), DomainError);
}

TEST(SigmaFit, NarrowRangeIsFlaggedWeak) {
  const auto s = sample_curves({1.0, 100.0}, 30.0, 200.0, 60, 0.0, 4);
  const auto fit = fit_sigma_curve(sigma_points(s));
  EXPECT_TRUE(fit.weakly_identified);
}

TEST(SigmaFit, SerialAndParallelAgree) {
  const auto s = sample_curves({}, 1.0, 1e5, 500, 0.1, 5);
  SigmaFitOptions ser, par;
  ser.exec = Exec::serial;
  par.exec = Exec::parallel;
  const auto a = fit_sigma_curve(sigma_points(s), ser);
  const auto b = fit_sigma_curve(sigma_points(s), par);
  EXPECT_EQ(a.N0, b.N0);
  EXPECT_EQ(a.sigma0, b.sigma0);
  EXPECT_EQ(a.rss, b.rss);
}

TEST(SigmaFit, FixedN0ProfilesSigma0) {
  const CurveTruth truth{2.0, 50.0};
  const auto s = sample_curves(truth, 1.0, 1e4, 100, 0.0, 6);
  EXPECT_NEAR(fit_sigma0_fixed(sigma_points(s), 50.0), 2.0, 1e-12);
  const auto [log_s0, rss] = sigma_profile(sigma_points(s), 50.0, 0.5);
  EXPECT_NEAR(std::exp(log_s0), 2.0, 1e-12);
  EXPECT_NEAR(rss, 0.0, 1e-20);
}

TEST(QFit, ProfilesQ0) {
  const CurveTruth truth{1.0, 100.0, 7.5, 0.6};
  const auto s = sample_curves(truth, 1.0, 1e5, 100, 0.0, 7);
  const auto q = fit_q_curve(q_points(s), 100.0, 0.6);
  EXPECT_NEAR(q.Q0, 7.5, 1e-12);
  EXPECT_THROW(fit_q_curve(q_points(s), 0.0, 0.6), DomainError);
}

TEST(NuFit, RecoversSharedExponent) {
  std::vector<ContractQData> contracts;
  const double nus = 0.7;
  int seed = 10;
  for (auto [Q0, N0] : {std::pair{5.0, 30.0}, {40.0, 800.0}, {12.0, 150.0}}) {
    const auto s = sample_curves({1.0, N0, Q0, nus}, N0 / 100, N0 * 100, 400, 0.05, seed++);
    contracts.push_back({"C" + std::to_string(seed), q_points(s), N0});
  }
  const auto fit = fit_global_nu(contracts, Exec::serial);
  EXPECT_NEAR(fit.nu, nus, 0.02);
  EXPECT_FALSE(fit.boundary_hit);
  ASSERT_EQ(fit.Q0.size(), 3u);
  EXPECT_NEAR(fit.Q0[1] / 40.0, 1.0, 0.02);

  const auto par = fit_global_nu(contracts, Exec::parallel);
  EXPECT_EQ(par.nu, fit.nu);
  EXPECT_EQ(aggregated_q_rss(contracts, 0.5, Exec::serial), aggregated_q_rss(contracts, 0.5, Exec::parallel));
}

TEST(NuFit, BoundaryIsReported) {
  // Q independent of N pushes nu toward the upper bound
  std::vector<ContractQData> c(1);
  c[0].N0 = 1.0;
  for (int i = 0; i < 50; ++i) c[0].points.push_back({std::pow(10.0, 2 + i * 0.05), 3.0});
  const auto fit = fit_global_nu(c);
  EXPECT_TRUE(fit.boundary_hit);
  EXPECT_THROW(fit_global_nu(std::span<const ContractQData>{}), DomainError);
}

TEST(MasterFit, AssemblesInvariant) {
  SigmaFit s;
  s.sigma0 = oracle::kRowSigma0;
  s.N0 = oracle::kRowN0;
  QFit q;
  q.Q0 = oracle::kRowQ0;
  const auto m = make_master_fit(s, q, 0.54);
  EXPECT_NEAR(m.I0, oracle::kRowI0Exact, 1e-14);
  EXPECT_NEAR(m.I0 / oracle::kRowI0Printed, 1.0, 0.01);
}

TEST(Collapse, IdenticalShapesOverlap) {
  const CurveTruth A{1.0, 100.0, 10.0}, B{3.0, 2000.0, 80.0};
  const auto sa = sample_curves(A, 1.0, 1e5, 2000, 0.0, 20);
  const auto sb = sample_curves(B, 20.0, 2e6, 2000, 0.0, 21);
  auto fit_of = [](const CurveTruth& t) {
    MasterCurveFit f;
    f.sigma0 = t.sigma0;
    f.N0 = t.N0;
    f.Q0 = t.Q0;
    f.I0 = asymptotic_invariant(t.Q0, t.sigma0, t.N0);
    return f;
  };
  for (auto kind : {CurveKind::sigma, CurveKind::trade_size, CurveKind::invariant}) {
    const auto ca = collapse(sa, fit_of(A), kind);
    const auto cb = collapse(sb, fit_of(B), kind);
    EXPECT_LT(max_binned_log_distance(ca, cb), 0.02) << to_string(kind);
  }
  // without rescaling the curves are far apart
  MasterCurveFit unit;
  unit.sigma0 = unit.N0 = unit.Q0 = unit.I0 = 1.0;
  EXPECT_GT(max_binned_log_distance(collapse(sa, unit, CurveKind::sigma), collapse(sb, unit, CurveKind::sigma)),
            0.5);
}

TEST(Collapse, BinnedDistanceByHand) {
  std::vector<CollapsePoint> a, b;
  for (int i = 0; i < 5; ++i) {
    a.push_back({1.5, 1.0});
    b.push_back({1.5, std::exp(0.3)});
  }
  EXPECT_NEAR(max_binned_log_distance(a, b), 0.3, 1e-12);
  EXPECT_EQ(max_binned_log_distance(a, b, 0.25, 6), 0.0);
  EXPECT_EQ(to_string(CurveKind::trade_size), "q");
}
