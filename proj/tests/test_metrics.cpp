#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "qasat/metrics.hpp"

using namespace qasat;

TEST(Tts, KnownValues) {
  EXPECT_NEAR(tts(0.99, 20.0), 20.0, 1e-12);
  EXPECT_NEAR(tts(0.5, 10.0), 10.0 * std::log(0.01) / std::log(0.5), 1e-12);
  EXPECT_NEAR(tts(0.5, 10.0), 66.439, 1e-3);
  EXPECT_DOUBLE_EQ(tts(1.0, 7.0), 7.0);
  EXPECT_TRUE(std::isinf(tts(0.0, 7.0)));
  EXPECT_THROW(tts(1.5, 1.0), InputError);
  EXPECT_THROW(tts(0.5, 1.0, 1.0), InputError);
  EXPECT_THROW(tts(0.5, 0.0), InputError);
}

TEST(Tts, StrictlyDecreasingInP) {
  double prev = std::numeric_limits<double>::infinity();
  for (double p = 0.01; p < 0.99; p += 0.01) {
    const double t = tts(p, 100.0);
    EXPECT_LT(t, prev);
    prev = t;
  }
}

TEST(Equilibrium, KnownValuesAndBounds) {
  EXPECT_NEAR(equilibrium_p0({4, 8, 2.0, 1.42}), 1.0 / (1.0 + 2.0 * std::exp(-2.84)), 1e-15);
  EXPECT_NEAR(equilibrium_p0({4, 8, 2.0, 1.42}), 0.8954, 1e-4);
  EXPECT_NEAR(equilibrium_p0({4, 8, 2.0, 1e6}), 1.0, 1e-12);
  EXPECT_NEAR(equilibrium_p0({4, 8, 0.0, 1.0}), 1.0 / 3.0, 1e-15);
  double prev = 0.0;
  for (double beta = 0.1; beta < 5; beta += 0.1) {
    const double p = equilibrium_p0({3, 7, 1.0, beta});
    EXPECT_GT(p, prev);
    EXPECT_GT(p, 0.3);
    EXPECT_LT(p, 1.0);
    prev = p;
  }
}

TEST(Equilibrium, TemperatureConversion) {
  EXPECT_NEAR(temperature_kelvin(1.42) * 1e3, 145.07, 0.01);
  EXPECT_NEAR(temperature_kelvin(5.52) * 1e3, 37.3, 0.05);
}

TEST(Equilibrium, ChainPartitionSum) {
  // n = 3: levels 1, 2, 1 (per ground state), truncated sum includes all
  EXPECT_NEAR(chain_inverse_p(3, 1.0, 0.5), 1.0 + 2.0 * std::exp(-0.5) + std::exp(-1.0), 1e-14);
  // large n is truncated after five walls
  double sum = 0.0, c = 1.0;
  for (int k = 0; k <= 5; ++k) {
    sum += c * std::exp(-k * 0.3);
    c = c * (19 - k) / (k + 1);
  }
  EXPECT_NEAR(chain_inverse_p(20, 1.0, 0.3), sum, 1e-10);
}

TEST(FitBeta, RecoversSyntheticBeta) {
  std::vector<EquilibriumRecord> recs;
  const int g1s[] = {12, 30, 55, 80, 140};
  for (int i = 0; i < 5; ++i) {
    const int g0 = 1 << (i % 3);
    recs.push_back({g0, g1s[i], 4.0, equilibrium_p0({g0, g1s[i], 4.0, 1.42})});
  }
  const auto f = fit_beta(recs);
  EXPECT_NEAR(f.beta, 1.42, 1e-3);
  EXPECT_LT(f.residual, 1e-8);
  EXPECT_NEAR(f.temperature, 0.206 / f.beta, 1e-15);
  EXPECT_THROW(fit_beta({}), InputError);
  EXPECT_THROW(fit_beta({{1, 2, 0.0, 0.5}}), InputError);
  EXPECT_THROW(fit_beta({{1, 2, 1.0, 1.0}}), InputError);
}

TEST(FitBeta, ChainVariantRoundTrip) {
  std::vector<ChainRecord> recs;
  for (int n = 4; n <= 16; n += 3) recs.push_back({n, 1.0, 1.0 / chain_inverse_p(n, 1.0, 5.52)});
  EXPECT_NEAR(fit_beta_chain(recs).beta, 5.52, 1e-3);
}

TEST(Scaling, ExactExponentials) {
  std::vector<std::pair<double, double>> pts, flat, scaled;
  for (int n = 4; n <= 12; ++n) {
    pts.emplace_back(n, std::pow(2.0, n));
    flat.emplace_back(n, 3.0);
    scaled.emplace_back(n, 17.0 * std::pow(2.0, n));
  }
  const auto f = fit_scaling_exponent(pts);
  EXPECT_NEAR(f.exponent, std::log(2.0), 1e-10);
  EXPECT_LT(f.residual, 1e-10);
  EXPECT_NEAR(fit_scaling_exponent(flat).exponent, 0.0, 1e-10);
  const auto g = fit_scaling_exponent(scaled);
  EXPECT_NEAR(g.exponent, f.exponent, 1e-12);
  EXPECT_NEAR(g.intercept - f.intercept, std::log(17.0), 1e-10);
  EXPECT_THROW(fit_scaling_exponent({{1, 1}, {2, 2}}), InputError);
  EXPECT_THROW(fit_scaling_exponent({{1, 1}, {2, 0}, {3, 1}}), InputError);
}

TEST(Aggregate, MedianConventionAndMean) {
  EXPECT_DOUBLE_EQ(median_lower({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median_lower({4, 1, 3, 2}), 2.0);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_DOUBLE_EQ(median_lower({1, inf, 2}), 2.0);
  EXPECT_TRUE(std::isinf(median_lower({1, inf, inf})));
  const auto pts = aggregate_ensemble({{6, {1, 2, 3}}, {8, {1.0 / 0.5, 1.0 / 0.25}}}, Statistic::mean);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_DOUBLE_EQ(pts[0].second, 2.0);
  EXPECT_DOUBLE_EQ(pts[1].second, 3.0);
  EXPECT_THROW(aggregate_ensemble({{6, {}}}), InputError);
}

TEST(Counts, HardwareQuadruple) {
  SampleCounts sc;
  const std::vector<BasisState> t = {BitString::parse("0001"), BitString::parse("0010"), BitString::parse("0100"),
                                     BitString::parse("1000")};
  const long long c[] = {1552, 2470, 2765, 3124};
  for (int i = 0; i < 4; ++i) sc.counts[t[i]] = c[i];
  sc.counts[BitString::parse("1111")] = 89;
  sc.num_reads = 10000;
  const auto r = counts_to_sampling(sc, t);
  const double want[] = {0.1552, 0.2470, 0.2765, 0.3124};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.probabilities[i], want[i], 1e-15);
  const auto missing = counts_to_sampling(sc, {BitString::parse("0000")});
  EXPECT_EQ(missing.probabilities[0], 0.0);
  SampleCounts one;
  one.counts[t[0]] = 5;
  EXPECT_EQ(counts_to_sampling(one, {t[0]}).probabilities[0], 1.0);
  EXPECT_THROW(counts_to_sampling(SampleCounts{}, t), InputError);
}

TEST(Transition, TwoRegimeFitOnSyntheticData) {
  TransitionScan scan;
  // exp(-0.8 T) up to T = 5, then 3 T^-2 continuing smoothly enough
  for (double T = 0.5; T <= 5.0; T += 0.5) scan.records.push_back({T, 0, 0, std::exp(-0.8 * T)});
  for (double T = 8; T <= 800; T *= 1.5) scan.records.push_back({T, 0, 0, 3.0 * std::pow(T, -2.0)});
  fit_transition_regimes(scan);
  EXPECT_EQ(scan.split, 10u);
  EXPECT_NEAR(scan.rate, 0.8, 1e-10);
  EXPECT_NEAR(scan.power_exponent, -2.0, 1e-10);
  EXPECT_NEAR(scan.exp_r2, 1.0, 1e-12);
}

TEST(Transition, SingleSpinLandauZenerHead) {
  // weak field: the gap closes to 2h/sqrt(1+h^2) near the end of the sweep.
  // The grid starts past the sudden-quench plateau.
  IsingModel m(1);
  m.h[0] = 0.3;
  std::vector<double> grid;
  for (double T = 4.0; T <= 5000.0; T *= 1.2) grid.push_back(T);
  const auto scan = transition_scan(m, {BitString::parse("1")}, Schedule::linear(), grid, capped_tau(0.005));
  for (const auto& r : scan.records) {
    EXPECT_GE(r.one_minus_p, 0.0);
    EXPECT_LE(r.one_minus_p, 1.0);
  }
  EXPECT_GT(scan.exp_r2, 0.99);
  EXPECT_NEAR(scan.power_exponent, -2.0, 0.3);
  EXPECT_THROW(transition_scan(m, {BitString::parse("1")}, Schedule::linear(), {1.0}), InputError);
}
