#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "pstd/ksstat.hpp"

using namespace pstd;

namespace {
// Alternating series, convergent for x away from 0.
double kolmogorov_series(double x) {
  double s = 0.0;
  for (int k = 1; k < 200; ++k) s += (k % 2 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * x * x);
  return s;
}
}  // namespace

TEST(Kolmogorov, TabulatedCriticalValues) {
  EXPECT_NEAR(kolmogorov_sf(1.3581), 0.05, 2e-4);
  EXPECT_NEAR(kolmogorov_sf(1.6276), 0.01, 2e-5);
  EXPECT_NEAR(kolmogorov_sf(1.2238), 0.10, 2e-4);
}

TEST(Kolmogorov, SeriesOracle) {
  for (double x = 0.4; x < 3.0; x += 0.05) EXPECT_NEAR(kolmogorov_sf(x), kolmogorov_series(x), 1e-10);
}

TEST(Kolmogorov, Limits) {
  EXPECT_NEAR(kolmogorov_sf(0.0), 1.0, 1e-12);
  EXPECT_NEAR(kolmogorov_sf(0.1), 1.0, 1e-12);
  EXPECT_LT(kolmogorov_sf(5.0), 1e-20);
  double prev = 1.0;
  for (double x = 0.0; x < 4.0; x += 0.01) {
    const double s = kolmogorov_sf(x);
    EXPECT_LE(s, prev + 1e-15);
    prev = s;
  }
}

TEST(KsOneSample, StatisticByHand) {
  // Sample {0.1, 0.5, 0.9} against U(0,1): D = max(1/3-0.1, 0.5-1/3, 2/3-0.5, 0.9-2/3, 1-0.9, ...).
  const std::vector<double> s{0.9, 0.1, 0.5};
  const auto r = ks_one_sample(s, [](double x) { return x; });
  EXPECT_NEAR(r.statistic, 0.2333333333333333, 1e-12);
  EXPECT_EQ(r.n, 3u);
}

TEST(KsOneSample, DetectsShift) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n(0.3, 1.0);
  std::vector<double> s(2000);
  for (auto& v : s) v = n(gen);
  const auto r = ks_one_sample(s, [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); });
  EXPECT_LT(r.p_value, 1e-6);
}

TEST(KsTwoSample, SameLawAccepts) {
  std::mt19937_64 gen(4);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> a(3000), b(2000);
  for (auto& v : a) v = e(gen);
  for (auto& v : b) v = e(gen);
  const auto r = ks_two_sample(a, b);
  EXPECT_GT(r.p_value, 0.01);
  EXPECT_EQ(r.n, 1200u);
}

TEST(KsTwoSample, DisjointSamples) {
  const std::vector<double> a{1, 2, 3, 4}, b{5, 6, 7, 8};
  EXPECT_NEAR(ks_two_sample(a, b).statistic, 1.0, 1e-15);
  EXPECT_NEAR(ks_two_sample(a, a).statistic, 0.0, 1e-15);
}
