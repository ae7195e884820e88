#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "pstd/errors.hpp"
#include "pstd/sigmodel.hpp"
#include "pstd/spectral.hpp"

using namespace pstd;
using std::numbers::pi;

namespace {

double bisect_kepler(double M, double e) {
  double lo = 0.0, hi = 2.0 * pi;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid - e * std::sin(mid) - M < 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Fraction of the Omega energy of a mean-removed signal held by its `top` largest ordinates.
double top_energy_fraction(const std::vector<double>& v, std::size_t top) {
  const auto p = periodogram(TimeSeries(v));
  std::vector<double> o(p.ordinates().begin(), p.ordinates().end());
  std::sort(o.rbegin(), o.rend());
  double total = 0.0, head = 0.0;
  for (std::size_t i = 0; i < o.size(); ++i) {
    total += o[i];
    if (i < top) head += o[i];
  }
  return head / total;
}

}  // namespace

TEST(Kepler, Trivial) {
  for (double M : {0.0, 0.3, 2.0, 5.5}) EXPECT_NEAR(solve_kepler(M, 0.0), M, 1e-14);
  for (double e : {0.0, 0.4, 0.9, 0.99}) EXPECT_NEAR(solve_kepler(pi, e), pi, 1e-12);
}

TEST(Kepler, BisectionOracle) { EXPECT_NEAR(solve_kepler(1.0, 0.9), bisect_kepler(1.0, 0.9), 1e-10); }

TEST(Kepler, ResidualOverRandomPairs) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> um(-20.0, 20.0), ue(0.0, 0.99);
  for (int i = 0; i < 100000; ++i) {
    const double M = um(gen), e = ue(gen);
    const double E = solve_kepler(M, e);
    ASSERT_LE(std::fabs(E - e * std::sin(E) - M), 1e-12) << M << ' ' << e;
  }
}

TEST(Kepler, DomainErrors) {
  EXPECT_THROW(solve_kepler(1.0, 1.0), DomainError);
  EXPECT_THROW(solve_kepler(1.0, -0.1), DomainError);
}

TEST(SinusoidSignal, EmptyIsZero) {
  const auto s = sinusoid_signal({}, 16);
  for (double v : s.samples()) EXPECT_EQ(v, 0.0);
}

TEST(SinusoidSignal, Formula) {
  SinusoidModel m{{{0.7, 0.13, 0.4}, {0.2, 0.31, 2.0}}};
  const auto s = sinusoid_signal(m, 32, 2.5);
  EXPECT_DOUBLE_EQ(s.dt(), 2.5);
  for (std::size_t j = 0; j < 32; ++j) {
    const double t = static_cast<double>(j + 1);
    const double expected = 0.7 * std::sin(2 * pi * 0.13 * t + 0.4) + 0.2 * std::sin(2 * pi * 0.31 * t + 2.0);
    EXPECT_NEAR(s[j], expected, 1e-13);
  }
}

TEST(SinusoidSignal, OnGridSinePeriodogram) {
  const std::size_t n = 64, k0 = 5;
  const auto s = sinusoid_signal({{{1.0, static_cast<double>(k0) / n, 0.0}}}, n);
  const auto p = periodogram(s);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.index(i) == k0) EXPECT_NEAR(p[i], n / 4.0, 1e-12);
    else EXPECT_NEAR(p[i], 0.0, 1e-12);
  }
}

TEST(SinusoidSignal, Validation) {
  EXPECT_THROW(sinusoid_signal({{{1.0, 0.5, 0.0}}}, 16), DomainError);
  EXPECT_THROW(sinusoid_signal({{{1.0, 0.0, 0.0}}}, 16), DomainError);
  EXPECT_THROW(sinusoid_signal({{{-1.0, 0.1, 0.0}}}, 16), DomainError);
}

TEST(SinusoidSignal, ThreeRvSignatures) {
  // Periods 11 h, 2.45 d and 6.61 d sampled every 30 min over 1110 points.
  const double dt = 0.5;  // hours
  SinusoidModel m;
  for (double period_h : {11.0, 2.45 * 24.0, 6.61 * 24.0}) m.components.push_back({0.2, dt / period_h, 0.0});
  const auto s = sinusoid_signal(m, 1110, dt);
  EXPECT_EQ(s.size(), 1110u);
  double mx = 0.0;
  for (double v : s.samples()) mx = std::max(mx, std::fabs(v));
  EXPECT_LE(mx, 0.6 + 1e-12);
  EXPECT_GT(mx, 0.3);
}

TEST(Keplerian, CircularIsSinusoid) {
  KeplerianModel k{2.0, 10.0, 0.0, 0.0, 1.5, 0.0};
  const auto t = sample_times(200, 0.37);
  const auto v = keplerian_rv(k, t);
  for (std::size_t j = 0; j < t.size(); ++j) EXPECT_NEAR(v[j], 2.0 * std::cos(2 * pi * (t[j] - 1.5) / 10.0), 1e-12);
}

TEST(Keplerian, CircularAmplitude) {
  KeplerianModel k{0.54, 3.23, 0.0, 0.0, 0.0, 0.0};
  const auto v = keplerian_rv(k, sample_times(2000, 4.0 / 24.0));
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  EXPECT_NEAR(*mx, 0.54, 1e-3);
  EXPECT_NEAR(*mn, -0.54, 1e-3);
}

TEST(Keplerian, FormulaWithEccentricity) {
  KeplerianModel k{3.0, 7.0, 0.6, 1.1, 0.4, 5.0};
  for (double t : {0.0, 1.3, 4.4, 9.9}) {
    const double M = 2 * pi * (t - 0.4) / 7.0;
    const double E = bisect_kepler(std::fmod(std::fmod(M, 2 * pi) + 2 * pi, 2 * pi), 0.6);
    const double nu = 2.0 * std::atan2(std::sqrt(1.6) * std::sin(E / 2), std::sqrt(0.4) * std::cos(E / 2));
    const double expected = 5.0 + 3.0 * (std::cos(1.1 + nu) + 0.6 * std::cos(1.1));
    EXPECT_NEAR(keplerian_rv(k, std::vector<double>{t})[0], expected, 1e-9);
  }
}

TEST(Keplerian, EccentricEnergyConcentration) {
  const double dt = 0.5 / 24.0;
  KeplerianModel k{1.0, 2.45, 0.9, pi, 0.0, 0.0};
  auto v = keplerian_rv(k, sample_times(1110, dt));
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  for (auto& x : v) x -= mean;
  EXPECT_GT(top_energy_fraction(v, 20), 0.99);
}

TEST(Keplerian, HarmonicContentGrowsWithEccentricity) {
  // Ten full periods on the grid so harmonics fall on Fourier indices.
  const std::size_t n = 1000;
  double prev = -1.0;
  for (double e : {0.0, 0.3, 0.6, 0.9}) {
    KeplerianModel k{1.0, 100.0, e, 0.5, 0.0, 0.0};
    auto v = keplerian_rv(k, sample_times(n, 1.0));
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    for (auto& x : v) x -= mean;
    const auto p = periodogram(TimeSeries(v));
    double total = 0.0, fundamental = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      total += p[i];
      if (p.index(i) == 10) fundamental = p[i];
    }
    const double harmonic = 1.0 - fundamental / total;
    if (e == 0.0) EXPECT_LT(harmonic, 1e-12);
    EXPECT_GT(harmonic, prev);
    prev = harmonic;
  }
}

TEST(Keplerian, Validation) {
  EXPECT_THROW(keplerian_rv({1.0, 0.0, 0.0, 0.0, 0.0, 0.0}, std::vector<double>{1.0}), DomainError);
  EXPECT_THROW(keplerian_rv({1.0, 1.0, 1.0, 0.0, 0.0, 0.0}, std::vector<double>{1.0}), DomainError);
  EXPECT_THROW(keplerian_rv({-1.0, 1.0, 0.0, 0.0, 0.0, 0.0}, std::vector<double>{1.0}), DomainError);
  EXPECT_THROW(multi_planet_rv({}, std::vector<double>{1.0}), DomainError);
}

TEST(MultiPlanet, SinglePlanetEqualsKeplerian) {
  KeplerianModel k{1.2, 3.3, 0.4, 0.7, 0.2, 4.0};
  const auto t = sample_times(100, 0.1);
  EXPECT_EQ(multi_planet_rv({{k}}, t), keplerian_rv(k, t));
}

TEST(MultiPlanet, SystemicVelocityOnce) {
  const double g0 = 3.0;
  std::vector<KeplerianModel> planets{{1.0, 5.0, 0.2, 0.1, 0.0, g0}, {0.5, 2.2, 0.7, 2.0, 1.0, g0}, {0.8, 9.0, 0.0, 0.0, 2.0, g0}};
  const auto t = sample_times(300, 0.05);
  const auto v = multi_planet_rv({planets}, t);
  std::vector<double> sum(t.size(), 0.0);
  for (const auto& p : planets) {
    const auto s = keplerian_rv(p, t);
    for (std::size_t j = 0; j < t.size(); ++j) sum[j] += s[j];
  }
  for (std::size_t j = 0; j < t.size(); ++j) EXPECT_NEAR(v[j], sum[j] - 2.0 * g0, 1e-12);
}

TEST(MultiPlanet, AntiphaseCancels) {
  const double g0 = 1.5;
  KeplerianModel a{2.0, 6.0, 0.0, 0.0, 0.0, g0}, b{2.0, 6.0, 0.0, 0.0, 3.0, g0};
  const auto v = multi_planet_rv({{a, b}}, sample_times(120, 0.1));
  for (double x : v) EXPECT_NEAR(x, g0, 1e-12);
}

TEST(SampleTimes, StartsAtOneStep) {
  const auto t = sample_times(4, 0.5);
  EXPECT_EQ(t, (std::vector<double>{0.5, 1.0, 1.5, 2.0}));
}
