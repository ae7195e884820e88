#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "pstd/arfit.hpp"
#include "pstd/errors.hpp"
#include "pstd/ksstat.hpp"
#include "pstd/noisegen.hpp"

using namespace pstd;

namespace {

TrainingSet single(const TimeSeries& x) { return TrainingSet({x}); }

double exp_cdf(double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }

}  // namespace

TEST(Autocovariance, BiasedPooledEstimate) {
  const TimeSeries a({1, 2, 3, 4}), b({4, 0, 0, 0});
  const auto r = pooled_autocovariance(TrainingSet({a, b}), 1);
  // a: mean 2.5, deviations -1.5 -.5 .5 1.5 -> r0 = 5/4, r1 = (.75 - .25 + .75)/4.
  // b: mean 1, deviations 3 -1 -1 -1 -> r0 = 12/4, r1 = (-3 + 1 + 1)/4.
  EXPECT_NEAR(r[0], (1.25 + 3.0) / 2.0, 1e-14);
  EXPECT_NEAR(r[1], (1.25 / 4.0 - 0.25) / 2.0, 1e-14);
}

TEST(Levinson, MatchesDirectToeplitzSolve) {
  const auto ts = gen_training_set(NoiseModel::ar(reference_ar6().coeffs, 1.0), 2048, 3, {20, 0});
  const auto r = pooled_autocovariance(ts, 20);
  for (std::size_t p = 1; p <= 20; ++p) {
    Eigen::MatrixXd R(p, p);
    Eigen::VectorXd rhs(p);
    for (std::size_t i = 0; i < p; ++i) {
      rhs(static_cast<Eigen::Index>(i)) = -r[i + 1];
      for (std::size_t j = 0; j < p; ++j)
        R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[i > j ? i - j : j - i];
    }
    const Eigen::VectorXd c = R.ldlt().solve(rhs);
    const auto lev = levinson_durbin(r, p);
    ASSERT_EQ(lev.coeffs.size(), p);
    for (std::size_t j = 0; j < p; ++j) EXPECT_NEAR(lev.coeffs[j], c(static_cast<Eigen::Index>(j)), 1e-8) << p;
    double s2 = r[0];
    for (std::size_t j = 0; j < p; ++j) s2 += c(static_cast<Eigen::Index>(j)) * r[j + 1];
    EXPECT_NEAR(lev.error_var[p], s2, 1e-8 * r[0]);
  }
}

TEST(Levinson, ErrorVarianceNonincreasing) {
  const auto ts = gen_training_set(NoiseModel::white(1.0), 512, 1, {21, 0});
  const auto lev = levinson_durbin(pooled_autocovariance(ts, 30), 30);
  for (std::size_t o = 1; o < lev.error_var.size(); ++o) EXPECT_LE(lev.error_var[o], lev.error_var[o - 1] * (1 + 1e-14));
}

TEST(FitYw, WhiteOrderZero) {
  const auto x = gen_ar_noise({{}, 1.0}, 4096, {22, 0});
  const auto f = fit_ar_yw(single(x), 0);
  EXPECT_TRUE(f.coeffs.empty());
  double m = 0.0, v = 0.0;
  for (double s : x.samples()) m += s;
  m /= x.size();
  for (double s : x.samples()) v += (s - m) * (s - m);
  EXPECT_NEAR(f.innovation_var, v / x.size(), 1e-12);
}

TEST(FitYw, Ar1Consistency) {
  const auto x = gen_ar_noise({{-0.5}, 1.0}, 10000, {23, 0});
  const auto f = fit_ar_yw(single(x), 1);
  ASSERT_EQ(f.coeffs.size(), 1u);
  EXPECT_NEAR(f.coeffs[0], -0.5, 0.02);
}

TEST(FitYw, Errors) {
  const TimeSeries x({1, 2, 3, 4});
  EXPECT_THROW(fit_ar_yw(single(x), 4), InputError);
  EXPECT_THROW(fit_ar_yw(single(TimeSeries({2, 2, 2, 2})), 1), DomainError);
}

TEST(Fpe, MaxOrderZero) {
  const auto x = gen_ar_noise({{-0.5}, 1.0}, 512, {24, 0});
  const auto f = select_order_fpe(single(x), 0);
  EXPECT_EQ(f.order, 0u);
  EXPECT_EQ(f.criterion_trace.size(), 1u);
}

TEST(Fpe, TraceAndArgmin) {
  const auto x = gen_ar_noise({{-0.5}, 1.0}, 512, {25, 0});
  const auto f = select_order_fpe(single(x), 10);
  ASSERT_EQ(f.criterion_trace.size(), 11u);
  double best = 1e300;
  std::size_t arg = 0;
  for (const auto& [o, v] : f.criterion_trace)
    if (v < best) best = v, arg = o;
  EXPECT_EQ(arg, f.order);
  EXPECT_GE(f.order, 1u);
  for (double r : ar_root_moduli(f.coeffs)) EXPECT_GT(r, 1.0);
  EXPECT_THROW(select_order_fpe(single(x), 256), InputError);
}

TEST(Fpe, Ar6InnovationVariance) {
  const auto m = reference_ar6();
  const auto x = gen_ar_noise(m, 4096, {26, 0});
  const auto f = select_order_fpe(single(x), 30);
  EXPECT_NEAR(f.innovation_var, m.innovation_var, 0.1 * m.innovation_var);
}

TEST(Fpe, WhiteNoiseUsuallyOrderZero) {
  int zero = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto x = gen_ar_noise({{}, 1.0}, 4096, {27, s});
    zero += select_order_fpe(single(x), 30).order == 0;
  }
  EXPECT_GE(zero, 80);
}

TEST(Fpe, DefaultMaxOrder) {
  EXPECT_EQ(default_max_order(1024), 30u);
  EXPECT_EQ(default_max_order(200), 20u);
}

TEST(ArStandardize, WhiteFitDividesByVariance) {
  const auto x = gen_ar_noise({{}, 1.0}, 256, {28, 0});
  const auto f = fit_ar_yw(single(x), 0);
  const auto p = periodogram(x);
  const auto z = ar_standardize(p, f);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(z[i], p[i] / f.innovation_var, 1e-12 * (1 + z[i]));
}

TEST(ArStandardize, TrueModelGivesExponentialOrdinates) {
  const auto m = reference_ar6();
  ArFit truth{6, m.coeffs, m.innovation_var, {}};
  std::vector<double> pooled;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto z = ar_standardize(periodogram(gen_ar_noise(m, 4096, {29, s})), truth);
    pooled.insert(pooled.end(), z.ordinates().begin(), z.ordinates().end());
  }
  EXPECT_GT(ks_one_sample(pooled, exp_cdf).p_value, 0.01);
}
