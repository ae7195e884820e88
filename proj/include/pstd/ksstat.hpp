#pragma once

// Kolmogorov-Smirnov goodness-of-fit tests used by the distributional checks.

#include <cstddef>
#include <functional>
#include <span>

namespace pstd {

struct KsResult {
  double statistic = 0.0;  ///< sup |F_n - F|
  double p_value = 1.0;    ///< asymptotic Kolmogorov p-value
  std::size_t n = 0;       ///< effective sample size
};

/// Survival of the Kolmogorov distribution, Pr(K > x).
double kolmogorov_sf(double x);

/// One-sample test of `sample` against the continuous CDF `cdf`.
KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);

/// Two-sample test.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace pstd
