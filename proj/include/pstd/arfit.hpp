#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pstd/noisegen.hpp"
#include "pstd/spectral.hpp"

namespace pstd {

/// Fitted AR model with its order-selection trace.
struct ArFit {
  std::size_t order = 0;
  std::vector<double> coeffs;
  double innovation_var = 0.0;
  /// (order, FPE value) for every order examined; empty for a fixed-order fit.
  std::vector<std::pair<std::size_t, double>> criterion_trace;

  [[nodiscard]] ArModel model() const { return ArModel{coeffs, innovation_var}; }
};

/// Biased autocovariance estimates r(0..max_lag) of each (mean-removed)
/// series, averaged across the training set.
std::vector<double> pooled_autocovariance(const TrainingSet& ts, std::size_t max_lag);

/// Levinson-Durbin recursion. Returns the prediction-error variance for
/// every order 0..p and the order-p coefficients (x_t + sum c_j x_{t-j} = e_t).
struct LevinsonResult {
  std::vector<double> coeffs;
  std::vector<double> error_var;  ///< sigma^2(o), o = 0..p
  /// Coefficients for every order, coeffs_by_order[o] has length o.
  std::vector<std::vector<double>> coeffs_by_order;
};
LevinsonResult levinson_durbin(std::span<const double> autocov, std::size_t order);

/// Yule-Walker fit of a fixed order on pooled autocovariances.
ArFit fit_ar_yw(const TrainingSet& ts, std::size_t order);

/// Fits orders 0..max_order and keeps the Final Prediction Error minimizer
/// FPE(o) = sigma^2(o) (M + o + 1) / (M - o - 1), with M the number of
/// samples pooled into the fit (N times L).
ArFit select_order_fpe(const TrainingSet& ts, std::optional<std::size_t> max_order = std::nullopt);

/// min(30, N/10).
std::size_t default_max_order(std::size_t n);

/// P(nu_k) / S_AR(nu_k) with the fitted spectrum.
PeriodogramVec ar_standardize(const PeriodogramVec& p, const ArFit& fit);

}  // namespace pstd
