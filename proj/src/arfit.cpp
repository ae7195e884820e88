#include "pstd/arfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pstd/errors.hpp"

namespace pstd {

std::vector<double> pooled_autocovariance(const TrainingSet& ts, std::size_t max_lag) {
  const std::size_t n = ts.n_samples();
  if (max_lag >= n) throw InputError("autocovariance: lag must be < N");
  std::vector<double> r(max_lag + 1, 0.0);
  std::vector<double> centered(n);
  for (const auto& s : ts.series()) {
    double mean = 0.0;
    for (double v : s.samples()) mean += v;
    mean /= static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) centered[j] = s[j] - mean;
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
      double acc = 0.0;
      for (std::size_t j = lag; j < n; ++j) acc += centered[j] * centered[j - lag];
      r[lag] += acc / static_cast<double>(n);
    }
  }
  for (double& v : r) v /= static_cast<double>(ts.size());
  return r;
}

LevinsonResult levinson_durbin(std::span<const double> r, std::size_t order) {
  if (r.size() < order + 1) throw InputError("levinson_durbin: need autocovariances up to the order");
  if (!(r[0] > 0.0)) throw DomainError("levinson_durbin: singular autocovariance (zero variance input)");
  LevinsonResult out;
  out.error_var.push_back(r[0]);
  out.coeffs_by_order.emplace_back();
  std::vector<double> a;
  double err = r[0];
  for (std::size_t m = 1; m <= order; ++m) {
    double acc = r[m];
    for (std::size_t j = 1; j < m; ++j) acc += a[j - 1] * r[m - j];
    const double k = -acc / err;
    if (!(std::fabs(k) < 1.0))
      throw DomainError("levinson_durbin: singular autocovariance at order " + std::to_string(m));
    std::vector<double> next(m);
    for (std::size_t j = 1; j < m; ++j) next[j - 1] = a[j - 1] + k * a[m - j - 1];
    next[m - 1] = k;
    a = std::move(next);
    err *= (1.0 - k * k);
    out.error_var.push_back(err);
    out.coeffs_by_order.push_back(a);
  }
  out.coeffs = a;
  return out;
}

ArFit fit_ar_yw(const TrainingSet& ts, std::size_t order) {
  if (order >= ts.n_samples()) throw InputError("fit_ar_yw: order must be < N");
  const auto r = pooled_autocovariance(ts, order);
  const auto lev = levinson_durbin(r, order);
  ArFit fit;
  fit.order = order;
  fit.coeffs = lev.coeffs;
  fit.innovation_var = lev.error_var.back();
  return fit;
}

std::size_t default_max_order(std::size_t n) { return std::min<std::size_t>(30, n / 10); }

ArFit select_order_fpe(const TrainingSet& ts, std::optional<std::size_t> max_order) {
  const std::size_t n = ts.n_samples();
  const std::size_t p_max = max_order.value_or(default_max_order(n));
  if (2 * p_max >= n) throw InputError("select_order_fpe: max_order must be < N/2");
  const auto r = pooled_autocovariance(ts, p_max);
  const auto lev = levinson_durbin(r, p_max);
  const double m = static_cast<double>(n * ts.size());

  ArFit best;
  double best_fpe = std::numeric_limits<double>::infinity();
  for (std::size_t o = 0; o <= p_max; ++o) {
    const double d = static_cast<double>(o);
    const double fpe = lev.error_var[o] * (m + d + 1.0) / (m - d - 1.0);
    best.criterion_trace.emplace_back(o, fpe);
    if (fpe < best_fpe) {
      best_fpe = fpe;
      best.order = o;
    }
  }
  best.coeffs = lev.coeffs_by_order[best.order];
  best.innovation_var = lev.error_var[best.order];
  return best;
}

PeriodogramVec ar_standardize(const PeriodogramVec& p, const ArFit& fit) {
  if (!(fit.innovation_var > 0.0)) throw DomainError("ar_standardize: innovation variance must be positive");
  return standardize(p, ar_psd(fit.model(), p.n_samples(), p.index_set()));
}

}  // namespace pstd
