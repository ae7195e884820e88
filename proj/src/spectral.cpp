#include "pstd/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "pstd/errors.hpp"

namespace pstd {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per length under a lock and reused.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  PlanPair get(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<double> in(n);
    std::vector<std::complex<double>> out(n / 2 + 1);
    auto* cin = reinterpret_cast<fftw_complex*>(out.data());
    const auto ni = static_cast<int>(n);
    PlanPair p;
    p.forward = fftw_plan_dft_r2c_1d(ni, in.data(), cin, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.inverse = fftw_plan_dft_c2r_1d(ni, cin, in.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(n, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.inverse);
    }
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, PlanPair> plans_;
};

std::vector<double> periodogram_values(std::span<const double> x, IndexSet set) {
  const std::size_t n = x.size();
  const auto spec = dft_fast(x);
  const std::size_t first = set == IndexSet::Omega ? 1 : 0;
  const std::size_t count = index_set_size(n, set);
  std::vector<double> out(count);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::norm(spec[first + i]) * inv_n;
  return out;
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> samples, double dt) : samples_(std::move(samples)), dt_(dt) {
  if (samples_.size() < 4 || samples_.size() % 2 != 0)
    throw InputError("TimeSeries: length must be even and >= 4 (got " + std::to_string(samples_.size()) + ")");
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw InputError("TimeSeries: dt must be positive");
  for (double v : samples_)
    if (!std::isfinite(v)) throw InputError("TimeSeries: non-finite sample");
}

PeriodogramVec::PeriodogramVec(std::size_t n_samples, IndexSet set, std::vector<double> ordinates)
    : n_(n_samples), set_(set), ordinates_(std::move(ordinates)) {
  if (ordinates_.size() != index_set_size(n_, set_))
    throw InputError("PeriodogramVec: ordinate count does not match the index set");
  for (double v : ordinates_)
    if (!(v >= 0.0)) throw InputError("PeriodogramVec: ordinates must be >= 0");
}

TrainingSet::TrainingSet(std::vector<TimeSeries> series) : series_(std::move(series)) {
  if (series_.empty()) throw InputError("TrainingSet: at least one series required");
  for (const auto& s : series_) {
    if (s.size() != series_.front().size() || s.dt() != series_.front().dt())
      throw InputError("TrainingSet: all series must share the same grid");
  }
}

std::size_t index_set_size(std::size_t n, IndexSet set) {
  return set == IndexSet::Omega ? n / 2 - 1 : n / 2 + 1;
}

std::vector<std::complex<double>> dft_direct(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      // Reduce k*j mod n to keep the phase argument small and exact.
      const double phase = -2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / static_cast<double>(n);
      re += x[j] * std::cos(phase);
      im += x[j] * std::sin(phase);
    }
    out[k] = {re, im};
  }
  return out;
}

std::vector<std::complex<double>> dft_fast(std::span<const double> x) {
  const std::size_t n = x.size();
  const auto plans = PlanCache::instance().get(n);
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_execute_dft_r2c(plans.forward, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> idft_fast(std::span<const std::complex<double>> half, std::size_t n) {
  if (half.size() != n / 2 + 1) throw InputError("idft_fast: half-spectrum length must be N/2 + 1");
  const auto plans = PlanCache::instance().get(n);
  std::vector<std::complex<double>> in(half.begin(), half.end());  // c2r destroys its input
  std::vector<double> out(n);
  fftw_execute_dft_c2r(plans.inverse, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  return out;
}

PeriodogramVec periodogram(const TimeSeries& x, IndexSet set) {
  return PeriodogramVec(x.size(), set, periodogram_values(x.samples(), set));
}

PeriodogramVec averaged_periodogram(const TrainingSet& ts, IndexSet set) {
  const std::size_t n = ts.n_samples();
  std::vector<double> acc(index_set_size(n, set), 0.0);
  for (const auto& s : ts.series()) {
    const auto p = periodogram_values(s.samples(), set);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p[i];
  }
  const double inv_l = 1.0 / static_cast<double>(ts.size());
  for (double& v : acc) v *= inv_l;
  return PeriodogramVec(n, set, std::move(acc));
}

PeriodogramVec standardize(const PeriodogramVec& p, const PeriodogramVec& ref) {
  if (!p.same_grid(ref)) throw InputError("standardize: periodogram and reference grids differ");
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(ref[i] > 0.0))
      throw InputError("standardize: non-positive reference ordinate at k=" + std::to_string(p.index(i)) +
                       " (degenerate training set)");
    out[i] = p[i] / ref[i];
  }
  return PeriodogramVec(p.n_samples(), p.index_set(), std::move(out));
}

}  // namespace pstd
