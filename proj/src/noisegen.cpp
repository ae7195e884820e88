#include "pstd/noisegen.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "pstd/errors.hpp"

namespace pstd {
namespace {

constexpr double kStationarityMargin = 1e-9;
constexpr std::size_t kVarianceGrid = 1 << 16;

}  // namespace

NoiseModel NoiseModel::ar(std::vector<double> coeffs, double innovation_var) {
  if (!(innovation_var > 0.0) || !std::isfinite(innovation_var))
    throw DomainError("NoiseModel: innovation variance must be positive");
  check_ar_stationary(coeffs);
  return NoiseModel(ArModel{std::move(coeffs), innovation_var});
}

NoiseModel NoiseModel::tabulated(TabulatedPsd table) {
  if (table.n_samples < 4 || table.n_samples % 2 != 0)
    throw InputError("NoiseModel: tabulated PSD needs an even grid length >= 4");
  if (table.values.size() != table.n_samples / 2 + 1)
    throw InputError("NoiseModel: tabulated PSD must cover k = 0..N/2");
  for (double v : table.values)
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("NoiseModel: tabulated PSD must be positive");
  return NoiseModel(std::move(table));
}

const ArModel& NoiseModel::ar_model() const {
  if (const auto* m = std::get_if<ArModel>(&model_)) return *m;
  throw InputError("NoiseModel: not an AR model");
}

const TabulatedPsd& NoiseModel::table() const {
  if (const auto* t = std::get_if<TabulatedPsd>(&model_)) return *t;
  throw InputError("NoiseModel: not a tabulated model");
}

PeriodogramVec NoiseModel::psd_on_grid(std::size_t n, IndexSet set) const {
  if (kind() == Kind::AR) return ar_psd(ar_model(), n, set);
  const auto& t = table();
  if (t.n_samples != n)
    throw InputError("NoiseModel: tabulated PSD grid (N=" + std::to_string(t.n_samples) +
                     ") does not match N=" + std::to_string(n));
  const std::size_t first = set == IndexSet::Omega ? 1 : 0;
  std::vector<double> v(t.values.begin() + first, t.values.begin() + first + index_set_size(n, set));
  return PeriodogramVec(n, set, std::move(v));
}

double NoiseModel::variance() const {
  if (kind() == Kind::AR) {
    // Periodic trapezoid rule on a dense grid; exponentially accurate for
    // the smooth AR spectrum.
    std::vector<double> f(kVarianceGrid);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(i) / static_cast<double>(f.size());
    const auto s = ar_psd(ar_model(), f);
    double sum = 0.0;
    for (double v : s) sum += v;
    return sum / static_cast<double>(s.size());
  }
  const auto& t = table();
  const std::size_t half = t.n_samples / 2;
  double sum = t.values.front() + t.values.back();
  for (std::size_t k = 1; k < half; ++k) sum += 2.0 * t.values[k];
  return sum / static_cast<double>(t.n_samples);
}

std::vector<double> ar_root_moduli(std::span<const double> coeffs) {
  std::size_t p = coeffs.size();
  while (p > 0 && coeffs[p - 1] == 0.0) --p;
  if (p == 0) return {};
  // Roots w of w^p + c_1 w^{p-1} + ... + c_p are reciprocals of the roots z.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (std::size_t j = 0; j < p; ++j) companion(0, static_cast<Eigen::Index>(j)) = -coeffs[j];
  for (std::size_t i = 1; i < p; ++i) companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  const Eigen::VectorXcd w = companion.eigenvalues();
  std::vector<double> moduli;
  moduli.reserve(p);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double aw = std::abs(w(i));
    moduli.push_back(aw == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / aw);
  }
  std::sort(moduli.begin(), moduli.end());
  return moduli;
}

void check_ar_stationary(std::span<const double> coeffs) {
  for (double c : coeffs)
    if (!std::isfinite(c)) throw DomainError("AR model: non-finite coefficient");
  for (double m : ar_root_moduli(coeffs))
    if (!(m > 1.0 + kStationarityMargin))
      throw DomainError("AR model is not stationary: root modulus " + std::to_string(m) + " <= 1");
}

std::vector<double> ar_psd(const ArModel& model, std::span<const double> freqs) {
  check_ar_stationary(model.coeffs);
  std::vector<double> out(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    std::complex<double> a(1.0, 0.0);
    for (std::size_t j = 0; j < model.coeffs.size(); ++j) {
      const double ph = -2.0 * std::numbers::pi * static_cast<double>(j + 1) * freqs[i];
      a += model.coeffs[j] * std::polar(1.0, ph);
    }
    out[i] = model.innovation_var / std::norm(a);
  }
  return out;
}

PeriodogramVec ar_psd(const ArModel& model, std::size_t n, IndexSet set) {
  const std::size_t count = index_set_size(n, set);
  const std::size_t first = set == IndexSet::Omega ? 1 : 0;
  std::vector<double> f(count);
  for (std::size_t i = 0; i < count; ++i) f[i] = static_cast<double>(first + i) / static_cast<double>(n);
  return PeriodogramVec(n, set, ar_psd(model, f));
}

TimeSeries gen_ar_noise(const ArModel& model, std::size_t n, RngSeed seed, double dt) {
  check_ar_stationary(model.coeffs);
  const std::size_t p = model.coeffs.size();
  const std::size_t burn = std::max<std::size_t>(10 * p, 1000);
  const double sd = std::sqrt(model.innovation_var);
  PhiloxEngine eng(seed);
  std::vector<double> x(burn + n, 0.0);
  for (std::size_t t = 0; t < x.size(); ++t) {
    double v = sd * eng.normal();
    for (std::size_t j = 0; j < p && j < t; ++j) v -= model.coeffs[j] * x[t - j - 1];
    x[t] = v;
  }
  return TimeSeries(std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(burn), x.end()), dt);
}

TimeSeries gen_psd_noise(const TabulatedPsd& table, std::size_t n, RngSeed seed, double dt) {
  if (table.n_samples != n || table.values.size() != n / 2 + 1)
    throw InputError("gen_psd_noise: PSD table is not defined on the grid of N=" + std::to_string(n));
  PhiloxEngine eng(seed);
  const std::size_t half = n / 2;
  const double dn = static_cast<double>(n);
  std::vector<std::complex<double>> spec(half + 1);
  spec[0] = {std::sqrt(dn * table.values[0]) * eng.normal(), 0.0};
  for (std::size_t k = 1; k < half; ++k) {
    const double s = std::sqrt(0.5 * dn * table.values[k]);
    const double re = s * eng.normal();
    const double im = s * eng.normal();
    spec[k] = {re, im};
  }
  spec[half] = {std::sqrt(dn * table.values[half]) * eng.normal(), 0.0};
  auto x = idft_fast(spec, n);
  for (double& v : x) v /= dn;
  return TimeSeries(std::move(x), dt);
}

TimeSeries gen_noise(const NoiseModel& model, std::size_t n, RngSeed seed, double dt) {
  if (model.kind() == NoiseModel::Kind::AR) return gen_ar_noise(model.ar_model(), n, seed, dt);
  return gen_psd_noise(model.table(), n, seed, dt);
}

TrainingSet gen_training_set(const NoiseModel& model, std::size_t n, std::size_t L, RngSeed seed, double dt) {
  if (L < 1) throw InputError("gen_training_set: L must be >= 1");
  std::vector<TimeSeries> series;
  series.reserve(L);
  for (std::size_t l = 0; l < L; ++l) series.push_back(gen_noise(model, n, seed.advanced(l), dt));
  return TrainingSet(std::move(series));
}

PsdCurve::PsdCurve(std::vector<double> freqs, std::vector<double> values)
    : freqs_(std::move(freqs)), values_(std::move(values)) {
  if (freqs_.size() != values_.size() || freqs_.size() < 2)
    throw InputError("PsdCurve: need at least two (frequency, psd) pairs");
  for (std::size_t i = 0; i < freqs_.size(); ++i) {
    if (!(values_[i] > 0.0)) throw InputError("PsdCurve: PSD values must be positive");
    if (!(freqs_[i] >= 0.0)) throw InputError("PsdCurve: frequencies must be >= 0");
    if (i > 0 && !(freqs_[i] > freqs_[i - 1])) throw InputError("PsdCurve: frequencies must increase strictly");
  }
}

double PsdCurve::operator()(double f) const {
  if (f <= freqs_.front()) return values_.front();
  if (f >= freqs_.back()) return values_.back();
  const auto it = std::upper_bound(freqs_.begin(), freqs_.end(), f);
  const std::size_t i = static_cast<std::size_t>(it - freqs_.begin());
  const double f0 = freqs_[i - 1], f1 = freqs_[i];
  const double s0 = values_[i - 1], s1 = values_[i];
  if (f0 <= 0.0) {
    const double w = (f - f0) / (f1 - f0);
    return s0 + w * (s1 - s0);
  }
  const double w = std::log(f / f0) / std::log(f1 / f0);
  return std::exp(std::log(s0) + w * (std::log(s1) - std::log(s0)));
}

TabulatedPsd PsdCurve::tabulate(std::size_t n, double dt, double scale) const {
  if (!(dt > 0.0)) throw InputError("PsdCurve: dt must be positive");
  if (!(scale > 0.0)) throw InputError("PsdCurve: scale must be positive");
  TabulatedPsd t{n, std::vector<double>(n / 2 + 1)};
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double nu = static_cast<double>(k) / static_cast<double>(n);
    t.values[k] = scale * (*this)(nu / dt) / dt;
  }
  return t;
}

ArModel reference_ar6() {
  return ArModel{{-1.276307, 0.640523, -0.199052, 0.046884, 0.000825, -0.0048}, 1.0};
}

}  // namespace pstd
