#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "pstd/rng.hpp"
#include "pstd/spectral.hpp"

namespace pstd {

/// AR(p) process x_t + sum_j c_j x_{t-j} = e_t, e_t ~ N(0, innovation_var).
struct ArModel {
  std::vector<double> coeffs;
  double innovation_var = 1.0;
};

/// Noise PSD tabulated on the full Fourier grid k = 0..N/2 of a given N.
struct TabulatedPsd {
  std::size_t n_samples = 0;
  std::vector<double> values;  ///< S_E(nu_k), k = 0..N/2
};

/// Colored Gaussian noise specification under H0.
class NoiseModel {
 public:
  enum class Kind { AR, Tabulated };

  static NoiseModel ar(std::vector<double> coeffs, double innovation_var);
  static NoiseModel white(double variance) { return ar({}, variance); }
  static NoiseModel tabulated(TabulatedPsd table);

  [[nodiscard]] Kind kind() const { return std::holds_alternative<ArModel>(model_) ? Kind::AR : Kind::Tabulated; }
  [[nodiscard]] const ArModel& ar_model() const;
  [[nodiscard]] const TabulatedPsd& table() const;

  /// True PSD on the index set of a length-n grid.
  [[nodiscard]] PeriodogramVec psd_on_grid(std::size_t n, IndexSet set = IndexSet::Omega) const;
  /// Marginal variance of the process.
  [[nodiscard]] double variance() const;

 private:
  explicit NoiseModel(std::variant<ArModel, TabulatedPsd> m) : model_(std::move(m)) {}
  std::variant<ArModel, TabulatedPsd> model_;
};

/// Throws DomainError unless every root of 1 + sum_j c_j z^j has modulus
/// greater than 1 + 1e-9.
void check_ar_stationary(std::span<const double> coeffs);

/// Moduli of the roots of 1 + sum_j c_j z^j (empty for p = 0 or when all
/// roots lie at infinity).
std::vector<double> ar_root_moduli(std::span<const double> coeffs);

/// S(nu) = sigma^2 / |1 + sum_j c_j exp(-2 pi i j nu)|^2 at each frequency
/// (cycles per sample).
std::vector<double> ar_psd(const ArModel& model, std::span<const double> freqs);
/// Same, laid out as a periodogram-shaped table.
PeriodogramVec ar_psd(const ArModel& model, std::size_t n, IndexSet set = IndexSet::Omega);

/// Gaussian AR(p) sample path with max(10 p, 1000) burn-in samples discarded.
TimeSeries gen_ar_noise(const ArModel& model, std::size_t n, RngSeed seed, double dt = 1.0);

/// Exact spectral synthesis: independent circular complex Gaussians with
/// E|X_k|^2 = N S(nu_k) on Omega, real Gaussians at k = 0 and N/2, Hermitian
/// completion and inverse transform. Periodogram ordinates on Omega are
/// exactly S(nu_k) chi2_2 / 2.
TimeSeries gen_psd_noise(const TabulatedPsd& table, std::size_t n, RngSeed seed, double dt = 1.0);

/// Dispatch on the model kind.
TimeSeries gen_noise(const NoiseModel& model, std::size_t n, RngSeed seed, double dt = 1.0);

/// L independent series; series l uses stream seed.stream_index + l.
TrainingSet gen_training_set(const NoiseModel& model, std::size_t n, std::size_t L, RngSeed seed,
                             double dt = 1.0);

/// Continuous PSD curve in physical units (frequency in cycles per time
/// unit, density per unit frequency), interpolated log-log.
class PsdCurve {
 public:
  PsdCurve(std::vector<double> freqs, std::vector<double> values);

  [[nodiscard]] double operator()(double freq) const;
  [[nodiscard]] std::span<const double> freqs() const { return freqs_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }

  /// Discrete-time PSD on the full grid of a length-n series with step dt:
  /// S(nu_k) = scale * S_phys(nu_k / dt) / dt.
  [[nodiscard]] TabulatedPsd tabulate(std::size_t n, double dt, double scale = 1.0) const;

 private:
  std::vector<double> freqs_;
  std::vector<double> values_;
};

/// Stationary AR(6) with a low-frequency excess and a valley near
/// 0.3 cycles per sample (poles at radii 0.85, 0.75, 0.6; angles 0.01, 0.12,
/// 0.46 cycles per sample). Used for the colored-noise experiments.
ArModel reference_ar6();

}  // namespace pstd
