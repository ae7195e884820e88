#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pstd {

/// Which Fourier indices a periodogram-shaped vector covers.
///  - Full:  k = 0 .. N/2
///  - Omega: k = 1 .. N/2 - 1 (DC and Nyquist excluded)
enum class IndexSet { Full, Omega };

/// Evenly sampled real series. N must be even and >= 4; samples finite.
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> samples, double dt = 1.0);

  [[nodiscard]] std::size_t size() const { return samples_.size(); }
  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] std::span<const double> samples() const { return samples_; }
  [[nodiscard]] double operator[](std::size_t i) const { return samples_[i]; }

 private:
  std::vector<double> samples_;
  double dt_;
};

/// Nonnegative ordinates on the Fourier grid nu_k = k/N (cycles per sample).
class PeriodogramVec {
 public:
  PeriodogramVec(std::size_t n_samples, IndexSet set, std::vector<double> ordinates);

  [[nodiscard]] std::size_t n_samples() const { return n_; }
  [[nodiscard]] IndexSet index_set() const { return set_; }
  [[nodiscard]] std::size_t size() const { return ordinates_.size(); }
  [[nodiscard]] std::span<const double> ordinates() const { return ordinates_; }
  [[nodiscard]] double operator[](std::size_t i) const { return ordinates_[i]; }
  /// Fourier index k of entry i.
  [[nodiscard]] std::size_t index(std::size_t i) const { return i + first_index(); }
  /// Frequency of entry i in cycles per sample.
  [[nodiscard]] double frequency(std::size_t i) const {
    return static_cast<double>(index(i)) / static_cast<double>(n_);
  }
  [[nodiscard]] std::size_t first_index() const { return set_ == IndexSet::Omega ? 1 : 0; }

  [[nodiscard]] bool same_grid(const PeriodogramVec& other) const {
    return n_ == other.n_ && set_ == other.set_;
  }

 private:
  std::size_t n_;
  IndexSet set_;
  std::vector<double> ordinates_;
};

/// L independent noise-only series sharing the observation grid.
class TrainingSet {
 public:
  explicit TrainingSet(std::vector<TimeSeries> series);

  [[nodiscard]] std::size_t size() const { return series_.size(); }
  [[nodiscard]] const TimeSeries& operator[](std::size_t i) const { return series_[i]; }
  [[nodiscard]] std::span<const TimeSeries> series() const { return series_; }
  [[nodiscard]] std::size_t n_samples() const { return series_.front().size(); }
  [[nodiscard]] double dt() const { return series_.front().dt(); }

 private:
  std::vector<TimeSeries> series_;
};

/// Number of entries of an index set for series length n.
std::size_t index_set_size(std::size_t n, IndexSet set);

/// Half-spectrum X_k = sum_j x_j exp(-2 pi i k j / N), k = 0..N/2, by direct
/// O(N^2) summation. Reference path.
std::vector<std::complex<double>> dft_direct(std::span<const double> x);
/// Same half-spectrum through a mixed-radix FFT (any N).
std::vector<std::complex<double>> dft_fast(std::span<const double> x);
/// Inverse of the half-spectrum of a real series of length n (unnormalized:
/// returns sum_k X_k exp(+2 pi i k j / N) over the full Hermitian spectrum).
std::vector<double> idft_fast(std::span<const std::complex<double>> half, std::size_t n);

/// Schuster periodogram P(nu_k) = |X_k|^2 / N with unit sampling step.
PeriodogramVec periodogram(const TimeSeries& x, IndexSet set = IndexSet::Omega);
/// Pointwise mean of the periodograms of a training set.
PeriodogramVec averaged_periodogram(const TrainingSet& ts, IndexSet set = IndexSet::Omega);
/// Frequency-wise ratio p / ref. Throws InputError on grid mismatch or on a
/// non-positive reference ordinate.
PeriodogramVec standardize(const PeriodogramVec& p, const PeriodogramVec& ref);

}  // namespace pstd
