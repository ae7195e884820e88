#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pstd/spectral.hpp"

namespace pstd {

/// Law under which a vector of p-values was computed.
struct NullModel {
  enum class Kind { FisherF, ScaledChi2 };
  Kind kind = Kind::FisherF;
  int L = 0;  ///< training-set size for FisherF
};

/// Observed p-values, unordered, each in (0, 1].
struct PValueVec {
  std::vector<double> values;
  NullModel null_model;
};

enum class TestName { TM, TF, TC, HC, BJ };

std::string_view to_string(TestName t);
/// Accepts TM, TF, TC, HC, BJ (case-insensitive). Throws InputError.
TestName parse_test_name(std::string_view s);

/// Which statistic to compute, with its tuning parameters.
struct TestSpec {
  TestName name = TestName::TM;
  std::size_t n_c = 1;   ///< T_C order
  double alpha0 = 0.5;   ///< HC / BJ search fraction

  [[nodiscard]] std::string label() const;
};

/// Value of a statistic with provenance.
struct TestStatistic {
  TestName name = TestName::TM;
  double value = 0.0;
  std::size_t n_c = 0;
  double alpha0 = 0.0;
};

enum class Decision { H0, H1 };

/// Largest ordinate.
TestStatistic t_max(std::span<const double> z);
/// Largest ordinate over the sum of ordinates.
TestStatistic t_fisher(std::span<const double> z);
/// N_C-th largest ordinate.
TestStatistic t_c(std::span<const double> z, std::size_t n_c);

/// v_k = 1 - Phi_F(p_k; 2, 2L) on Omega, 1 - Phi_F(p_k; 1, L) at k = 0, N/2.
PValueVec pvalues_standardized(const PeriodogramVec& p_std, int L);
/// v_k = 1 - Phi_chi2_2(2 P_k / sigma2) on Omega, chi2_1 at the edges.
PValueVec pvalues_whitenoise(const PeriodogramVec& p, double sigma2);
/// v_k = exp(-Z_k) for Z = P / S (unit-mean exponential law on Omega),
/// chi2_1 law of Z at the edges.
PValueVec pvalues_unit_exponential(const PeriodogramVec& z);

/// Higher Criticism over the smallest floor(alpha0 * N_v) p-values.
TestStatistic hc_star(const PValueVec& v, double alpha0 = 0.5);
/// Berk-Jones over the smallest floor(alpha0 * N_v) p-values.
TestStatistic bj(const PValueVec& v, double alpha0 = 0.5);

/// H1 iff value > threshold (ties decide H0).
Decision decide(const TestStatistic& stat, double threshold);

/// Statistic `spec` on ordinates `z` whose p-values are `v` (v is used only
/// by HC and BJ and may be empty otherwise).
TestStatistic compute_statistic(const TestSpec& spec, std::span<const double> z, const PValueVec* v);

/// Threshold t taken from an ascending null sample such that at most
/// floor(pfa * n) sample values exceed t.
double empirical_threshold(std::span<const double> sorted_null, double pfa);

/// Null distribution of HC or BJ for n_v i.i.d. uniform p-values, sampled by
/// Monte Carlo. Standardization makes the null pivotal, so one calibration
/// per (test, n_v, alpha0) serves every noise PSD.
class UniformNullCalibration {
 public:
  UniformNullCalibration(TestSpec spec, std::size_t n_v, std::size_t trials, std::uint64_t seed);

  /// Smallest threshold whose empirical exceedance rate is <= pfa.
  [[nodiscard]] double threshold(double pfa) const;
  [[nodiscard]] std::span<const double> sorted_values() const { return sorted_; }
  [[nodiscard]] std::size_t trials() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

/// Process-wide write-once cache of calibrations keyed by (test, n_v,
/// alpha0, trials, seed).
std::shared_ptr<const UniformNullCalibration> cached_uniform_calibration(const TestSpec& spec, std::size_t n_v,
                                                                         std::size_t trials = 100000,
                                                                         std::uint64_t seed = 0x5eed);

}  // namespace pstd
