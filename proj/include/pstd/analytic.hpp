#pragma once

// Closed-form false-alarm and detection rates of the tests applied to
// standardized periodograms, under the operational assumption that the
// ordinates on Omega are independent.
//
// Conventions: N is the (even) series length, eta = N/2 - 1 the size of
// Omega, L the training-set size. Thresholds gamma act on the standardized
// ordinates P / Pbar_L (or on 2P / sigma^2 for the white-noise formulas,
// and on P / S_AR for the AR approximation).

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "pstd/sigmodel.hpp"
#include "pstd/spectral.hpp"

namespace pstd {

/// Observation setting for the analytic formulas.
struct Scenario {
  std::size_t n = 0;
  int L = 1;
  /// True noise PSD on the full grid k = 0..N/2.
  std::vector<double> noise_psd;
  SinusoidModel signal;

  [[nodiscard]] std::size_t eta() const { return n / 2 - 1; }
  /// Throws if the PSD grid does not match N or is not positive, or L < 1.
  void validate() const;
};

/// Noncentrality parameters lambda_k on an index set.
struct NoncentralityVec {
  IndexSet set = IndexSet::Omega;
  std::vector<double> lambdas;
};

/// D_N(nu) = (1/N) sum_{j=1..N} exp(i 2 pi nu j), by its closed form.
std::complex<double> dirichlet_kernel(double nu, std::size_t n);
/// K_N(nu) = |D_N(nu)|^2.
double fejer_kernel(double nu, std::size_t n);

/// lambda_k from the leakage moduli kappa_q and phases theta_q of each
/// sinusoid; halved at k = 0, N/2 when the Full set is requested.
NoncentralityVec noncentrality(const Scenario& sc, IndexSet set = IndexSet::Omega);

/// lambda_k = 2 N |mu_k|^2 / S(nu_k) on Omega with mu_k the normalized DFT
/// of an arbitrary deterministic signal (used for Keplerian signatures).
NoncentralityVec noncentrality_from_signal(std::span<const double> signal, std::span<const double> noise_psd_full);

/// Indices with lambda below this floor are treated as central.
inline constexpr double kLambdaFloor = 1e-12;

// --- T_M on P / Pbar_L ----------------------------------------------------

double pfa_tm(double gamma, std::size_t n, int L);
double gamma_tm(double pfa, std::size_t n, int L);
double pdet_tm(double gamma, const Scenario& sc);
double pdet_tm(double gamma, std::span<const double> lambdas_omega, int L);
/// P_DET(P_FA) for each entry of the grid.
std::vector<double> roc_tm(std::span<const double> pfa_grid, const Scenario& sc);

// --- T_M in the L -> infinity limit (ordinates P / S_E ~ chi2_2 / 2) --------

double pfa_tm_limit(double gamma, std::size_t n);
double gamma_tm_limit(double pfa, std::size_t n);
double pdet_tm_limit(double gamma, std::span<const double> lambdas_omega);

// --- T_C on P / Pbar_L -----------------------------------------------------

double pfa_tc(double gamma, std::size_t n, int L, std::size_t n_c);
double gamma_tc(double pfa, std::size_t n, int L, std::size_t n_c);
/// Poisson-binomial evaluation of Pr(#{k : Z_k > gamma} >= N_C).
double pdet_tc(double gamma, const Scenario& sc, std::size_t n_c);
double pdet_tc(double gamma, std::span<const double> lambdas_omega, int L, std::size_t n_c);
/// Literal subset enumeration of the same probability (eta <= 20).
double pdet_tc_bruteforce(double gamma, const Scenario& sc, std::size_t n_c);
double pdet_tc_bruteforce(double gamma, std::span<const double> lambdas_omega, int L, std::size_t n_c);

// --- Rates assumed by detectors that believe the noise is white -----------

enum class OrderTest { TM, TC };

/// Rates for Z = 2 P / sigma^2 assumed chi2_2 on Omega.
double pfa_white_assumed(double gamma, std::size_t n, OrderTest test, std::size_t n_c = 1);
double gamma_white_assumed(double pfa, std::size_t n, OrderTest test, std::size_t n_c = 1);

/// Rate of T_C on P / S_AR assuming S_AR = S_E (ordinates unit exponential):
/// I_u(N_C, N/2 - N_C), u = exp(-gamma).
double pfa_ar_approx(double gamma, std::size_t n, std::size_t n_c);
double gamma_ar_approx(double pfa, std::size_t n, std::size_t n_c);

/// Survival probability u of a single Omega ordinate such that
/// Pr(Bin(eta, u) >= n_c) = pfa.
double binomial_tail_inverse(double pfa, std::size_t eta, std::size_t n_c);

}  // namespace pstd
