#pragma once

// Special functions needed by the false-alarm and detection formulas:
// regularized incomplete beta and gamma, central / noncentral F and
// chi-squared CDFs. All functions are pure and reentrant.

namespace pstd::specfun {

/// Degrees of freedom and noncentrality of an F(d1, d2) law.
struct DistParams {
  int d1 = 1;
  int d2 = 1;
  double lambda = 0.0;
};

/// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double x, double a, double b);

/// Regularized lower incomplete gamma P(a, x).
double reg_inc_gamma_lower(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double reg_inc_gamma_upper(double a, double x);

/// CDF of the (possibly noncentral) F distribution.
double f_cdf(double x, const DistParams& p);
/// Survival function 1 - f_cdf, evaluated without cancellation.
double f_sf(double x, const DistParams& p);

/// Closed form of the F(2, 2L) CDF: 1 - (L / (L + gamma))^L.
double f_cdf_2_2L(double gamma, int L);
/// Survival of F(2, 2L): (L / (L + gamma))^L.
double f_sf_2_2L(double gamma, int L);

/// CDF of the (possibly noncentral) chi-squared distribution.
double chi2_cdf(double x, int dof, double lambda = 0.0);
/// Survival of the (possibly noncentral) chi-squared distribution.
double chi2_sf(double x, int dof, double lambda = 0.0);

}  // namespace pstd::specfun
