#include "pstd/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pstd/errors.hpp"
#include "pstd/specfun.hpp"

namespace pstd {
namespace {

using std::numbers::pi;

void check_n(std::size_t n) {
  if (n < 4 || n % 2 != 0) throw DomainError("N must be even and >= 4");
}

void check_L(int L) {
  if (L < 1) throw DomainError("L must be >= 1");
}

void check_pfa(double pfa) {
  if (!(pfa > 0.0 && pfa < 1.0)) throw DomainError("target P_FA must lie in (0, 1)");
}

void check_gamma(double gamma) {
  if (std::isnan(gamma) || gamma < 0.0) throw DomainError("threshold must be >= 0");
}

void check_nc(std::size_t n, std::size_t n_c) {
  if (n_c < 1 || n_c > n / 2 - 1) throw DomainError("N_C must lie in [1, N/2 - 1]");
}

// Pr(Bin(eta, u) >= n_c) = I_u(n_c, eta - n_c + 1).
double binomial_tail(double u, std::size_t eta, std::size_t n_c) {
  if (n_c == 0) return 1.0;
  if (n_c > eta) return 0.0;
  return specfun::reg_inc_beta(std::clamp(u, 0.0, 1.0), static_cast<double>(n_c),
                               static_cast<double>(eta - n_c + 1));
}

// Reduces nu to d in [-1/2, 1/2); D_N is 1-periodic.
double reduce(double nu) { return nu - std::floor(nu + 0.5); }

// sin(N pi d) / (N sin(pi d)) for |d| <= 1/2.
double dirichlet_ratio(double d, std::size_t n) {
  const double dn = static_cast<double>(n);
  if (std::fabs(d) < 1e-9) return 1.0 - (dn * dn - 1.0) * pi * pi * d * d / 6.0;
  return std::sin(dn * pi * d) / (dn * std::sin(pi * d));
}

// One sinusoid's leakage into bin nu, as modulus and phase of z_q.
struct Leak {
  double kappa;
  double theta;
};

Leak leakage(const SinusoidComponent& c, double nu, std::size_t n) {
  const double np1 = static_cast<double>(n) + 1.0;
  const double dp = reduce(c.frequency - nu);
  const double dm = reduce(c.frequency + nu);
  const double xp = dirichlet_ratio(dp, n);
  const double xm = dirichlet_ratio(dm, n);
  const double tp = np1 * pi * dp + (c.phase - pi / 2);
  const double tm = -(np1 * pi * dm + (c.phase + pi / 2));
  const double re = xp * std::cos(tp) - xm * std::cos(tm);
  const double im = xp * std::sin(tp) - xm * std::sin(tm);
  const double k2 = xp * xp + xm * xm - 2.0 * xp * xm * std::cos(tp - tm);
  return {std::sqrt(std::max(k2, 0.0)), std::atan2(im, re)};
}

std::vector<double> omega_lambdas(const Scenario& sc) {
  return noncentrality(sc, IndexSet::Omega).lambdas;
}

double ordinate_sf(double gamma, int L, double lambda) {
  if (lambda <= kLambdaFloor) return specfun::f_sf_2_2L(gamma, L);
  return specfun::f_sf(gamma, {2, 2 * L, lambda});
}

void enumerate_small_subsets(std::span<const double> p, std::size_t max_size, std::size_t start,
                             std::size_t size, std::vector<char>& in, double& acc) {
  double prob = 1.0;
  for (std::size_t k = 0; k < p.size(); ++k) prob *= in[k] ? p[k] : 1.0 - p[k];
  acc += prob;
  if (size == max_size) return;
  for (std::size_t k = start; k < p.size(); ++k) {
    in[k] = 1;
    enumerate_small_subsets(p, max_size, k + 1, size + 1, in, acc);
    in[k] = 0;
  }
}

}  // namespace

void Scenario::validate() const {
  check_n(n);
  check_L(L);
  if (noise_psd.size() != n / 2 + 1)
    throw InputError("Scenario: noise PSD must cover k = 0..N/2 (" + std::to_string(n / 2 + 1) + " values)");
  for (double s : noise_psd)
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("Scenario: noise PSD must be positive");
  signal.validate();
}

std::complex<double> dirichlet_kernel(double nu, std::size_t n) {
  if (n < 1) throw DomainError("dirichlet_kernel: N must be >= 1");
  const double d = reduce(nu);
  return std::polar(dirichlet_ratio(d, n), (static_cast<double>(n) + 1.0) * pi * d);
}

double fejer_kernel(double nu, std::size_t n) { return std::norm(dirichlet_kernel(nu, n)); }

NoncentralityVec noncentrality(const Scenario& sc, IndexSet set) {
  sc.validate();
  const std::size_t n = sc.n;
  const std::size_t first = set == IndexSet::Omega ? 1 : 0;
  const std::size_t count = index_set_size(n, set);
  NoncentralityVec out{set, std::vector<double>(count, 0.0)};
  const auto& comps = sc.signal.components;
  if (comps.empty()) return out;

  std::vector<Leak> leaks(comps.size());
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t k = first + i;
    const double nu = static_cast<double>(k) / static_cast<double>(n);
    for (std::size_t q = 0; q < comps.size(); ++q) leaks[q] = leakage(comps[q], nu, n);
    double acc = 0.0;
    for (std::size_t q = 0; q < comps.size(); ++q) {
      const double aq = comps[q].amplitude * leaks[q].kappa;
      double cross = 0.0;
      for (std::size_t l = q + 1; l < comps.size(); ++l)
        cross += comps[l].amplitude * leaks[l].kappa * std::cos(leaks[q].theta - leaks[l].theta);
      acc += aq * aq + 2.0 * aq * cross;
    }
    double lambda = static_cast<double>(n) / (2.0 * sc.noise_psd[k]) * acc;
    if (k == 0 || k == n / 2) lambda *= 0.5;
    out.lambdas[i] = std::max(lambda, 0.0);
  }
  return out;
}

NoncentralityVec noncentrality_from_signal(std::span<const double> signal, std::span<const double> noise_psd_full) {
  const std::size_t n = signal.size();
  check_n(n);
  if (noise_psd_full.size() != n / 2 + 1) throw InputError("noncentrality: PSD must cover k = 0..N/2");
  const auto x = dft_fast(signal);
  NoncentralityVec out{IndexSet::Omega, std::vector<double>(n / 2 - 1)};
  for (std::size_t k = 1; k < n / 2; ++k) {
    if (!(noise_psd_full[k] > 0.0)) throw DomainError("noncentrality: PSD must be positive");
    out.lambdas[k - 1] = 2.0 * std::norm(x[k]) / (static_cast<double>(n) * noise_psd_full[k]);
  }
  return out;
}

double binomial_tail_inverse(double pfa, std::size_t eta, std::size_t n_c) {
  check_pfa(pfa);
  if (n_c < 1 || n_c > eta) throw DomainError("binomial_tail_inverse: N_C must lie in [1, eta]");
  if (n_c == 1) return -std::expm1(std::log1p(-pfa) / static_cast<double>(eta));
  // The tail is increasing in u; bisect on log u.
  double lo = std::log(1e-300);
  double hi = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (binomial_tail(std::exp(mid), eta, n_c) < pfa) lo = mid;
    else hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

double pfa_tm(double gamma, std::size_t n, int L) {
  check_gamma(gamma);
  check_n(n);
  check_L(L);
  const double u = specfun::f_sf_2_2L(gamma, L);
  return std::clamp(-std::expm1(static_cast<double>(n / 2 - 1) * std::log1p(-u)), 0.0, 1.0);
}

double gamma_tm(double pfa, std::size_t n, int L) {
  check_pfa(pfa);
  check_n(n);
  check_L(L);
  const double u = -std::expm1(std::log1p(-pfa) / static_cast<double>(n / 2 - 1));
  return static_cast<double>(L) * std::expm1(-std::log(u) / static_cast<double>(L));
}

double pdet_tm(double gamma, std::span<const double> lambdas, int L) {
  check_gamma(gamma);
  check_L(L);
  double log_prod = 0.0;
  for (double lam : lambdas) {
    const double sf = ordinate_sf(gamma, L, lam);
    if (sf >= 1.0) return 1.0;
    log_prod += std::log1p(-sf);
  }
  return std::clamp(-std::expm1(log_prod), 0.0, 1.0);
}

double pdet_tm(double gamma, const Scenario& sc) { return pdet_tm(gamma, omega_lambdas(sc), sc.L); }

std::vector<double> roc_tm(std::span<const double> pfa_grid, const Scenario& sc) {
  const auto lambdas = omega_lambdas(sc);
  std::vector<double> out;
  out.reserve(pfa_grid.size());
  for (double pfa : pfa_grid) {
    if (std::isnan(pfa) || pfa < 0.0 || pfa > 1.0) throw DomainError("roc_tm: P_FA must lie in [0, 1]");
    if (pfa >= 1.0) out.push_back(1.0);
    else if (pfa <= 0.0) out.push_back(0.0);
    else out.push_back(pdet_tm(gamma_tm(pfa, sc.n, sc.L), lambdas, sc.L));
  }
  return out;
}

double pfa_tm_limit(double gamma, std::size_t n) {
  check_gamma(gamma);
  check_n(n);
  return std::clamp(-std::expm1(static_cast<double>(n / 2 - 1) * std::log1p(-std::exp(-gamma))), 0.0, 1.0);
}

double gamma_tm_limit(double pfa, std::size_t n) {
  check_pfa(pfa);
  check_n(n);
  return -std::log(-std::expm1(std::log1p(-pfa) / static_cast<double>(n / 2 - 1)));
}

double pdet_tm_limit(double gamma, std::span<const double> lambdas) {
  check_gamma(gamma);
  double log_prod = 0.0;
  for (double lam : lambdas) {
    // P / S ~ chi2_{2,lambda} / 2.
    const double sf = lam <= kLambdaFloor ? std::exp(-gamma) : specfun::chi2_sf(2.0 * gamma, 2, lam);
    if (sf >= 1.0) return 1.0;
    log_prod += std::log1p(-sf);
  }
  return std::clamp(-std::expm1(log_prod), 0.0, 1.0);
}

double pfa_tc(double gamma, std::size_t n, int L, std::size_t n_c) {
  check_gamma(gamma);
  check_n(n);
  check_L(L);
  check_nc(n, n_c);
  return binomial_tail(specfun::f_sf_2_2L(gamma, L), n / 2 - 1, n_c);
}

double gamma_tc(double pfa, std::size_t n, int L, std::size_t n_c) {
  check_n(n);
  check_L(L);
  check_nc(n, n_c);
  const double u = binomial_tail_inverse(pfa, n / 2 - 1, n_c);
  return static_cast<double>(L) * std::expm1(-std::log(u) / static_cast<double>(L));
}

double pdet_tc(double gamma, std::span<const double> lambdas, int L, std::size_t n_c) {
  check_gamma(gamma);
  check_L(L);
  if (n_c < 1 || n_c > lambdas.size()) throw DomainError("pdet_tc: N_C must lie in [1, |Omega|]");

  // dist[i] = Pr(i exceedances among the signal-bearing indices), i < N_C;
  // mass reaching N_C is absorbed since it already decides the event.
  std::vector<double> dist(n_c, 0.0);
  dist[0] = 1.0;
  double absorbed = 0.0;
  std::size_t bulk = 0;
  for (double lam : lambdas) {
    if (lam <= kLambdaFloor) {
      ++bulk;
      continue;
    }
    const double p = ordinate_sf(gamma, L, lam);
    absorbed += dist[n_c - 1] * p;
    for (std::size_t i = n_c - 1; i > 0; --i) dist[i] = dist[i] * (1.0 - p) + dist[i - 1] * p;
    dist[0] *= 1.0 - p;
  }
  const double p0 = specfun::f_sf_2_2L(gamma, L);
  double total = absorbed;
  for (std::size_t i = 0; i < n_c; ++i) total += dist[i] * binomial_tail(p0, bulk, n_c - i);
  return std::clamp(total, 0.0, 1.0);
}

double pdet_tc(double gamma, const Scenario& sc, std::size_t n_c) {
  check_nc(sc.n, n_c);
  return pdet_tc(gamma, omega_lambdas(sc), sc.L, n_c);
}

double pdet_tc_bruteforce(double gamma, std::span<const double> lambdas, int L, std::size_t n_c) {
  check_gamma(gamma);
  check_L(L);
  if (lambdas.size() > 20) throw DomainError("pdet_tc_bruteforce: enumeration limited to eta <= 20");
  if (n_c < 1 || n_c > lambdas.size()) throw DomainError("pdet_tc_bruteforce: N_C must lie in [1, eta]");
  std::vector<double> p(lambdas.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = ordinate_sf(gamma, L, lambdas[k]);
  // 1 - sum over exceedance sets of size < N_C.
  std::vector<char> in(p.size(), 0);
  double acc = 0.0;
  enumerate_small_subsets(p, n_c - 1, 0, 0, in, acc);
  return std::clamp(1.0 - acc, 0.0, 1.0);
}

double pdet_tc_bruteforce(double gamma, const Scenario& sc, std::size_t n_c) {
  sc.validate();
  if (sc.eta() > 20) throw DomainError("pdet_tc_bruteforce: enumeration limited to eta <= 20");
  return pdet_tc_bruteforce(gamma, omega_lambdas(sc), sc.L, n_c);
}

double pfa_white_assumed(double gamma, std::size_t n, OrderTest test, std::size_t n_c) {
  check_gamma(gamma);
  check_n(n);
  // Exceedance probability of one chi2_2 ordinate.
  const double s = std::exp(-0.5 * gamma);
  if (test == OrderTest::TM)
    return std::clamp(-std::expm1(static_cast<double>(n / 2 - 1) * std::log1p(-s)), 0.0, 1.0);
  check_nc(n, n_c);
  return binomial_tail(s, n / 2 - 1, n_c);
}

double gamma_white_assumed(double pfa, std::size_t n, OrderTest test, std::size_t n_c) {
  check_n(n);
  const std::size_t nc = test == OrderTest::TM ? 1 : n_c;
  check_nc(n, nc);
  return -2.0 * std::log(binomial_tail_inverse(pfa, n / 2 - 1, nc));
}

double pfa_ar_approx(double gamma, std::size_t n, std::size_t n_c) {
  check_gamma(gamma);
  check_n(n);
  check_nc(n, n_c);
  return binomial_tail(std::exp(-gamma), n / 2 - 1, n_c);
}

double gamma_ar_approx(double pfa, std::size_t n, std::size_t n_c) {
  check_n(n);
  check_nc(n, n_c);
  return -std::log(binomial_tail_inverse(pfa, n / 2 - 1, n_c));
}

}  // namespace pstd
