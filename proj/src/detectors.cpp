#include "pstd/detectors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>

#include "pstd/errors.hpp"
#include "pstd/rng.hpp"
#include "pstd/specfun.hpp"

namespace pstd {
namespace {

constexpr double kMinPValue = 1e-300;
constexpr double kMinHcVariance = 1e-300;

std::size_t search_limit(std::size_t n_v, double alpha0) {
  if (!(alpha0 > 0.0 && alpha0 <= 1.0)) throw DomainError("alpha0 must lie in (0, 1]");
  const auto k = static_cast<std::size_t>(std::floor(alpha0 * static_cast<double>(n_v) + 1e-9));
  if (k < 1) throw DomainError("alpha0 * N_v must be >= 1");
  return std::min(k, n_v);
}

std::vector<double> sorted_pvalues(const PValueVec& v) {
  if (v.values.empty()) throw InputError("p-value vector is empty");
  std::vector<double> s(v.values);
  std::sort(s.begin(), s.end());
  return s;
}

double clamp_pvalue(double v) { return std::clamp(v, std::numeric_limits<double>::min(), 1.0); }

double hc_sorted(std::span<const double> s, double alpha0) {
  const std::size_t n = s.size();
  const std::size_t kmax = search_limit(n, alpha0);
  const double dn = static_cast<double>(n);
  const double root_n = std::sqrt(dn);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= kmax; ++k) {
    const double v = std::clamp(s[k - 1], kMinPValue, 1.0);
    const double var = std::max(v * (1.0 - v), kMinHcVariance);
    best = std::max(best, root_n * (static_cast<double>(k) / dn - v) / std::sqrt(var));
  }
  return best;
}

double bj_sorted(std::span<const double> s, double alpha0) {
  const std::size_t n = s.size();
  const std::size_t kmax = search_limit(n, alpha0);
  double best = 0.0;
  for (std::size_t k = 1; k <= kmax; ++k) {
    const double x = 1.0 - std::clamp(s[k - 1], 0.0, 1.0);
    best = std::max(best, specfun::reg_inc_beta(x, static_cast<double>(n - k + 1), static_cast<double>(k)));
  }
  return best;
}

}  // namespace

std::string_view to_string(TestName t) {
  switch (t) {
    case TestName::TM: return "TM";
    case TestName::TF: return "TF";
    case TestName::TC: return "TC";
    case TestName::HC: return "HC";
    case TestName::BJ: return "BJ";
  }
  return "?";
}

TestName parse_test_name(std::string_view s) {
  std::string u(s);
  for (char& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (u == "TM") return TestName::TM;
  if (u == "TF") return TestName::TF;
  if (u == "TC") return TestName::TC;
  if (u == "HC" || u == "HC*") return TestName::HC;
  if (u == "BJ") return TestName::BJ;
  throw InputError("unknown test name '" + std::string(s) + "'");
}

std::string TestSpec::label() const {
  std::string out(to_string(name));
  if (name == TestName::TC) out += "(" + std::to_string(n_c) + ")";
  return out;
}

TestStatistic t_max(std::span<const double> z) {
  if (z.empty()) throw InputError("t_max: empty input");
  return {TestName::TM, *std::max_element(z.begin(), z.end()), 1, 0.0};
}

TestStatistic t_fisher(std::span<const double> z) {
  if (z.empty()) throw InputError("t_fisher: empty input");
  double sum = 0.0;
  double mx = 0.0;
  for (double v : z) {
    if (v < 0.0) throw DomainError("t_fisher: ordinates must be >= 0");
    sum += v;
    mx = std::max(mx, v);
  }
  if (sum == 0.0) throw DomainError("t_fisher: all-zero input");
  return {TestName::TF, mx / sum, 0, 0.0};
}

TestStatistic t_c(std::span<const double> z, std::size_t n_c) {
  if (n_c < 1 || n_c > z.size()) throw DomainError("t_c: N_C must lie in [1, length]");
  std::vector<double> w(z.begin(), z.end());
  const auto nth = w.begin() + static_cast<std::ptrdiff_t>(n_c - 1);
  std::nth_element(w.begin(), nth, w.end(), std::greater<>());
  return {TestName::TC, *nth, n_c, 0.0};
}

PValueVec pvalues_standardized(const PeriodogramVec& p_std, int L) {
  if (L < 1) throw DomainError("pvalues_standardized: L must be >= 1");
  PValueVec out{std::vector<double>(p_std.size()), {NullModel::Kind::FisherF, L}};
  const std::size_t half = p_std.n_samples() / 2;
  for (std::size_t i = 0; i < p_std.size(); ++i) {
    const std::size_t k = p_std.index(i);
    const double v = (k == 0 || k == half) ? specfun::f_sf(p_std[i], {1, L, 0.0})
                                           : specfun::f_sf_2_2L(p_std[i], L);
    out.values[i] = clamp_pvalue(v);
  }
  return out;
}

PValueVec pvalues_whitenoise(const PeriodogramVec& p, double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("pvalues_whitenoise: variance must be positive");
  PValueVec out{std::vector<double>(p.size()), {NullModel::Kind::ScaledChi2, 0}};
  const std::size_t half = p.n_samples() / 2;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const std::size_t k = p.index(i);
    const double z = 2.0 * p[i] / sigma2;
    // The edge ordinates are sigma^2 chi2_1, i.e. Z/2 ~ chi2_1.
    const double v = (k == 0 || k == half) ? specfun::chi2_sf(0.5 * z, 1) : std::exp(-0.5 * z);
    out.values[i] = clamp_pvalue(v);
  }
  return out;
}

PValueVec pvalues_unit_exponential(const PeriodogramVec& z) {
  PValueVec out{std::vector<double>(z.size()), {NullModel::Kind::ScaledChi2, 0}};
  const std::size_t half = z.n_samples() / 2;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const std::size_t k = z.index(i);
    const double v = (k == 0 || k == half) ? specfun::chi2_sf(z[i], 1) : std::exp(-z[i]);
    out.values[i] = clamp_pvalue(v);
  }
  return out;
}

TestStatistic hc_star(const PValueVec& v, double alpha0) {
  const auto s = sorted_pvalues(v);
  return {TestName::HC, hc_sorted(s, alpha0), 0, alpha0};
}

TestStatistic bj(const PValueVec& v, double alpha0) {
  const auto s = sorted_pvalues(v);
  return {TestName::BJ, bj_sorted(s, alpha0), 0, alpha0};
}

Decision decide(const TestStatistic& stat, double threshold) {
  return stat.value > threshold ? Decision::H1 : Decision::H0;
}

TestStatistic compute_statistic(const TestSpec& spec, std::span<const double> z, const PValueVec* v) {
  switch (spec.name) {
    case TestName::TM: return t_max(z);
    case TestName::TF: return t_fisher(z);
    case TestName::TC: return t_c(z, spec.n_c);
    case TestName::HC:
    case TestName::BJ:
      if (v == nullptr) throw InputError("HC/BJ need p-values");
      return spec.name == TestName::HC ? hc_star(*v, spec.alpha0) : bj(*v, spec.alpha0);
  }
  throw InputError("unknown test");
}

double empirical_threshold(std::span<const double> sorted_null, double pfa) {
  if (sorted_null.empty()) throw InputError("empirical_threshold: empty null sample");
  if (!(pfa > 0.0 && pfa < 1.0)) throw DomainError("empirical_threshold: pfa must lie in (0, 1)");
  const std::size_t n = sorted_null.size();
  const auto m = static_cast<std::size_t>(std::floor(pfa * static_cast<double>(n) + 1e-9));
  return sorted_null[n - std::min(m, n - 1) - 1];
}

UniformNullCalibration::UniformNullCalibration(TestSpec spec, std::size_t n_v, std::size_t trials,
                                               std::uint64_t seed) {
  if (spec.name != TestName::HC && spec.name != TestName::BJ)
    throw InputError("uniform calibration applies to HC and BJ only");
  if (trials < 1) throw InputError("calibration needs at least one trial");
  search_limit(n_v, spec.alpha0);
  sorted_.resize(trials);
  std::vector<double> u(n_v);
  for (std::size_t t = 0; t < trials; ++t) {
    PhiloxEngine eng(RngSeed{seed, t});
    for (double& x : u) x = 1.0 - eng.uniform();  // (0, 1]
    std::sort(u.begin(), u.end());
    sorted_[t] = spec.name == TestName::HC ? hc_sorted(u, spec.alpha0) : bj_sorted(u, spec.alpha0);
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double UniformNullCalibration::threshold(double pfa) const { return empirical_threshold(sorted_, pfa); }

std::shared_ptr<const UniformNullCalibration> cached_uniform_calibration(const TestSpec& spec, std::size_t n_v,
                                                                         std::size_t trials, std::uint64_t seed) {
  using Key = std::tuple<int, std::size_t, double, std::size_t, std::uint64_t>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const UniformNullCalibration>> cache;
  const Key key{static_cast<int>(spec.name), n_v, spec.alpha0, trials, seed};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  // Built outside the lock; the first finished calibration is published.
  auto cal = std::make_shared<const UniformNullCalibration>(spec, n_v, trials, seed);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(cal)).first->second;
}

}  // namespace pstd
