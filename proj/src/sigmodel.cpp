#include "pstd/sigmodel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pstd/errors.hpp"

namespace pstd {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kKeplerMaxIter = 100;
constexpr double kKeplerTol = 1e-12;

}  // namespace

void SinusoidModel::validate() const {
  for (const auto& c : components) {
    if (!(c.amplitude > 0.0) || !std::isfinite(c.amplitude))
      throw DomainError("SinusoidModel: amplitudes must be positive");
    if (!(c.frequency > 0.0) || !(c.frequency < 0.5))
      throw DomainError("SinusoidModel: frequency " + std::to_string(c.frequency) +
                        " outside (0, 1/2) cycles per sample");
    if (!std::isfinite(c.phase)) throw DomainError("SinusoidModel: phase must be finite");
  }
}

void KeplerianModel::validate() const {
  if (!(semi_amplitude >= 0.0)) throw DomainError("KeplerianModel: K must be >= 0");
  if (!(period > 0.0)) throw DomainError("KeplerianModel: period must be > 0");
  if (!(eccentricity >= 0.0 && eccentricity < 1.0))
    throw DomainError("KeplerianModel: eccentricity must lie in [0, 1)");
}

void MultiPlanetModel::validate() const {
  if (planets.empty()) throw DomainError("MultiPlanetModel: at least one planet required");
  for (const auto& p : planets) p.validate();
}

std::vector<double> sample_times(std::size_t n, double dt) {
  std::vector<double> t(n);
  for (std::size_t j = 0; j < n; ++j) t[j] = static_cast<double>(j + 1) * dt;
  return t;
}

TimeSeries sinusoid_signal(const SinusoidModel& m, std::size_t n, double dt) {
  m.validate();
  std::vector<double> r(n, 0.0);
  for (const auto& c : m.components) {
    for (std::size_t j = 0; j < n; ++j) {
      // Reduce the cycle count before scaling to keep the argument small.
      const double cycles = std::fmod(c.frequency * static_cast<double>(j + 1), 1.0);
      r[j] += c.amplitude * std::sin(kTwoPi * cycles + c.phase);
    }
  }
  return TimeSeries(std::move(r), dt);
}

double solve_kepler(double mean_anomaly, double e) {
  if (!(e >= 0.0 && e < 1.0)) throw DomainError("solve_kepler: eccentricity must lie in [0, 1)");
  if (!std::isfinite(mean_anomaly)) throw DomainError("solve_kepler: mean anomaly must be finite");
  if (e == 0.0) return mean_anomaly;

  const double turns = std::floor(mean_anomaly / kTwoPi);
  const double m = mean_anomaly - turns * kTwoPi;  // in [0, 2 pi)
  auto f = [&](double E) { return E - e * std::sin(E) - m; };

  // f is increasing on [0, 2 pi] with f(0) <= 0 <= f(2 pi).
  double lo = 0.0;
  double hi = kTwoPi;
  double E = e > 0.8 ? std::numbers::pi : m + e * std::sin(m);
  for (int it = 0; it < kKeplerMaxIter; ++it) {
    const double fe = f(E);
    if (std::fabs(fe) <= kKeplerTol) {
      // One more Newton step; quadratic convergence removes the residual tolerance.
      const double polished = E - fe / (1.0 - e * std::cos(E));
      return (polished > lo && polished < hi ? polished : E) + turns * kTwoPi;
    }
    if (fe < 0.0)
      lo = E;
    else
      hi = E;
    const double step = fe / (1.0 - e * std::cos(E));
    double next = E - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == E) return E + turns * kTwoPi;
    E = next;
  }
  throw ConvergenceError("solve_kepler: no convergence for M=" + std::to_string(mean_anomaly) +
                         ", e=" + std::to_string(e));
}

double true_anomaly(double E, double e) {
  return 2.0 * std::atan2(std::sqrt(1.0 + e) * std::sin(0.5 * E), std::sqrt(1.0 - e) * std::cos(0.5 * E));
}

std::vector<double> keplerian_rv(const KeplerianModel& m, std::span<const double> times) {
  m.validate();
  std::vector<double> v(times.size());
  const double ecw = m.eccentricity * std::cos(m.omega);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double phase = std::fmod((times[i] - m.t0) / m.period, 1.0);
    const double E = solve_kepler(kTwoPi * phase, m.eccentricity);
    const double nu = true_anomaly(E, m.eccentricity);
    v[i] = m.systemic_velocity + m.semi_amplitude * (std::cos(m.omega + nu) + ecw);
  }
  return v;
}

std::vector<double> multi_planet_rv(const MultiPlanetModel& m, std::span<const double> times) {
  m.validate();
  std::vector<double> v(times.size(), m.planets.front().systemic_velocity);
  for (auto p : m.planets) {
    p.systemic_velocity = 0.0;
    const auto vp = keplerian_rv(p, times);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += vp[i];
  }
  return v;
}

}  // namespace pstd
