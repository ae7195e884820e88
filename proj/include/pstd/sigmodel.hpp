#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pstd/spectral.hpp"

namespace pstd {

/// One sinusoid alpha * sin(2 pi f j + phi), f in cycles per sample.
struct SinusoidComponent {
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
};

/// Deterministic multi-sinusoid signal. An empty model is the null signal.
struct SinusoidModel {
  std::vector<SinusoidComponent> components;

  /// Throws DomainError unless every amplitude > 0 and 0 < f < 1/2.
  void validate() const;
};

/// Keplerian radial-velocity signature of one planet. Times share the unit
/// of `period` (and of the series step).
struct KeplerianModel {
  double semi_amplitude = 0.0;  ///< K (m/s)
  double period = 1.0;          ///< T_p
  double eccentricity = 0.0;    ///< e in [0, 1)
  double omega = 0.0;           ///< argument of periastron (rad)
  double t0 = 0.0;              ///< periastron epoch
  double systemic_velocity = 0.0;

  void validate() const;
};

/// Planets orbiting one star; the systemic velocity of the first planet is
/// the star's and is applied once.
struct MultiPlanetModel {
  std::vector<KeplerianModel> planets;

  void validate() const;
};

/// R_j = sum_q alpha_q sin(2 pi f_q j + phi_q), j = 1..n. `dt` labels the
/// series only; frequencies are per sample.
TimeSeries sinusoid_signal(const SinusoidModel& m, std::size_t n, double dt = 1.0);

/// Eccentric anomaly E solving E - e sin E = M (safeguarded Newton).
double solve_kepler(double mean_anomaly, double eccentricity);

/// True anomaly from eccentric anomaly.
double true_anomaly(double eccentric_anomaly, double eccentricity);

/// v(t) = gamma0 + K [cos(omega + nu(t)) + e cos omega].
std::vector<double> keplerian_rv(const KeplerianModel& m, std::span<const double> times);

/// Sum of the planets' signatures with the systemic velocity added once.
std::vector<double> multi_planet_rv(const MultiPlanetModel& m, std::span<const double> times);

/// t_j = j * dt, j = 1..n.
std::vector<double> sample_times(std::size_t n, double dt);

}  // namespace pstd
