#pragma once

// Monte-Carlo engine: per-trial detection pipeline, empirical rates, ROC
// curves, the AR-standardization dispersion study and detectability curves.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "pstd/analytic.hpp"
#include "pstd/arfit.hpp"
#include "pstd/detectors.hpp"
#include "pstd/noisegen.hpp"
#include "pstd/sigmodel.hpp"

namespace pstd {

/// How the observation periodogram is turned into the ordinates Z that the
/// tests see, and which p-values accompany them.
struct Standardization {
  enum class Kind {
    Averaged,  ///< Z = P / Pbar_L, fresh training set per trial
    ArFit,     ///< Z = P / S_AR, FPE-selected AR fit of a fresh training set
    None,      ///< Z = 2 P / sigma^2 with the true marginal variance
    TruePsd,   ///< Z = P / S_E
  };
  Kind kind = Kind::Averaged;
  int L = 1;
  std::optional<std::size_t> max_order;  ///< ArFit only

  static Standardization averaged(int L) { return {Kind::Averaged, L, std::nullopt}; }
  static Standardization ar_fit(int L, std::optional<std::size_t> max_order = std::nullopt) {
    return {Kind::ArFit, L, max_order};
  }
  static Standardization none() { return {Kind::None, 0, std::nullopt}; }
  static Standardization true_psd() { return {Kind::TruePsd, 0, std::nullopt}; }
};

std::string to_string(Standardization::Kind k);
Standardization::Kind parse_standardization(std::string_view s);

using SignalSource = std::variant<std::monostate, SinusoidModel, MultiPlanetModel>;

/// One Monte-Carlo configuration. All statistics in `tests` are evaluated on
/// the same realizations.
struct Experiment {
  std::size_t n = 1024;
  double dt = 1.0;
  NoiseModel noise = NoiseModel::white(1.0);
  SignalSource signal;
  Standardization standardization;
  std::vector<TestSpec> tests{TestSpec{}};
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  unsigned jobs = 1;

  void validate() const;
};

/// Precomputes the per-experiment constants (signal samples, true PSD,
/// variance) and evaluates single trials.
class TrialRunner {
 public:
  explicit TrialRunner(const Experiment& ex);

  /// Values of every test for trial `index`; deterministic in (seed, index).
  [[nodiscard]] std::vector<double> operator()(std::size_t index) const;
  /// Standardized ordinates on Omega for trial `index` (before the tests).
  [[nodiscard]] PeriodogramVec ordinates(std::size_t index) const;
  /// Same, with the p-values matching the standardization.
  [[nodiscard]] std::pair<PeriodogramVec, PValueVec> ordinates_and_pvalues(std::size_t index) const;

 private:
  Experiment ex_;
  std::vector<double> signal_;
  std::optional<PeriodogramVec> true_psd_;
  double variance_ = 1.0;
};

std::vector<double> run_trial(const Experiment& ex, std::size_t trial_index);

/// values[t][i]: test t on trial i.
struct ExperimentResult {
  std::vector<std::vector<double>> values;
};

/// All trials, fanned out over ex.jobs threads. The result does not depend
/// on the worker count.
ExperimentResult run_experiment(const Experiment& ex);

struct RateEstimate {
  double rate = 0.0;
  double stderr_ = 0.0;
  std::size_t trials = 0;
};

RateEstimate make_rate(std::size_t hits, std::size_t trials);
/// Fraction of values strictly above the threshold.
RateEstimate rate_above(std::span<const double> values, double threshold);
RateEstimate estimate_rate(const Experiment& ex, double threshold, std::size_t test_index = 0);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
  double stderr_ = 0.0;  ///< zero for analytic points
  std::size_t trials = 0;
};

struct CurveResult {
  std::string label;
  std::string x_label;
  std::string y_label;
  bool analytic = false;
  std::vector<CurvePoint> points;
};

/// Smallest P_FA an empirical null quantile can resolve with `trials` draws.
double min_resolvable_pfa(std::size_t trials);

/// Empirical ROC for every test of the experiments: thresholds are null
/// quantiles, detection rates come from the alternative trials.
std::vector<CurveResult> roc_empirical(const ExperimentResult& null_values, const ExperimentResult& alt_values,
                                       std::span<const TestSpec> tests, std::span<const double> pfa_grid);
std::vector<CurveResult> roc_empirical(const Experiment& ex_null, const Experiment& ex_alt,
                                       std::span<const double> pfa_grid);

/// Dispersion across AR fits of the true P_FA of T_C(P / S_AR, N_C).
struct DispersionCurve {
  int L = 1;
  std::vector<double> thresholds;
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<double> lower;  ///< mean - 3 sd, clipped at 0
  std::vector<double> upper;  ///< mean + 3 sd, clipped at 1
  std::vector<double> min;
  std::vector<double> max;
  /// per_fit[f][j]: estimated true P_FA of fit f at threshold j.
  std::vector<std::vector<double>> per_fit;
  std::vector<std::size_t> orders;
};

struct DispersionStudy {
  std::vector<double> thresholds;
  std::vector<double> approx;  ///< approximated P_FA at each threshold
  std::vector<DispersionCurve> curves;
};

struct DispersionConfig {
  ArModel noise;
  std::size_t n = 1024;
  std::vector<int> L_list{1, 20, 100};
  std::vector<double> thresholds;
  std::size_t outer = 300;
  std::size_t inner = 100;
  std::size_t n_c = 5;
  std::optional<std::size_t> max_order;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  /// Replace every fit by the true model (exact whitening check).
  bool force_true_model = false;
};

DispersionStudy ar_dispersion_study(const DispersionConfig& cfg);

/// Noise PSD that can be laid on any grid (length and step).
struct PsdSource {
  std::variant<ArModel, PsdCurve> model;
  double scale = 1.0;

  [[nodiscard]] TabulatedPsd on_grid(std::size_t n, double dt) const;
};

struct DetectabilityConfig {
  KeplerianModel planet;
  PsdSource noise;
  double dt = 1.0;  ///< nominal step, nudged per N to put 1/T_p on the grid
  std::vector<double> pfa_list{0.01, 0.1, 0.5};
  std::vector<std::optional<int>> L_list{5, 20, 100, std::nullopt};  ///< nullopt = infinite
  std::vector<std::size_t> n_grid{250, 500, 1000, 1500, 2000};
};

struct DetectabilityPoint {
  std::size_t n = 0;
  double dt = 0.0;
  std::size_t k = 0;  ///< Fourier index of 1/T_p
  double pdet = 0.0;
};

struct DetectabilityCurve {
  double pfa = 0.0;
  std::optional<int> L;
  std::vector<DetectabilityPoint> points;
};

/// Analytic P_DET of T_M as a function of N for each (P_FA, L).
std::vector<DetectabilityCurve> detectability_study(const DetectabilityConfig& cfg);

/// Step dt' closest to dt such that 1/T_p = k / (n dt') for an integer k >= 1.
std::pair<double, std::size_t> on_grid_step(double period, std::size_t n, double dt);

/// Scale factor s in [lo, hi] with f(s) ~= target for a nondecreasing f, by
/// bisection on log s.
double calibrate_scale(const std::function<double(double)>& f, double target, double lo, double hi,
                       int iterations = 40);

/// Signal with every amplitude (sinusoid alpha or planet K) multiplied by s.
SignalSource scale_signal(const SignalSource& signal, double s);

/// Scale factor for the experiment's signal such that the most powerful of
/// its tests reaches `target_pdet` at `pfa` (empirical thresholds from the
/// matching null run). Every evaluation reuses the same random streams, so
/// the objective is a deterministic function of the scale.
double calibrate_signal_scale(const Experiment& alt, double pfa, double target_pdet, double lo, double hi,
                              int iterations = 25);

}  // namespace pstd
