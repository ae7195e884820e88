#include "pstd/mcharness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "pstd/errors.hpp"
#include "pstd/rng.hpp"

namespace pstd {
namespace {

// Master-seed perturbation separating the inner observation streams of the
// dispersion study from its training streams.
constexpr std::uint64_t kInnerSeedMix = 0x9e3779b97f4a7c15ULL;

bool needs_pvalues(std::span<const TestSpec> tests) {
  return std::any_of(tests.begin(), tests.end(),
                     [](const TestSpec& t) { return t.name == TestName::HC || t.name == TestName::BJ; });
}

// Calls body(i) for i in [0, count) on up to `jobs` threads, each index
// exactly once, and rethrows the first failure.
template <class Body>
void parallel_for(std::size_t count, unsigned jobs, Body&& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(jobs, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

PeriodogramVec scaled(const PeriodogramVec& p, double factor) {
  std::vector<double> v(p.ordinates().begin(), p.ordinates().end());
  for (double& x : v) x *= factor;
  return PeriodogramVec(p.n_samples(), p.index_set(), std::move(v));
}

}  // namespace

std::string to_string(Standardization::Kind k) {
  switch (k) {
    case Standardization::Kind::Averaged: return "averaged";
    case Standardization::Kind::ArFit: return "ar_fit";
    case Standardization::Kind::None: return "none";
    case Standardization::Kind::TruePsd: return "true_psd";
  }
  return "?";
}

Standardization::Kind parse_standardization(std::string_view s) {
  std::string u(s);
  for (char& c : u) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (u == "averaged") return Standardization::Kind::Averaged;
  if (u == "ar_fit") return Standardization::Kind::ArFit;
  if (u == "none") return Standardization::Kind::None;
  if (u == "true_psd") return Standardization::Kind::TruePsd;
  throw InputError("unknown standardization '" + std::string(s) + "' (averaged, ar_fit, none, true_psd)");
}

void Experiment::validate() const {
  if (n < 4 || n % 2 != 0) throw InputError("experiment: N must be even and >= 4");
  if (!(dt > 0.0)) throw InputError("experiment: dt must be positive");
  if (trials < 1) throw InputError("experiment: trials must be >= 1");
  if (tests.empty()) throw InputError("experiment: at least one test required");
  const auto kind = standardization.kind;
  if ((kind == Standardization::Kind::Averaged || kind == Standardization::Kind::ArFit) && standardization.L < 1)
    throw InputError("experiment: L must be >= 1");
  if (static_cast<std::uint64_t>(standardization.L) + stream_role::kTrainingBase >= kStreamsPerTrial)
    throw InputError("experiment: L exceeds the per-trial stream budget");
  const std::size_t eta = n / 2 - 1;
  for (const auto& t : tests) {
    if (t.name == TestName::TC && (t.n_c < 1 || t.n_c > eta))
      throw InputError("experiment: N_C must lie in [1, N/2 - 1]");
    if ((t.name == TestName::HC || t.name == TestName::BJ) &&
        !(t.alpha0 > 0.0 && t.alpha0 <= 1.0 && t.alpha0 * static_cast<double>(eta) >= 1.0 - 1e-9))
      throw InputError("experiment: alpha0 must lie in (0, 1] with alpha0 * (N/2 - 1) >= 1");
  }
  if (const auto* s = std::get_if<SinusoidModel>(&signal)) s->validate();
  if (const auto* m = std::get_if<MultiPlanetModel>(&signal)) m->validate();
}

TrialRunner::TrialRunner(const Experiment& ex) : ex_(ex) {
  ex_.validate();
  if (const auto* s = std::get_if<SinusoidModel>(&ex_.signal)) {
    const auto ts = sinusoid_signal(*s, ex_.n, ex_.dt);
    signal_.assign(ts.samples().begin(), ts.samples().end());
  } else if (const auto* m = std::get_if<MultiPlanetModel>(&ex_.signal)) {
    signal_ = multi_planet_rv(*m, sample_times(ex_.n, ex_.dt));
  }
  if (ex_.standardization.kind == Standardization::Kind::TruePsd) true_psd_ = ex_.noise.psd_on_grid(ex_.n);
  if (ex_.standardization.kind == Standardization::Kind::None) variance_ = ex_.noise.variance();
}

std::pair<PeriodogramVec, PValueVec> TrialRunner::ordinates_and_pvalues(std::size_t index) const {
  const auto obs_seed = trial_stream(ex_.seed, index, stream_role::kObservation);
  auto noise = gen_noise(ex_.noise, ex_.n, obs_seed, ex_.dt);
  const PeriodogramVec p = [&] {
    if (signal_.empty()) return periodogram(noise);
    std::vector<double> x(noise.samples().begin(), noise.samples().end());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += signal_[j];
    return periodogram(TimeSeries(std::move(x), ex_.dt));
  }();

  const bool want_p = needs_pvalues(ex_.tests);
  const auto& st = ex_.standardization;
  switch (st.kind) {
    case Standardization::Kind::Averaged:
    case Standardization::Kind::ArFit: {
      const auto train_seed = trial_stream(ex_.seed, index, stream_role::kTrainingBase);
      const auto ts = gen_training_set(ex_.noise, ex_.n, static_cast<std::size_t>(st.L), train_seed, ex_.dt);
      if (st.kind == Standardization::Kind::Averaged) {
        auto z = standardize(p, averaged_periodogram(ts));
        auto v = want_p ? pvalues_standardized(z, st.L) : PValueVec{};
        return {std::move(z), std::move(v)};
      }
      auto z = ar_standardize(p, select_order_fpe(ts, st.max_order));
      auto v = want_p ? pvalues_unit_exponential(z) : PValueVec{};
      return {std::move(z), std::move(v)};
    }
    case Standardization::Kind::None: {
      auto z = scaled(p, 2.0 / variance_);
      auto v = want_p ? pvalues_whitenoise(p, variance_) : PValueVec{};
      return {std::move(z), std::move(v)};
    }
    case Standardization::Kind::TruePsd: {
      auto z = standardize(p, *true_psd_);
      auto v = want_p ? pvalues_unit_exponential(z) : PValueVec{};
      return {std::move(z), std::move(v)};
    }
  }
  throw InputError("unknown standardization");
}

PeriodogramVec TrialRunner::ordinates(std::size_t index) const { return ordinates_and_pvalues(index).first; }

std::vector<double> TrialRunner::operator()(std::size_t index) const {
  const auto [z, v] = ordinates_and_pvalues(index);
  std::vector<double> out;
  out.reserve(ex_.tests.size());
  for (const auto& t : ex_.tests) out.push_back(compute_statistic(t, z.ordinates(), &v).value);
  return out;
}

std::vector<double> run_trial(const Experiment& ex, std::size_t trial_index) { return TrialRunner(ex)(trial_index); }

ExperimentResult run_experiment(const Experiment& ex) {
  const TrialRunner runner(ex);
  ExperimentResult res;
  res.values.assign(ex.tests.size(), std::vector<double>(ex.trials));
  parallel_for(ex.trials, ex.jobs, [&](std::size_t i) {
    const auto v = runner(i);
    for (std::size_t t = 0; t < v.size(); ++t) res.values[t][i] = v[t];
  });
  return res;
}

RateEstimate make_rate(std::size_t hits, std::size_t trials) {
  if (trials == 0) throw InputError("rate estimate needs at least one trial");
  const double r = static_cast<double>(hits) / static_cast<double>(trials);
  return {r, std::sqrt(r * (1.0 - r) / static_cast<double>(trials)), trials};
}

RateEstimate rate_above(std::span<const double> values, double threshold) {
  const auto hits = static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [threshold](double v) { return v > threshold; }));
  return make_rate(hits, values.size());
}

RateEstimate estimate_rate(const Experiment& ex, double threshold, std::size_t test_index) {
  if (test_index >= ex.tests.size()) throw InputError("estimate_rate: test index out of range");
  Experiment one = ex;
  one.tests = {ex.tests[test_index]};
  return rate_above(run_experiment(one).values.front(), threshold);
}

double min_resolvable_pfa(std::size_t trials) { return 10.0 / static_cast<double>(trials); }

std::vector<CurveResult> roc_empirical(const ExperimentResult& null_values, const ExperimentResult& alt_values,
                                       std::span<const TestSpec> tests, std::span<const double> pfa_grid) {
  if (null_values.values.size() != tests.size() || alt_values.values.size() != tests.size())
    throw InputError("roc_empirical: null and alternative runs must cover the same tests");
  for (std::size_t i = 0; i < pfa_grid.size(); ++i) {
    if (!(pfa_grid[i] > 0.0 && pfa_grid[i] < 1.0)) throw InputError("roc_empirical: P_FA grid must lie in (0, 1)");
    if (i > 0 && !(pfa_grid[i] > pfa_grid[i - 1])) throw InputError("roc_empirical: P_FA grid must increase");
  }
  std::vector<CurveResult> out;
  for (std::size_t t = 0; t < tests.size(); ++t) {
    std::vector<double> sorted = null_values.values[t];
    std::sort(sorted.begin(), sorted.end());
    const double pmin = min_resolvable_pfa(sorted.size());
    CurveResult c{tests[t].label(), "pfa", "pdet", false, {}};
    for (double pfa : pfa_grid) {
      if (pfa < pmin - 1e-15) {
        const auto need = static_cast<std::size_t>(std::ceil(10.0 / pfa));
        throw InputError("roc_empirical: P_FA " + std::to_string(pfa) + " is below the resolvable limit " +
                         std::to_string(pmin) + "; use at least " + std::to_string(need) + " null trials");
      }
      const auto r = rate_above(alt_values.values[t], empirical_threshold(sorted, pfa));
      c.points.push_back({pfa, r.rate, r.stderr_, r.trials});
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CurveResult> roc_empirical(const Experiment& ex_null, const Experiment& ex_alt,
                                       std::span<const double> pfa_grid) {
  if (ex_null.tests.size() != ex_alt.tests.size() || ex_null.n != ex_alt.n)
    throw InputError("roc_empirical: null and alternative experiments must match");
  if (pfa_grid.empty()) throw InputError("roc_empirical: empty P_FA grid");
  if (pfa_grid.front() < min_resolvable_pfa(ex_null.trials) - 1e-15)
    throw InputError("roc_empirical: P_FA " + std::to_string(pfa_grid.front()) + " needs at least " +
                     std::to_string(static_cast<std::size_t>(std::ceil(10.0 / pfa_grid.front()))) +
                     " null trials");
  return roc_empirical(run_experiment(ex_null), run_experiment(ex_alt), ex_null.tests, pfa_grid);
}

DispersionStudy ar_dispersion_study(const DispersionConfig& cfg) {
  check_ar_stationary(cfg.noise.coeffs);
  if (cfg.n < 4 || cfg.n % 2 != 0) throw InputError("dispersion: N must be even and >= 4");
  if (cfg.outer < 1 || cfg.inner < 1) throw InputError("dispersion: outer and inner must be >= 1");
  if (cfg.thresholds.empty()) throw InputError("dispersion: no thresholds");
  if (cfg.n_c < 1 || cfg.n_c > cfg.n / 2 - 1) throw InputError("dispersion: N_C must lie in [1, N/2 - 1]");

  DispersionStudy study;
  study.thresholds = cfg.thresholds;
  for (double g : cfg.thresholds) study.approx.push_back(pfa_ar_approx(g, cfg.n, cfg.n_c));
  const auto noise = NoiseModel::ar(cfg.noise.coeffs, cfg.noise.innovation_var);
  const std::size_t nt = cfg.thresholds.size();

  for (std::size_t li = 0; li < cfg.L_list.size(); ++li) {
    const int L = cfg.L_list[li];
    if (L < 1) throw InputError("dispersion: L must be >= 1");
    DispersionCurve curve;
    curve.L = L;
    curve.thresholds = cfg.thresholds;
    curve.per_fit.assign(cfg.outer, std::vector<double>(nt, 0.0));
    curve.orders.assign(cfg.outer, 0);
    parallel_for(cfg.outer, cfg.jobs, [&](std::size_t f) {
      const std::uint64_t fit_id = li * cfg.outer + f;
      PeriodogramVec s_hat = ar_psd(cfg.noise, cfg.n);
      if (!cfg.force_true_model) {
        const auto ts = gen_training_set(noise, cfg.n, static_cast<std::size_t>(L),
                                         trial_stream(cfg.seed, fit_id, stream_role::kTrainingBase));
        const auto fit = select_order_fpe(ts, cfg.max_order);
        curve.orders[f] = fit.order;
        s_hat = ar_psd(fit.model(), cfg.n);
      } else {
        curve.orders[f] = cfg.noise.coeffs.size();
      }
      std::vector<std::size_t> hits(nt, 0);
      for (std::size_t i = 0; i < cfg.inner; ++i) {
        const auto seed = trial_stream(cfg.seed ^ kInnerSeedMix, fit_id * cfg.inner + i, stream_role::kObservation);
        const auto z = standardize(periodogram(gen_ar_noise(cfg.noise, cfg.n, seed)), s_hat);
        const double stat = t_c(z.ordinates(), cfg.n_c).value;
        for (std::size_t j = 0; j < nt; ++j)
          if (stat > cfg.thresholds[j]) ++hits[j];
      }
      for (std::size_t j = 0; j < nt; ++j)
        curve.per_fit[f][j] = static_cast<double>(hits[j]) / static_cast<double>(cfg.inner);
    });

    const double m = static_cast<double>(cfg.outer);
    for (std::size_t j = 0; j < nt; ++j) {
      double sum = 0.0, lo = 1.0, hi = 0.0;
      for (const auto& row : curve.per_fit) {
        sum += row[j];
        lo = std::min(lo, row[j]);
        hi = std::max(hi, row[j]);
      }
      const double mean = sum / m;
      double ss = 0.0;
      for (const auto& row : curve.per_fit) ss += (row[j] - mean) * (row[j] - mean);
      const double sd = cfg.outer > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
      curve.mean.push_back(mean);
      curve.sd.push_back(sd);
      curve.lower.push_back(std::max(0.0, mean - 3.0 * sd));
      curve.upper.push_back(std::min(1.0, mean + 3.0 * sd));
      curve.min.push_back(lo);
      curve.max.push_back(hi);
    }
    study.curves.push_back(std::move(curve));
  }
  return study;
}

TabulatedPsd PsdSource::on_grid(std::size_t n, double dt) const {
  if (!(scale > 0.0)) throw InputError("PSD scale must be positive");
  if (const auto* ar = std::get_if<ArModel>(&model)) {
    const auto p = ar_psd(*ar, n, IndexSet::Full);
    TabulatedPsd t{n, std::vector<double>(p.ordinates().begin(), p.ordinates().end())};
    for (double& v : t.values) v *= scale;
    return t;
  }
  return std::get<PsdCurve>(model).tabulate(n, dt, scale);
}

std::pair<double, std::size_t> on_grid_step(double period, std::size_t n, double dt) {
  if (!(period > 0.0) || !(dt > 0.0)) throw InputError("on_grid_step: period and dt must be positive");
  const double exact = static_cast<double>(n) * dt / period;
  const auto k = static_cast<std::size_t>(std::max(1.0, std::round(exact)));
  if (k >= n / 2) throw DomainError("on_grid_step: the period is not resolved below Nyquist for N=" + std::to_string(n));
  return {static_cast<double>(k) * period / static_cast<double>(n), k};
}

std::vector<DetectabilityCurve> detectability_study(const DetectabilityConfig& cfg) {
  cfg.planet.validate();
  for (double p : cfg.pfa_list)
    if (!(p > 0.0 && p < 1.0)) throw InputError("detectability: P_FA values must lie in (0, 1)");
  for (const auto& L : cfg.L_list)
    if (L && *L < 1) throw InputError("detectability: L must be >= 1");

  std::vector<DetectabilityCurve> curves;
  for (double pfa : cfg.pfa_list)
    for (const auto& L : cfg.L_list) curves.push_back({pfa, L, {}});

  for (std::size_t n : cfg.n_grid) {
    if (n < 4 || n % 2 != 0) throw InputError("detectability: N values must be even and >= 4");
    const auto [dt, k] = on_grid_step(cfg.planet.period, n, cfg.dt);
    const auto psd = cfg.noise.on_grid(n, dt);
    const auto rv = keplerian_rv(cfg.planet, sample_times(n, dt));
    const auto lambdas = noncentrality_from_signal(rv, psd.values).lambdas;
    for (auto& c : curves) {
      const double pdet = c.L ? pdet_tm(gamma_tm(c.pfa, n, *c.L), lambdas, *c.L)
                              : pdet_tm_limit(gamma_tm_limit(c.pfa, n), lambdas);
      c.points.push_back({n, dt, k, pdet});
    }
  }
  return curves;
}

double calibrate_scale(const std::function<double(double)>& f, double target, double lo, double hi,
                       int iterations) {
  if (!(lo > 0.0 && hi > lo)) throw InputError("calibrate_scale: need 0 < lo < hi");
  if (f(hi) < target) return hi;
  if (f(lo) >= target) return lo;
  double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (a + b);
    if (f(std::exp(mid)) < target) a = mid;
    else b = mid;
  }
  return std::exp(0.5 * (a + b));
}

SignalSource scale_signal(const SignalSource& signal, double s) {
  if (!(s > 0.0)) throw InputError("scale_signal: scale must be positive");
  if (const auto* m = std::get_if<SinusoidModel>(&signal)) {
    SinusoidModel out = *m;
    for (auto& c : out.components) c.amplitude *= s;
    return out;
  }
  if (const auto* m = std::get_if<MultiPlanetModel>(&signal)) {
    MultiPlanetModel out = *m;
    for (auto& p : out.planets) p.semi_amplitude *= s;
    return out;
  }
  return signal;
}

double calibrate_signal_scale(const Experiment& alt, double pfa, double target_pdet, double lo, double hi,
                              int iterations) {
  if (std::holds_alternative<std::monostate>(alt.signal)) throw InputError("calibration needs a signal");
  Experiment null = alt;
  null.signal = std::monostate{};
  const auto null_values = run_experiment(null);
  std::vector<double> thresholds;
  for (auto v : null_values.values) {
    std::sort(v.begin(), v.end());
    thresholds.push_back(empirical_threshold(v, pfa));
  }
  const auto best_pdet = [&](double s) {
    Experiment ex = alt;
    ex.signal = scale_signal(alt.signal, s);
    const auto res = run_experiment(ex);
    double best = 0.0;
    for (std::size_t t = 0; t < res.values.size(); ++t)
      best = std::max(best, rate_above(res.values[t], thresholds[t]).rate);
    return best;
  };
  return calibrate_scale(best_pdet, target_pdet, lo, hi, iterations);
}

}  // namespace pstd
