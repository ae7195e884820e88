// pstd: periodogram standardization and CFAR detection from the command line.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "pstd/analytic.hpp"
#include "pstd/arfit.hpp"
#include "pstd/detectors.hpp"
#include "pstd/errors.hpp"
#include "pstd/io.hpp"
#include "pstd/mcharness.hpp"
#include "pstd/spectral.hpp"

namespace {

using namespace pstd;
using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

enum ExitCode { kOk = 0, kInput = 2, kUnsupported = 3, kNumeric = 4 };

// Output sink that is either a file or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) : path_(path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InputError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  [[nodiscard]] bool is_file() const { return path_ != "-"; }
  [[nodiscard]] const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
};

// CSV rows mixing text tags and numbers.
class TaggedCsv {
 public:
  explicit TaggedCsv(std::vector<std::string> header) : header_(std::move(header)) {}

  TaggedCsv& cell(const std::string& s) {
    row_.push_back(s);
    return *this;
  }
  TaggedCsv& cell(double v) { return cell(io::format_double(v)); }
  TaggedCsv& cell(std::size_t v) { return cell(std::to_string(v)); }
  void end_row() {
    if (row_.size() != header_.size()) throw std::logic_error("TaggedCsv: row width mismatch");
    rows_.push_back(std::move(row_));
    row_.clear();
  }
  void write(std::ostream& out) const {
    for (std::size_t j = 0; j < header_.size(); ++j) out << (j ? "," : "") << header_[j];
    out << '\n';
    for (const auto& r : rows_) {
      for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << r[j];
      out << '\n';
    }
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> row_;
};

std::string L_text(const std::optional<int>& L) { return L ? std::to_string(*L) : "inf"; }

unsigned default_jobs() {
  if (const char* env = std::getenv("PSTD_JOBS")) {
    try {
      const int j = std::stoi(env);
      if (j >= 1) return static_cast<unsigned>(j);
    } catch (const std::exception&) {
    }
    throw InputError("PSTD_JOBS must be a positive integer");
  }
  return 1;
}

struct RunOptions {
  std::string config;
  std::string output = "-";
  std::string manifest;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  unsigned jobs = 0;
};

void add_run_options(CLI::App* cmd, RunOptions& o, bool needs_seed) {
  cmd->add_option("-c,--config", o.config, "JSON configuration")->required()->check(CLI::ExistingFile);
  cmd->add_option("-o,--output", o.output, "output CSV ('-' for stdout)");
  cmd->add_option("--manifest", o.manifest, "manifest JSON path (default: <output>.manifest.json)");
  auto* seed = cmd->add_option("--seed", o.seed, "master random seed");
  if (needs_seed) seed->required();
  cmd->add_option("--trials", o.trials, "override experiment.trials");
  cmd->add_option("--jobs", o.jobs, "worker threads (default: $PSTD_JOBS or 1)");
}

void write_manifest(const RunOptions& o, const std::string& command, const cli::Config& cfg, const Sink& sink,
                    const json& extra = json::object()) {
  std::string path = o.manifest;
  if (path.empty() && sink.is_file()) path = sink.path() + ".manifest.json";
  if (path.empty()) return;
  json m{{"command", command},
         {"version", kVersion},
         {"config", cfg.raw},
         {"seed", o.seed ? json(*o.seed) : json(nullptr)},
         {"trials", cfg.trials},
         {"output", sink.path()}};
  for (const auto& [k, v] : extra.items()) m[k] = v;
  std::ofstream out(path);
  if (!out) throw InputError("cannot write manifest '" + path + "'");
  out << m.dump(2) << '\n';
}

cli::Config load(const RunOptions& o) {
  auto cfg = cli::load_config(o.config);
  if (o.trials) cfg.trials = *o.trials;
  return cfg;
}

Experiment make_experiment(const cli::Config& cfg, const RunOptions& o, int L) {
  auto ex = cfg.experiment(L);
  ex.seed = o.seed.value_or(0);
  ex.jobs = o.jobs ? o.jobs : default_jobs();
  return ex;
}

// Closed-form threshold for a target P_FA, if the combination has one.
std::optional<double> analytic_gamma(const TestSpec& t, Standardization::Kind st, std::size_t n, int L, double pfa) {
  if (t.name != TestName::TM && t.name != TestName::TC) return std::nullopt;
  const std::size_t nc = t.name == TestName::TM ? 1 : t.n_c;
  switch (st) {
    case Standardization::Kind::Averaged:
      return t.name == TestName::TM ? gamma_tm(pfa, n, L) : gamma_tc(pfa, n, L, nc);
    case Standardization::Kind::None:
      return gamma_white_assumed(pfa, n, t.name == TestName::TM ? OrderTest::TM : OrderTest::TC, nc);
    case Standardization::Kind::ArFit:
    case Standardization::Kind::TruePsd:
      return gamma_ar_approx(pfa, n, nc);
  }
  return std::nullopt;
}

// Closed-form rate at threshold gamma: P_FA without signal, P_DET with a
// sinusoidal signal when the noncentral law is available.
std::optional<double> analytic_rate(const TestSpec& t, const Experiment& ex, double gamma) {
  if (t.name != TestName::TM && t.name != TestName::TC) return std::nullopt;
  const std::size_t n = ex.n;
  const std::size_t nc = t.name == TestName::TM ? 1 : t.n_c;
  const auto st = ex.standardization.kind;
  const int L = ex.standardization.L;
  if (std::holds_alternative<std::monostate>(ex.signal)) {
    switch (st) {
      case Standardization::Kind::Averaged: return t.name == TestName::TM ? pfa_tm(gamma, n, L) : pfa_tc(gamma, n, L, nc);
      case Standardization::Kind::None:
        return pfa_white_assumed(gamma, n, t.name == TestName::TM ? OrderTest::TM : OrderTest::TC, nc);
      case Standardization::Kind::ArFit:
      case Standardization::Kind::TruePsd: return pfa_ar_approx(gamma, n, nc);
    }
  }
  const auto* sig = std::get_if<SinusoidModel>(&ex.signal);
  if (sig == nullptr) return std::nullopt;
  const auto psd = ex.noise.psd_on_grid(n, IndexSet::Full);
  Scenario sc{n, std::max(L, 1), std::vector<double>(psd.ordinates().begin(), psd.ordinates().end()), *sig};
  if (st == Standardization::Kind::Averaged)
    return t.name == TestName::TM ? pdet_tm(gamma, sc) : pdet_tc(gamma, sc, nc);
  if (st == Standardization::Kind::TruePsd && t.name == TestName::TM)
    return pdet_tm_limit(gamma, noncentrality(sc).lambdas);
  return std::nullopt;
}

int cmd_periodogram(const std::string& input, const std::string& output, bool omega_only, bool dt_units, bool check) {
  const auto x = io::read_series(input);
  const auto set = omega_only ? IndexSet::Omega : IndexSet::Full;
  const auto p = periodogram(x, set);
  std::vector<double> f(p.size()), pw(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    f[i] = dt_units ? p.frequency(i) / x.dt() : p.frequency(i);
    pw[i] = dt_units ? p[i] / x.dt() : p[i];
  }
  if (check) {
    // Two-sided sum over k = 0..N-1 from the half spectrum.
    const auto full = periodogram(x, IndexSet::Full);
    const std::size_t half = x.size() / 2;
    double s = full[0] + full[half];
    for (std::size_t k = 1; k < half; ++k) s += 2.0 * full[k];
    double e = 0.0;
    for (double v : x.samples()) e += v * v;
    const double rel = e > 0.0 ? std::fabs(s - e) / e : std::fabs(s);
    std::cerr << "parseval relative error: " << rel << '\n';
    if (rel > 1e-9) {
      std::cerr << "error: Parseval check failed\n";
      return kNumeric;
    }
  }
  Sink sink(output);
  io::write_csv(sink.stream(), {dt_units ? "frequency" : "frequency_cps", "power"}, {f, pw});
  return kOk;
}

int cmd_standardize(const std::string& data, const std::string& training, const std::string& output, bool full) {
  const auto x = io::read_series(data);
  const auto ts = io::read_training(training, x.dt());
  if (ts.n_samples() != x.size()) throw InputError("training series length does not match the data");
  const auto set = full ? IndexSet::Full : IndexSet::Omega;
  const auto z = standardize(periodogram(x, set), averaged_periodogram(ts, set));
  const auto v = pvalues_standardized(z, static_cast<int>(ts.size()));
  std::vector<double> f(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) f[i] = z.frequency(i);
  Sink sink(output);
  io::write_csv(sink.stream(), {"frequency_cps", "standardized", "pvalue"},
                {f, std::vector<double>(z.ordinates().begin(), z.ordinates().end()), v.values});
  return kOk;
}

int cmd_arfit(const std::string& training, const std::string& output, std::optional<std::size_t> order,
              std::optional<std::size_t> max_order) {
  const auto ts = io::read_training(training);
  const ArFit fit = order ? fit_ar_yw(ts, *order) : select_order_fpe(ts, max_order);
  json trace = json::array();
  for (const auto& [o, v] : fit.criterion_trace) trace.push_back({{"order", o}, {"fpe", v}});
  const json j{{"order", fit.order},
               {"coeffs", fit.coeffs},
               {"innovation_var", fit.innovation_var},
               {"criterion", order ? "fixed" : "FPE"},
               {"trace", trace},
               {"L", ts.size()},
               {"N", ts.n_samples()}};
  Sink sink(output);
  sink.stream() << j.dump(2) << '\n';
  return kOk;
}

struct DetectOptions {
  std::string data;
  std::string training;
  std::string config;
  std::string output = "-";
  std::string test;
  std::optional<double> pfa;
  std::optional<std::size_t> n_c;
  std::optional<double> alpha0;
  std::string threshold_mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
};

int cmd_detect(const DetectOptions& o) {
  std::optional<cli::Config> cfg;
  if (!o.config.empty()) cfg = cli::load_config(o.config);
  TestSpec spec = cfg ? cfg->tests.front() : TestSpec{};
  if (!o.test.empty()) spec.name = parse_test_name(o.test);
  if (o.n_c) spec.n_c = *o.n_c;
  if (o.alpha0) spec.alpha0 = *o.alpha0;
  const double pfa = o.pfa.value_or(cfg ? cfg->pfa : 0.01);
  std::string mode = !o.threshold_mode.empty() ? o.threshold_mode : (cfg ? cfg->threshold_mode : "auto");
  if (mode != "auto" && mode != "analytic" && mode != "mc") throw InputError("threshold mode must be auto, analytic or mc");
  if (!(pfa > 0.0 && pfa < 1.0)) throw InputError("target P_FA must lie in (0, 1)");

  const auto x = io::read_series(o.data);
  const auto ts = io::read_training(o.training, x.dt());
  if (ts.n_samples() != x.size() || std::fabs(ts.dt() - x.dt()) > 1e-9 * x.dt())
    throw InputError("training set grid (N=" + std::to_string(ts.n_samples()) +
                     ") does not match the data grid (N=" + std::to_string(x.size()) + ")");
  const std::size_t n = x.size();
  const int L = static_cast<int>(ts.size());
  const auto z = standardize(periodogram(x), averaged_periodogram(ts));
  const auto v = pvalues_standardized(z, L);
  const auto stat = compute_statistic(spec, z.ordinates(), &v);

  double threshold = 0.0;
  std::string source;
  json warnings = json::array();
  const bool closed_form = spec.name == TestName::TM || spec.name == TestName::TC;
  if (closed_form && mode != "mc") {
    threshold = spec.name == TestName::TM ? gamma_tm(pfa, n, L) : gamma_tc(pfa, n, L, spec.n_c);
    source = "analytic";
  } else {
    if (mode == "analytic")
      throw UnsupportedError("no closed-form threshold exists for " + std::string(to_string(spec.name)) +
                             "; use --threshold-mode mc");
    if (!o.seed) throw InputError("--seed is required for Monte-Carlo thresholds");
    const std::size_t cal_trials = o.trials.value_or(cfg ? cfg->calibration_trials : 100000);
    if (spec.name == TestName::HC || spec.name == TestName::BJ) {
      threshold = cached_uniform_calibration(spec, v.values.size(), cal_trials, *o.seed)->threshold(pfa);
      source = "mc_uniform_pvalues";
    } else {
      std::string msg = "threshold of " + spec.label() + " calibrated by Monte Carlo on simulated null data";
      if (spec.name == TestName::TF) msg += " (no closed form exists)";
      std::cerr << "warning: " << msg << '\n';
      warnings.push_back(msg);
      Experiment ex;
      ex.n = n;
      ex.noise = NoiseModel::white(1.0);
      ex.standardization = Standardization::averaged(L);
      ex.tests = {spec};
      ex.trials = cal_trials;
      ex.seed = *o.seed;
      ex.jobs = default_jobs();
      if (pfa < min_resolvable_pfa(ex.trials))
        throw InputError("P_FA " + std::to_string(pfa) + " needs at least " +
                         std::to_string(static_cast<std::size_t>(std::ceil(10.0 / pfa))) + " calibration trials");
      auto null = run_experiment(ex).values.front();
      std::sort(null.begin(), null.end());
      threshold = empirical_threshold(null, pfa);
      source = "mc_null_simulation";
    }
  }
  const auto decision = decide(stat, threshold);
  json report{{"test", spec.label()},
              {"statistic", stat.value},
              {"threshold", threshold},
              {"threshold_source", source},
              {"target_pfa", pfa},
              {"decision", decision == Decision::H1 ? "H1" : "H0"},
              {"L", L},
              {"N", n},
              {"dt", x.dt()},
              {"n_c", spec.name == TestName::TC ? json(spec.n_c) : json(nullptr)},
              {"alpha0", spec.name == TestName::HC || spec.name == TestName::BJ ? json(spec.alpha0) : json(nullptr)},
              {"seed", o.seed ? json(*o.seed) : json(nullptr)},
              {"warnings", warnings}};
  Sink sink(o.output);
  sink.stream() << report.dump(2) << '\n';
  return kOk;
}

int cmd_pfa_curve(const RunOptions& o) {
  const auto cfg = load(o);
  TaggedCsv csv({"L", "test", "threshold", "target_pfa", "kind", "rate", "stderr", "trials"});
  for (const auto& Lopt : cfg.L_list) {
    if (!Lopt) throw InputError("pfa-curve: L = inf is only available in detectability");
    const auto ex = make_experiment(cfg, o, *Lopt);
    const auto res = run_experiment(ex);
    for (std::size_t t = 0; t < ex.tests.size(); ++t) {
      const auto& spec = ex.tests[t];
      std::vector<std::pair<double, std::optional<double>>> grid;  // (threshold, target)
      if (!cfg.thresholds.empty()) {
        for (double g : cfg.thresholds) grid.emplace_back(g, std::nullopt);
      } else {
        for (double p : cfg.pfa_grid) {
          if (auto g = analytic_gamma(spec, ex.standardization.kind, ex.n, *Lopt, p)) grid.emplace_back(*g, p);
        }
        if (grid.empty())
          std::cerr << "warning: " << spec.label() << " has no closed-form threshold; give experiment.thresholds\n";
      }
      for (const auto& [g, target] : grid) {
        const auto r = rate_above(res.values[t], g);
        const auto put_head = [&] {
          csv.cell(std::to_string(*Lopt)).cell(spec.label()).cell(g);
          if (target) csv.cell(*target);
          else csv.cell(std::string());
        };
        put_head();
        csv.cell(std::string("empirical")).cell(r.rate).cell(r.stderr_).cell(r.trials);
        csv.end_row();
        if (auto a = analytic_rate(spec, ex, g)) {
          put_head();
          csv.cell(std::string("analytic")).cell(*a).cell(0.0).cell(std::size_t{0});
          csv.end_row();
        }
      }
    }
  }
  Sink sink(o.output);
  csv.write(sink.stream());
  write_manifest(o, "pfa-curve", cfg, sink, {{"jobs", o.jobs ? o.jobs : default_jobs()}});
  return kOk;
}

int cmd_roc(const RunOptions& o) {
  const auto cfg = load(o);
  if (std::holds_alternative<std::monostate>(cfg.signal)) throw InputError("roc: the config needs a signal");
  for (double p : cfg.pfa_grid)
    if (p < min_resolvable_pfa(cfg.trials))
      throw InputError("roc: P_FA " + std::to_string(p) + " needs at least " +
                       std::to_string(static_cast<std::size_t>(std::ceil(10.0 / p))) + " trials");
  double scale = 1.0;
  json extra = json::object();
  if (!cfg.calibrate.is_null()) {
    const auto& c = cfg.calibrate;
    auto ex = make_experiment(cfg, o, c.value("L", cfg.L));
    ex.trials = c.value("trials", std::min<std::size_t>(cfg.trials, 2000));
    scale = calibrate_signal_scale(ex, c.value("pfa", 0.1), c.value("target_pdet", 0.8), c.value("lo", 1e-3),
                                   c.value("hi", 1e3));
    extra["signal_scale"] = scale;
    std::cerr << "calibrated signal scale: " << scale << '\n';
  }
  TaggedCsv csv({"L", "test", "pfa", "kind", "pdet", "stderr", "trials"});
  for (const auto& Lopt : cfg.L_list) {
    if (!Lopt) throw InputError("roc: L = inf is only available in detectability");
    auto alt = make_experiment(cfg, o, *Lopt);
    alt.signal = scale_signal(alt.signal, scale);
    auto null = alt;
    null.signal = std::monostate{};
    const auto curves = roc_empirical(null, alt, cfg.pfa_grid);
    for (const auto& c : curves)
      for (const auto& p : c.points) {
        csv.cell(std::to_string(*Lopt)).cell(c.label).cell(p.x).cell(std::string("empirical"));
        csv.cell(p.y).cell(p.stderr_).cell(p.trials);
        csv.end_row();
      }
    const auto* sig = std::get_if<SinusoidModel>(&alt.signal);
    if (sig && alt.standardization.kind == Standardization::Kind::Averaged) {
      const auto psd = alt.noise.psd_on_grid(alt.n, IndexSet::Full);
      Scenario sc{alt.n, *Lopt, std::vector<double>(psd.ordinates().begin(), psd.ordinates().end()), *sig};
      const auto roc = roc_tm(cfg.pfa_grid, sc);
      for (std::size_t i = 0; i < roc.size(); ++i) {
        csv.cell(std::to_string(*Lopt)).cell(std::string("TM")).cell(cfg.pfa_grid[i]).cell(std::string("analytic"));
        csv.cell(roc[i]).cell(0.0).cell(std::size_t{0});
        csv.end_row();
      }
    }
  }
  Sink sink(o.output);
  csv.write(sink.stream());
  extra["jobs"] = o.jobs ? o.jobs : default_jobs();
  write_manifest(o, "roc", cfg, sink, extra);
  return kOk;
}

int cmd_dispersion(const RunOptions& o) {
  const auto cfg = load(o);
  const auto noise = cfg.noise_model(cfg.n, cfg.dt);
  if (noise.kind() != NoiseModel::Kind::AR) throw InputError("dispersion: the noise must be an AR model");
  DispersionConfig d;
  d.noise = noise.ar_model();
  d.n = cfg.n;
  d.L_list.clear();
  for (const auto& L : cfg.L_list) {
    if (!L) throw InputError("dispersion: L must be finite");
    d.L_list.push_back(*L);
  }
  d.thresholds = cfg.thresholds;
  if (d.thresholds.empty())
    for (double p : cfg.pfa_grid) d.thresholds.push_back(gamma_ar_approx(p, cfg.n, cfg.n_c));
  std::sort(d.thresholds.begin(), d.thresholds.end());
  d.outer = cfg.outer;
  d.inner = o.trials.value_or(cfg.inner);
  d.n_c = cfg.n_c;
  d.max_order = cfg.max_order;
  d.seed = *o.seed;
  d.jobs = o.jobs ? o.jobs : default_jobs();
  const auto study = ar_dispersion_study(d);
  TaggedCsv csv({"L", "threshold", "kind", "mean", "sd", "lower_3sd", "upper_3sd", "min", "max", "fits"});
  for (std::size_t j = 0; j < study.thresholds.size(); ++j) {
    csv.cell(std::string("")).cell(study.thresholds[j]).cell(std::string("analytic")).cell(study.approx[j]);
    csv.cell(0.0).cell(study.approx[j]).cell(study.approx[j]).cell(study.approx[j]).cell(study.approx[j]);
    csv.cell(std::size_t{0});
    csv.end_row();
  }
  for (const auto& c : study.curves)
    for (std::size_t j = 0; j < c.thresholds.size(); ++j) {
      csv.cell(std::to_string(c.L)).cell(c.thresholds[j]).cell(std::string("empirical")).cell(c.mean[j]);
      csv.cell(c.sd[j]).cell(c.lower[j]).cell(c.upper[j]).cell(c.min[j]).cell(c.max[j]).cell(c.per_fit.size());
      csv.end_row();
    }
  Sink sink(o.output);
  csv.write(sink.stream());
  write_manifest(o, "dispersion", cfg, sink, {{"inner", d.inner}, {"outer", d.outer}, {"jobs", d.jobs}});
  return kOk;
}

int cmd_detectability(const RunOptions& o) {
  const auto cfg = load(o);
  const auto* planets = std::get_if<MultiPlanetModel>(&cfg.signal);
  if (planets == nullptr || planets->planets.size() != 1)
    throw InputError("detectability: the signal must be a single planet");
  DetectabilityConfig d;
  d.planet = planets->planets.front();
  d.noise = cfg.psd_source();
  d.dt = cfg.dt;
  if (!cfg.pfa_list.empty()) d.pfa_list = cfg.pfa_list;
  if (cfg.raw.contains("experiment") && cfg.raw["experiment"].contains("L_list")) d.L_list = cfg.L_list;
  if (!cfg.n_grid.empty()) d.n_grid = cfg.n_grid;
  const auto curves = detectability_study(d);
  TaggedCsv csv({"pfa", "L", "N", "dt", "k", "kind", "pdet"});
  for (const auto& c : curves)
    for (const auto& p : c.points) {
      csv.cell(c.pfa).cell(L_text(c.L)).cell(p.n).cell(p.dt).cell(p.k).cell(std::string("analytic")).cell(p.pdet);
      csv.end_row();
    }
  Sink sink(o.output);
  csv.write(sink.stream());
  write_manifest(o, "detectability", cfg, sink);
  return kOk;
}

int cmd_simulate(const RunOptions& o, const std::string& what, std::optional<std::size_t> count) {
  const auto cfg = load(o);
  const auto noise = cfg.noise_model(cfg.n, cfg.dt);
  const auto seed = *o.seed;
  const auto times = sample_times(cfg.n, cfg.dt);
  std::vector<std::string> header{"t"};
  std::vector<std::vector<double>> cols{times};
  const auto signal = [&]() -> std::vector<double> {
    if (const auto* s = std::get_if<SinusoidModel>(&cfg.signal)) {
      const auto ts = sinusoid_signal(*s, cfg.n, cfg.dt);
      return {ts.samples().begin(), ts.samples().end()};
    }
    if (const auto* m = std::get_if<MultiPlanetModel>(&cfg.signal)) return multi_planet_rv(*m, times);
    return std::vector<double>(cfg.n, 0.0);
  };
  if (what == "signal") {
    header.push_back("value");
    cols.push_back(signal());
  } else if (what == "noise" || what == "observation") {
    const auto e = gen_noise(noise, cfg.n, trial_stream(seed, 0, stream_role::kObservation), cfg.dt);
    std::vector<double> x(e.samples().begin(), e.samples().end());
    if (what == "observation") {
      const auto s = signal();
      for (std::size_t j = 0; j < x.size(); ++j) x[j] += s[j];
    }
    header.push_back("value");
    cols.push_back(std::move(x));
  } else if (what == "training") {
    const std::size_t L = count.value_or(static_cast<std::size_t>(cfg.L));
    const auto ts = gen_training_set(noise, cfg.n, L, trial_stream(seed, 0, stream_role::kTrainingBase), cfg.dt);
    for (std::size_t l = 0; l < ts.size(); ++l) {
      header.push_back("x" + std::to_string(l + 1));
      cols.emplace_back(ts[l].samples().begin(), ts[l].samples().end());
    }
  } else {
    throw InputError("simulate: --what must be noise, signal, observation or training");
  }
  Sink sink(o.output);
  io::write_csv(sink.stream(), header, cols);
  write_manifest(o, "simulate", cfg, sink, {{"what", what}});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pstd: CFAR detection of sinusoids in colored noise with standardized periodograms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string pg_in, pg_out = "-";
  bool pg_omega = false, pg_dt = false, pg_check = false;
  auto* pg = app.add_subcommand("periodogram", "periodogram of a two-column (t, value) CSV");
  pg->add_option("-i,--input", pg_in, "input series CSV")->required()->check(CLI::ExistingFile);
  pg->add_option("-o,--output", pg_out, "output CSV ('-' for stdout)");
  pg->add_flag("--omega-only", pg_omega, "drop k = 0 and k = N/2");
  pg->add_flag("--dt-units", pg_dt, "frequencies per time unit and power divided by dt");
  pg->add_flag("--check", pg_check, "verify Parseval's identity (exit 4 on failure)");

  std::string st_data, st_train, st_out = "-";
  bool st_full = false;
  auto* st = app.add_subcommand("standardize", "periodogram divided by the training-set average, with p-values");
  st->add_option("--data", st_data, "data series CSV")->required()->check(CLI::ExistingFile);
  st->add_option("--training", st_train, "directory of series CSVs or one wide CSV")->required()->check(CLI::ExistingPath);
  st->add_option("-o,--output", st_out, "output CSV");
  st->add_flag("--full", st_full, "include k = 0 and k = N/2");

  std::string ar_train, ar_out = "-";
  std::optional<std::size_t> ar_order, ar_max;
  auto* ar = app.add_subcommand("arfit", "Yule-Walker AR fit of a training set (FPE order selection)");
  ar->add_option("--training", ar_train, "directory of series CSVs or one wide CSV")->required()->check(CLI::ExistingPath);
  ar->add_option("-o,--output", ar_out, "output JSON");
  auto* ar_order_opt = ar->add_option("--order", ar_order, "fixed order (skips FPE)");
  ar->add_option("--max-order", ar_max, "largest order examined by FPE")->excludes(ar_order_opt);

  DetectOptions det;
  auto* dc = app.add_subcommand("detect", "run one test on data standardized by a training set");
  dc->add_option("--data", det.data, "data series CSV")->required()->check(CLI::ExistingFile);
  dc->add_option("--training", det.training, "directory of series CSVs or one wide CSV")->required()->check(CLI::ExistingPath);
  dc->add_option("-c,--config", det.config, "JSON configuration (test and experiment sections)")->check(CLI::ExistingFile);
  dc->add_option("-o,--output", det.output, "report JSON");
  dc->add_option("--test", det.test, "TM, TF, TC, HC or BJ");
  dc->add_option("--pfa", det.pfa, "target false-alarm probability");
  dc->add_option("--nc", det.n_c, "N_C of the TC test");
  dc->add_option("--alpha0", det.alpha0, "search fraction of HC and BJ");
  dc->add_option("--threshold-mode", det.threshold_mode, "auto, analytic or mc");
  dc->add_option("--seed", det.seed, "seed of Monte-Carlo calibrations");
  dc->add_option("--trials", det.trials, "Monte-Carlo calibration trials");

  RunOptions pfa_o, roc_o, disp_o, detb_o, sim_o;
  auto* pf = app.add_subcommand("pfa-curve", "empirical and closed-form rates against the threshold");
  add_run_options(pf, pfa_o, true);
  auto* rc = app.add_subcommand("roc", "empirical ROC curves of every configured test");
  add_run_options(rc, roc_o, true);
  auto* ds = app.add_subcommand("dispersion", "spread of the true P_FA across AR fits");
  add_run_options(ds, disp_o, true);
  auto* db = app.add_subcommand("detectability", "closed-form P_DET of T_M against N, P_FA and L");
  add_run_options(db, detb_o, false);
  std::string sim_what = "observation";
  std::optional<std::size_t> sim_count;
  auto* sm = app.add_subcommand("simulate", "generate noise, signal, observation or training series");
  add_run_options(sm, sim_o, true);
  sm->add_option("--what", sim_what, "noise, signal, observation or training");
  sm->add_option("--count", sim_count, "number of training series");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc_parse = app.exit(e);
    return rc_parse == 0 ? kOk : kInput;
  }

  try {
    if (*pg) return cmd_periodogram(pg_in, pg_out, pg_omega, pg_dt, pg_check);
    if (*st) return cmd_standardize(st_data, st_train, st_out, st_full);
    if (*ar) return cmd_arfit(ar_train, ar_out, ar_order, ar_max);
    if (*dc) return cmd_detect(det);
    if (*pf) return cmd_pfa_curve(pfa_o);
    if (*rc) return cmd_roc(roc_o);
    if (*ds) return cmd_dispersion(disp_o);
    if (*db) return cmd_detectability(detb_o);
    if (*sm) return cmd_simulate(sim_o, sim_what, sim_count);
  } catch (const UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return kUnsupported;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const DomainError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  }
  return kOk;
}
