#include "config.hpp"

#include <fstream>
#include <set>

#include "pstd/errors.hpp"
#include "pstd/io.hpp"

namespace pstd::cli {
namespace {

void check_keys(const json& obj, const std::string& section, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw InputError("config: '" + section + "' must be an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw InputError("config: unknown key '" + key + "' in section '" + section + "'");
}

template <class T>
T get(const json& obj, const std::string& key, const std::string& section) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError("config: '" + section + "." + key + "' is missing or has the wrong type");
  }
}

template <class T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& section) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  return get<T>(obj, key, section);
}

TestSpec parse_test(const json& t) {
  check_keys(t, "test", {"name", "n_c", "alpha0"});
  TestSpec s;
  s.name = parse_test_name(get<std::string>(t, "name", "test"));
  s.n_c = get_or<std::size_t>(t, "n_c", 1, "test");
  s.alpha0 = get_or<double>(t, "alpha0", 0.5, "test");
  return s;
}

SignalSource parse_signal(const json& s, double dt) {
  check_keys(s, "signal", {"kind", "components", "planets", "scale"});
  const auto kind = get_or<std::string>(s, "kind", "none", "signal");
  const double scale = get_or<double>(s, "scale", 1.0, "signal");
  SignalSource out;
  if (kind == "none") return out;
  if (kind == "sinusoids") {
    SinusoidModel m;
    for (const auto& c : get<json>(s, "components", "signal")) {
      check_keys(c, "signal.components", {"amplitude", "frequency", "period", "phase"});
      SinusoidComponent comp;
      comp.amplitude = get<double>(c, "amplitude", "signal.components");
      if (c.contains("frequency") == c.contains("period"))
        throw InputError("config: each sinusoid needs exactly one of 'frequency' (cycles/sample) or 'period'");
      comp.frequency = c.contains("frequency") ? get<double>(c, "frequency", "signal.components")
                                               : dt / get<double>(c, "period", "signal.components");
      comp.phase = get_or<double>(c, "phase", 0.0, "signal.components");
      m.components.push_back(comp);
    }
    m.validate();
    out = m;
  } else if (kind == "planets") {
    MultiPlanetModel m;
    for (const auto& p : get<json>(s, "planets", "signal")) {
      check_keys(p, "signal.planets", {"K", "period", "e", "omega", "t0", "gamma0", "mass"});
      KeplerianModel k;
      k.semi_amplitude = get<double>(p, "K", "signal.planets");
      k.period = get<double>(p, "period", "signal.planets");
      k.eccentricity = get_or<double>(p, "e", 0.0, "signal.planets");
      k.omega = get_or<double>(p, "omega", 0.0, "signal.planets");
      k.t0 = get_or<double>(p, "t0", 0.0, "signal.planets");
      k.systemic_velocity = get_or<double>(p, "gamma0", 0.0, "signal.planets");
      m.planets.push_back(k);
    }
    m.validate();
    out = m;
  } else {
    throw InputError("config: signal.kind must be none, sinusoids or planets");
  }
  return scale == 1.0 ? out : scale_signal(out, scale);
}

std::optional<int> parse_L(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::nullopt;
    throw InputError("config: L values must be integers or \"inf\"");
  }
  if (!v.is_number_integer() || v.get<int>() < 1) throw InputError("config: L values must be integers >= 1");
  return v.get<int>();
}

}  // namespace

NoiseModel Config::noise_model(std::size_t n_samples, double step) const {
  check_keys(noise, "noise", {"kind", "coeffs", "innovation_var", "variance", "file", "scale", "values"});
  const auto kind = get<std::string>(noise, "kind", "noise");
  if (kind == "white") return NoiseModel::white(get_or<double>(noise, "variance", 1.0, "noise"));
  if (kind == "ar")
    return NoiseModel::ar(get<std::vector<double>>(noise, "coeffs", "noise"),
                          get_or<double>(noise, "innovation_var", 1.0, "noise"));
  if (kind == "ar6_reference") {
    const auto m = reference_ar6();
    return NoiseModel::ar(m.coeffs, get_or<double>(noise, "innovation_var", m.innovation_var, "noise"));
  }
  if (kind == "psd_curve") {
    const auto curve = io::read_psd_curve(base_dir / get<std::string>(noise, "file", "noise"));
    return NoiseModel::tabulated(curve.tabulate(n_samples, step, get_or<double>(noise, "scale", 1.0, "noise")));
  }
  if (kind == "tabulated") {
    return NoiseModel::tabulated(TabulatedPsd{n_samples, get<std::vector<double>>(noise, "values", "noise")});
  }
  throw InputError("config: noise.kind must be white, ar, ar6_reference, psd_curve or tabulated");
}

PsdSource Config::psd_source() const {
  const auto kind = get<std::string>(noise, "kind", "noise");
  const double scale = get_or<double>(noise, "scale", 1.0, "noise");
  if (kind == "psd_curve") return {io::read_psd_curve(base_dir / get<std::string>(noise, "file", "noise")), scale};
  if (kind == "tabulated") throw InputError("config: a tabulated PSD is tied to one grid; use psd_curve or ar");
  const auto m = noise_model(n, dt);
  return {m.ar_model(), scale};
}

Experiment Config::experiment(int L_value) const {
  Experiment ex;
  ex.n = n;
  ex.dt = dt;
  ex.noise = noise_model(n, dt);
  ex.signal = signal;
  ex.standardization = {standardization, L_value, max_order};
  ex.tests = tests;
  ex.trials = trials;
  return ex;
}

Config parse_config(const json& doc, const std::filesystem::path& base_dir) {
  check_keys(doc, "<root>", {"scenario", "noise", "signal", "test", "tests", "experiment"});
  Config c;
  c.raw = doc;
  c.base_dir = base_dir;

  const json scenario = doc.value("scenario", json::object());
  check_keys(scenario, "scenario", {"n", "dt", "L"});
  c.n = get_or<std::size_t>(scenario, "n", c.n, "scenario");
  c.dt = get_or<double>(scenario, "dt", c.dt, "scenario");
  c.L = get_or<int>(scenario, "L", c.L, "scenario");
  if (c.n < 4 || c.n % 2 != 0) throw InputError("config: scenario.n must be even and >= 4");
  if (!(c.dt > 0.0)) throw InputError("config: scenario.dt must be positive");
  if (c.L < 1) throw InputError("config: scenario.L must be >= 1");

  c.noise = doc.value("noise", json{{"kind", "white"}});
  (void)c.noise_model(c.n, c.dt);  // validate eagerly
  c.signal = parse_signal(doc.value("signal", json::object()), c.dt);

  if (doc.contains("test") && doc.contains("tests")) throw InputError("config: give either 'test' or 'tests'");
  if (doc.contains("test")) c.tests = {parse_test(doc.at("test"))};
  if (doc.contains("tests")) {
    c.tests.clear();
    for (const auto& t : doc.at("tests")) c.tests.push_back(parse_test(t));
  }

  const json e = doc.value("experiment", json::object());
  check_keys(e, "experiment",
             {"trials", "standardization", "max_order", "pfa_grid", "thresholds", "L_list", "outer", "inner", "n_c",
              "n_grid", "pfa_list", "pfa", "threshold_mode", "calibration_trials", "calibrate"});
  c.trials = get_or<std::size_t>(e, "trials", c.trials, "experiment");
  if (e.contains("standardization"))
    c.standardization = parse_standardization(get<std::string>(e, "standardization", "experiment"));
  if (e.contains("max_order") && !e.at("max_order").is_null())
    c.max_order = get<std::size_t>(e, "max_order", "experiment");
  c.pfa_grid = get_or<std::vector<double>>(e, "pfa_grid", c.pfa_grid, "experiment");
  c.thresholds = get_or<std::vector<double>>(e, "thresholds", c.thresholds, "experiment");
  if (e.contains("L_list"))
    for (const auto& v : e.at("L_list")) c.L_list.push_back(parse_L(v));
  if (c.L_list.empty()) c.L_list.push_back(c.L);
  c.outer = get_or<std::size_t>(e, "outer", c.outer, "experiment");
  c.inner = get_or<std::size_t>(e, "inner", c.inner, "experiment");
  c.n_c = get_or<std::size_t>(e, "n_c", c.n_c, "experiment");
  c.n_grid = get_or<std::vector<std::size_t>>(e, "n_grid", c.n_grid, "experiment");
  c.pfa_list = get_or<std::vector<double>>(e, "pfa_list", c.pfa_list, "experiment");
  c.pfa = get_or<double>(e, "pfa", c.pfa, "experiment");
  c.threshold_mode = get_or<std::string>(e, "threshold_mode", c.threshold_mode, "experiment");
  c.calibration_trials = get_or<std::size_t>(e, "calibration_trials", c.calibration_trials, "experiment");
  if (e.contains("calibrate")) {
    c.calibrate = e.at("calibrate");
    check_keys(c.calibrate, "experiment.calibrate", {"pfa", "target_pdet", "lo", "hi", "trials", "L"});
  }
  if (c.threshold_mode != "auto" && c.threshold_mode != "analytic" && c.threshold_mode != "mc")
    throw InputError("config: experiment.threshold_mode must be auto, analytic or mc");
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config '" + path.string() + "': " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

}  // namespace pstd::cli
