#pragma once

// JSON configuration schema shared by the experiment subcommands.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pstd/mcharness.hpp"

namespace pstd::cli {

using nlohmann::json;

struct Config {
  json raw;
  std::filesystem::path base_dir;  ///< relative file paths resolve here

  // scenario
  std::size_t n = 1024;
  double dt = 1.0;
  int L = 1;

  json noise;                 ///< kept unresolved: its grid depends on (N, dt)
  SignalSource signal;
  std::vector<TestSpec> tests{TestSpec{}};

  // experiment
  std::size_t trials = 10000;
  Standardization::Kind standardization = Standardization::Kind::Averaged;
  std::optional<std::size_t> max_order;
  std::vector<double> pfa_grid{0.01, 0.05, 0.1, 0.3};
  std::vector<double> thresholds;
  std::vector<std::optional<int>> L_list;
  std::size_t outer = 300;
  std::size_t inner = 100;
  std::size_t n_c = 5;
  std::vector<std::size_t> n_grid;
  std::vector<double> pfa_list;
  double pfa = 0.01;
  std::string threshold_mode = "auto";
  std::size_t calibration_trials = 100000;
  json calibrate;  ///< optional {pfa, target_pdet, lo, hi, trials, L}

  [[nodiscard]] NoiseModel noise_model(std::size_t n_samples, double step) const;
  [[nodiscard]] PsdSource psd_source() const;
  [[nodiscard]] Experiment experiment(int L_value) const;
};

/// Parses and validates a config document. Unknown keys throw InputError.
Config parse_config(const json& doc, const std::filesystem::path& base_dir);
Config load_config(const std::filesystem::path& path);

}  // namespace pstd::cli
