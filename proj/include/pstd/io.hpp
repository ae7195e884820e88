#pragma once

// CSV input/output for series, periodograms, PSD tables and training sets.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pstd/noisegen.hpp"
#include "pstd/spectral.hpp"

namespace pstd::io {

/// Header names plus numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  [[nodiscard]] std::vector<double> column(std::size_t j) const;
};

/// Parses a CSV with one header line. Blank lines and lines starting with
/// '#' are skipped. Throws InputError on ragged or non-numeric rows.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::istream& in, const std::string& source = "<stream>");

/// Shortest round-trip decimal form (17 significant digits).
std::string format_double(double x);

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

/// Two-column (t, value) series; the step must be constant within 1e-9
/// relative, otherwise InputError (irregular sampling is unsupported).
TimeSeries read_series(const std::filesystem::path& path);

/// Training set from a directory of series CSVs (sorted by file name) or
/// from one wide CSV whose columns are the series (a leading column named
/// t or time is taken as the time axis).
TrainingSet read_training(const std::filesystem::path& path, double dt_hint = 1.0);

/// Two-column (frequency, psd) curve.
PsdCurve read_psd_curve(const std::filesystem::path& path);

}  // namespace pstd::io
