#include "pstd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pstd/errors.hpp"

namespace pstd::io {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty())
    throw InputError(where + ": '" + s + "' is not a number");
  return v;
}

double uniform_step(const std::vector<double>& t, const std::string& source) {
  if (t.size() < 2) throw InputError(source + ": need at least two samples");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(dt > 0.0)) throw InputError(source + ": time stamps must increase");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::fabs((t[i] - t[i - 1]) - dt) > 1e-9 * std::fabs(dt))
      throw InputError(source + ": irregular sampling at row " + std::to_string(i + 1) +
                       " (only evenly sampled series are supported)");
  }
  return dt;
}

bool is_time_name(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s == "t" || s == "time";
}

}  // namespace

std::vector<double> CsvTable::column(std::size_t j) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(j));
  return out;
}

CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto cells = split(s);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size())
      throw InputError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                       " columns, found " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c, source + ":" + std::to_string(lineno)));
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw InputError(source + ": missing header line");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return parse_csv(in, path.string());
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw InputError("write_csv: header and column counts differ");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw InputError("write_csv: ragged columns");
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << format_double(columns[j][i]);
    out << '\n';
  }
}

TimeSeries read_series(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  if (t.header.size() != 2) throw InputError(path.string() + ": expected two columns (t, value)");
  const double dt = uniform_step(t.column(0), path.string());
  return TimeSeries(t.column(1), dt);
}

TrainingSet read_training(const std::filesystem::path& path, double dt_hint) {
  std::vector<TimeSeries> series;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(path))
      if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw InputError(path.string() + ": no .csv training files");
    for (const auto& f : files) series.push_back(read_series(f));
  } else {
    const auto t = read_csv(path);
    std::size_t first = 0;
    double dt = dt_hint;
    if (!t.header.empty() && is_time_name(t.header.front())) {
      dt = uniform_step(t.column(0), path.string());
      first = 1;
    }
    if (t.header.size() <= first) throw InputError(path.string() + ": no series columns");
    for (std::size_t j = first; j < t.header.size(); ++j) series.emplace_back(t.column(j), dt);
  }
  try {
    return TrainingSet(std::move(series));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

PsdCurve read_psd_curve(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  if (t.header.size() != 2) throw InputError(path.string() + ": expected two columns (frequency, psd)");
  return PsdCurve(t.column(0), t.column(1));
}

}  // namespace pstd::io
