#include <sparsetd/series_io.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <sparsetd/errors.hpp>

namespace sparsetd {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == ".";
}

std::string where(const std::string& source, size_t line, const std::string& column) {
  return source + ":" + std::to_string(line) + " (column '" + column + "')";
}

}  // namespace

SeriesTable read_series_table(std::istream& in, const std::string& source, bool impute_linear) {
  SeriesTable table;
  std::string line;
  size_t lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);
    }
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw InputError(source + ": empty file, header row required");
  const std::vector<std::string> header = split(line);
  if (header.size() < 2) {
    throw InputError(source + ": header needs a period column and at least one value column");
  }
  table.columns.assign(header.begin() + 1, header.end());
  const size_t width = table.columns.size();

  std::vector<std::vector<double>> rows;
  std::vector<size_t> row_lines;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != width + 1) {
      std::ostringstream msg;
      msg << source << ":" << lineno << ": expected " << width + 1 << " fields, found "
          << cells.size();
      throw InputError(msg.str());
    }
    table.periods.push_back(cells[0]);
    std::vector<double> row(width);
    for (size_t c = 0; c < width; ++c) {
      const std::string& cell = cells[c + 1];
      if (is_missing(cell)) {
        row[c] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      try {
        size_t used = 0;
        row[c] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw InputError(where(source, lineno, table.columns[c]) + ": '" + cell +
                         "' is not a number");
      }
      if (!std::isfinite(row[c])) {
        throw InputError(where(source, lineno, table.columns[c]) + ": value is not finite");
      }
    }
    rows.push_back(std::move(row));
    row_lines.push_back(lineno);
  }
  if (rows.empty()) throw InputError(source + ": no data rows");

  const auto nrows = static_cast<Index>(rows.size());
  table.values.resize(nrows, static_cast<Index>(width));
  for (Index r = 0; r < nrows; ++r) {
    for (size_t c = 0; c < width; ++c) {
      table.values(r, static_cast<Index>(c)) = rows[static_cast<size_t>(r)][c];
    }
  }

  for (Index c = 0; c < table.values.cols(); ++c) {
    const std::string& name = table.columns[static_cast<size_t>(c)];
    for (Index r = 0; r < nrows; ++r) {
      if (!std::isnan(table.values(r, c))) continue;
      const size_t at = row_lines[static_cast<size_t>(r)];
      if (!impute_linear) {
        throw InputError(where(source, at, name) +
                         ": missing value (impute upstream or pass --impute-linear)");
      }
      Index end = r;
      while (end < nrows && std::isnan(table.values(end, c))) ++end;
      if (r == 0 || end == nrows) {
        throw InputError(where(source, at, name) +
                         ": missing value at the edge of the series cannot be interpolated");
      }
      const double lo = table.values(r - 1, c);
      const double hi = table.values(end, c);
      const double span = static_cast<double>(end - r + 1);
      for (Index k = r; k < end; ++k) {
        table.values(k, c) = lo + (hi - lo) * static_cast<double>(k - r + 1) / span;
      }
      r = end;
    }
  }
  return table;
}

SeriesTable read_series_table(const std::filesystem::path& path, bool impute_linear) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_series_table(in, path.string(), impute_linear);
}

LowFreqSeries to_low_freq(const SeriesTable& table) {
  if (table.columns.size() != 1) {
    throw InputError("low-frequency file must have exactly two columns: period, value");
  }
  LowFreqSeries y;
  y.label = table.columns.front();
  y.values = table.values.col(0);
  return y;
}

IndicatorPanel to_indicators(const SeriesTable& table) {
  IndicatorPanel x;
  x.names = table.columns;
  x.values = table.values;
  return x;
}

void write_series(std::ostream& out, const std::vector<std::string>& periods, const Vector& z) {
  if (static_cast<Index>(periods.size()) != z.size()) {
    throw InputError("write_series: period labels do not match series length");
  }
  out << "period,estimate\n";
  out.precision(17);
  for (Index j = 0; j < z.size(); ++j) out << periods[static_cast<size_t>(j)] << ',' << z(j) << '\n';
}

}  // namespace sparsetd
