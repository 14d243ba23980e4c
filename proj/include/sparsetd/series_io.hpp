#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <sparsetd/aggregation.hpp>

namespace sparsetd {

/// A comma-separated table with a mandatory header whose first column holds
/// period labels.
struct SeriesTable {
  std::vector<std::string> periods;
  std::vector<std::string> columns;  // value column names, header order
  Matrix values;                      // rows = periods
};

/// Parses the table. Empty, "NA" or "NaN" cells are missing: with
/// impute_linear, interior gaps are filled by linear interpolation within
/// their column; otherwise (or for gaps at either end) InputError reports the
/// line and column.
SeriesTable read_series_table(std::istream& in, const std::string& source, bool impute_linear);
SeriesTable read_series_table(const std::filesystem::path& path, bool impute_linear);

/// Low-frequency file: period, value.
LowFreqSeries to_low_freq(const SeriesTable& table);
/// Indicator file: period, then one column per indicator.
IndicatorPanel to_indicators(const SeriesTable& table);

/// Writes "period,estimate" rows.
void write_series(std::ostream& out, const std::vector<std::string>& periods, const Vector& z);

}  // namespace sparsetd
