#pragma once

// Dataset ingestion and plot-series emission.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scalazone/fitting.hpp"
#include "scalazone/zones.hpp"

namespace scalazone {

/// Parses `n,x` CSV text (header names case-insensitive, either order,
/// `#` comment lines and blank lines skipped). Errors name the line.
Dataset parse_dataset_csv(std::istream& in, const std::string& source = "<input>",
                          std::optional<double> baseline = std::nullopt);

Dataset ingest_csv(const std::filesystem::path& path, std::optional<double> baseline = std::nullopt);

struct PlotRow {
    double n = 0.0;
    std::optional<double> c_data;
    double c_linear = 0.0;
    double c_amdahl = 0.0;
    double c_usl = 0.0;
    std::optional<ZoneLabel> zone;
    std::optional<double> c_gustafson;
};

using PlotSeries = std::vector<PlotRow>;

/// Boundary curves at integer N = 0..nmax; the Gustafson column is filled
/// only when requested.
PlotSeries curve_series(double alpha, double beta, int nmax, bool with_gustafson = false);

/// Data rows with their zone labels merged onto the integer grid
/// 1..max(n), ascending.
PlotSeries zone_series(const ZoneReport& report);

/// Writes `n,c_data,c_linear,c_amdahl,c_usl,zone` (plus `c_gustafson` when
/// any row carries it). Missing values are empty fields. Numbers use the
/// shortest representation that round-trips.
void write_plot_series(std::ostream& out, const PlotSeries& series);

/// Shortest round-trip decimal form of a double.
std::string format_exact(double value);

/// Flat `key = value` file; `#` starts a comment line.
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);

}  // namespace scalazone
