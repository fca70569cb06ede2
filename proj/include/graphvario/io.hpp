#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "graphvario/spatial_field.hpp"
#include "graphvario/variogram.hpp"

namespace graphvario::io {

/// Ordered so that serialized files are byte-stable.
using KeyValues = std::map<std::string, std::string>;

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double value);
double parse_double(const std::string& text);

/// One "x y" row per point.
void write_positions(std::ostream& out, const SpatialSample& sample);
/// One row per realization (the transpose of the N x R storage).
void write_signals(std::ostream& out, const Eigen::MatrixXd& signals);
/// Whitespace-delimited numeric rows; '#' lines are skipped. All rows must
/// have the same number of columns.
Eigen::MatrixXd read_table(std::istream& in);

/// "# <header>" then one row per entry of x: x, mean, mean+std, mean-std.
/// Missing means produce a row of nan.
struct Curve {
    std::vector<double> x;
    std::vector<std::optional<double>> mean;
    std::vector<std::optional<double>> stddev;
};
void write_band_dat(std::ostream& out, const std::string& x_name, const Curve& curve);

Curve variogram_curve(const EnsembleStatistics& stats);

/// "key=value" per line; blank lines and '#' comments are ignored on read.
void write_key_values(std::ostream& out, const KeyValues& values);
KeyValues read_key_values(std::istream& in);

}  // namespace graphvario::io
