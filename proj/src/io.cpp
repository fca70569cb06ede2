#include "graphvario/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace graphvario::io {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

double parse_double(const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    if (used != text.size()) throw std::invalid_argument("not a number: '" + text + "'");
    return value;
}

void write_positions(std::ostream& out, const SpatialSample& sample) {
    out << "# x y\n";
    for (const auto& p : sample.positions()) out << format_double(p.x) << ' ' << format_double(p.y) << '\n';
}

void write_signals(std::ostream& out, const Eigen::MatrixXd& signals) {
    out << "# one realization per row, " << signals.rows() << " vertices\n";
    for (Eigen::Index r = 0; r < signals.cols(); ++r) {
        for (Eigen::Index i = 0; i < signals.rows(); ++i) {
            if (i) out << ' ';
            out << format_double(signals(i, r));
        }
        out << '\n';
    }
}

Eigen::MatrixXd read_table(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        std::vector<double> row;
        std::string token;
        while (fields >> token) row.push_back(parse_double(token));
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("read_table: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return {};
    Eigen::MatrixXd table(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            table(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return table;
}

void write_band_dat(std::ostream& out, const std::string& x_name, const Curve& curve) {
    out << "# " << x_name << " mean mean_plus_std mean_minus_std\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        const double m = curve.mean[i].value_or(nan);
        const double s = curve.stddev[i].value_or(nan);
        out << format_double(curve.x[i]) << ' ' << format_double(m) << ' ' << format_double(m + s) << ' '
            << format_double(m - s) << '\n';
    }
}

Curve variogram_curve(const EnsembleStatistics& stats) {
    return Curve{stats.bins.centers(), stats.mean, stats.stddev};
}

void write_key_values(std::ostream& out, const KeyValues& values) {
    for (const auto& [key, value] : values) out << key << '=' << value << '\n';
}

KeyValues read_key_values(std::istream& in) {
    KeyValues values;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(number) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return values;
}

}  // namespace graphvario::io
