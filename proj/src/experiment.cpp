#include "graphvario/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "graphvario/rng.hpp"

namespace graphvario {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, sep)) parts.push_back(part);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    unsigned long long value = 0;
    try {
        if (!text.empty() && text.front() == '-') throw std::invalid_argument("negative");
        value = std::stoull(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": expected a nonnegative integer, got '" + text + "'");
    }
    if (used != text.size()) throw std::invalid_argument(key + ": expected a nonnegative integer, got '" + text + "'");
    return static_cast<std::size_t>(value);
}

bool parse_flag(const std::string& key, const std::string& text) {
    if (text == "1" || text == "true" || text == "yes") return true;
    if (text == "0" || text == "false" || text == "no") return false;
    throw std::invalid_argument(key + ": expected a boolean, got '" + text + "'");
}

std::filesystem::path prepare_output_dir(const ExperimentConfig& config) {
    std::filesystem::path dir(config.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw std::runtime_error("cannot create output directory '" + config.output_dir + "'");
    return dir;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

void write_common(const std::filesystem::path& dir, const ExperimentConfig& config, const io::KeyValues& summary) {
    auto cfg = open_output(dir / "config.txt");
    io::write_key_values(cfg, to_key_values(config));
    auto sum = open_output(dir / "summary.txt");
    io::write_key_values(sum, summary);
}

std::string pad_index(std::size_t i) {
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%03zu", i);
    return buffer;
}

struct GraphRealization {
    SpatialSample sample;
    SensorGraph graph;
    FieldEnsemble ensemble;
};

GraphRealization realize(const ExperimentConfig& config, std::size_t graph_index) {
    SpatialSample sample = sample_positions(config.n, config.scheme, sample_seed(config.seed, graph_index));
    SensorGraph graph = build_graph(sample, config.connectivity_spec(), config.kernel_sigma);
    FieldEnsemble ensemble = generate_ensemble(sample, config.model, config.realizations,
                                               field_seed(config.seed, graph_index), config.jitter, config.threads);
    return {std::move(sample), std::move(graph), std::move(ensemble)};
}

}  // namespace

// ---- Config ---------------------------------------------------------------

void ExperimentConfig::validate() const {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    if (realizations < 1) throw std::invalid_argument("realizations must be at least 1");
    if (graph_realizations < 1) throw std::invalid_argument("graphs must be at least 1");
    if (bins < 1) throw std::invalid_argument("bins must be at least 1");
    if (!(kernel_sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
    if (connectivity == Connectivity::knn && (k < 1 || k >= n))
        throw std::invalid_argument("k must satisfy 1 <= k < n");
    if (!(bin_span >= 0.0) || !std::isfinite(bin_span)) throw std::invalid_argument("dmax must be >= 0");
    if (!(jitter >= 0.0)) throw std::invalid_argument("jitter must be >= 0");
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");
    model.validate();
}

std::string format_model(const VariogramModel& m) {
    switch (m.kind) {
        case ModelKind::exponential:
            return "exp:" + io::format_double(m.sill) + ":" + io::format_double(m.range) +
                   (m.nugget != 0.0 ? ":" + io::format_double(m.nugget) : "");
        case ModelKind::nugget:
            return "nugget:" + io::format_double(m.sill);
        case ModelKind::linear:
            return "linear:" + io::format_double(m.sill) + ":" + io::format_double(m.range) +
                   (m.nugget != 0.0 ? ":" + io::format_double(m.nugget) : "");
    }
    return {};
}

VariogramModel parse_model(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.empty()) throw std::invalid_argument("model: empty specification");
    const std::string& kind = parts[0];
    std::vector<double> args;
    for (std::size_t i = 1; i < parts.size(); ++i) args.push_back(io::parse_double(parts[i]));
    if ((kind == "exp" || kind == "exponential") && (args.size() == 2 || args.size() == 3))
        return VariogramModel::exponential(args[0], args[1], args.size() == 3 ? args[2] : 0.0);
    if (kind == "nugget" && args.size() == 1) return VariogramModel::pure_nugget(args[0]);
    if (kind == "linear" && (args.size() == 2 || args.size() == 3))
        return VariogramModel::linear(args[0], args[1], args.size() == 3 ? args[2] : 0.0);
    throw std::invalid_argument("model: cannot parse '" + text +
                                "' (expected exp:<sill>:<range>, nugget:<sill> or linear:<slope>:<range>)");
}

std::string format_window(const VertexWindow& w) {
    switch (w.kind) {
        case WindowKind::ones:
            return "ones";
        case WindowKind::ball:
            return "ball:" + io::format_double(w.scale);
        case WindowKind::gaussian:
            return "gauss:" + io::format_double(w.scale);
    }
    return {};
}

VertexWindow parse_window(const std::string& text) {
    if (text == "ones") return VertexWindow::ones();
    const auto parts = split(text, ':');
    if (parts.size() == 2 && parts[0] == "ball") return VertexWindow::ball(io::parse_double(parts[1]));
    if (parts.size() == 2 && (parts[0] == "gauss" || parts[0] == "gaussian"))
        return VertexWindow::gaussian(io::parse_double(parts[1]));
    throw std::invalid_argument("window: cannot parse '" + text + "' (expected ones, ball:<r> or gauss:<rho>)");
}

std::string format_scheme(SamplingScheme s) { return s == SamplingScheme::uniform ? "uniform" : "nonuniform"; }

SamplingScheme parse_scheme(const std::string& text) {
    if (text == "uniform") return SamplingScheme::uniform;
    if (text == "nonuniform") return SamplingScheme::nonuniform;
    throw std::invalid_argument("scheme: expected uniform or nonuniform, got '" + text + "'");
}

std::string format_connectivity(Connectivity c) { return c == Connectivity::full ? "full" : "knn"; }

Connectivity parse_connectivity(const std::string& text) {
    if (text == "full") return Connectivity::full;
    if (text == "knn") return Connectivity::knn;
    throw std::invalid_argument("connectivity: expected full or knn, got '" + text + "'");
}

io::KeyValues to_key_values(const ExperimentConfig& c) {
    return {
        {"n", std::to_string(c.n)},
        {"scheme", format_scheme(c.scheme)},
        {"connectivity", format_connectivity(c.connectivity)},
        {"k", std::to_string(c.k)},
        {"sigma", io::format_double(c.kernel_sigma)},
        {"model", format_model(c.model)},
        {"jitter", io::format_double(c.jitter)},
        {"realizations", std::to_string(c.realizations)},
        {"graphs", std::to_string(c.graph_realizations)},
        {"bins", std::to_string(c.bins)},
        {"dmax", io::format_double(c.bin_span)},
        {"window", format_window(c.window)},
        {"seed", std::to_string(c.seed)},
        {"out", c.output_dir},
        {"db", c.emit_db ? "1" : "0"},
        {"threads", std::to_string(c.threads)},
        {"min_pairs", std::to_string(c.min_pairs)},
    };
}

ExperimentConfig config_from_key_values(const io::KeyValues& values, ExperimentConfig c) {
    for (const auto& [key, value] : values) {
        if (key == "n") c.n = parse_count(key, value);
        else if (key == "scheme") c.scheme = parse_scheme(value);
        else if (key == "connectivity") c.connectivity = parse_connectivity(value);
        else if (key == "k") c.k = parse_count(key, value);
        else if (key == "sigma") c.kernel_sigma = io::parse_double(value);
        else if (key == "model") c.model = parse_model(value);
        else if (key == "jitter") c.jitter = io::parse_double(value);
        else if (key == "realizations") c.realizations = parse_count(key, value);
        else if (key == "graphs") c.graph_realizations = parse_count(key, value);
        else if (key == "bins") c.bins = parse_count(key, value);
        else if (key == "dmax") c.bin_span = io::parse_double(value);
        else if (key == "window") c.window = parse_window(value);
        else if (key == "seed") c.seed = parse_count(key, value);
        else if (key == "out") c.output_dir = value;
        else if (key == "db") c.emit_db = parse_flag(key, value);
        else if (key == "threads") c.threads = static_cast<unsigned>(parse_count(key, value));
        else if (key == "min_pairs") c.min_pairs = parse_count(key, value);
        else throw std::invalid_argument("unknown config key '" + key + "'");
    }
    return c;
}

std::uint64_t sample_seed(std::uint64_t seed, std::size_t graph_index) {
    return derive_seed(seed, Stream::positions, graph_index);
}

std::uint64_t field_seed(std::uint64_t seed, std::size_t graph_index) {
    return derive_seed(seed, Stream::field, graph_index);
}

// ---- Variogram experiment -------------------------------------------------

VariogramExperimentResult run_variogram_experiment(const ExperimentConfig& config) {
    config.validate();
    VariogramExperimentResult result;
    std::optional<BinPartition> shared_bins;
    if (config.bin_span > 0.0) {
        shared_bins = BinPartition::equal_width(config.bin_span, config.bins);
    } else if (config.graph_realizations > 1) {
        shared_bins = BinPartition::equal_width(std::numbers::sqrt2, config.bins);
    }

    for (std::size_t g = 0; g < config.graph_realizations; ++g) {
        const auto run = realize(config, g);
        const BinPartition bins = shared_bins ? *shared_bins : make_bins(run.graph, config.bins);
        const auto estimates =
            global_graph_variograms(run.ensemble.signals, run.graph, bins, config.window, config.threads);
        result.per_graph.push_back(ensemble_statistics(estimates));
    }
    result.statistics = result.per_graph.size() == 1 ? result.per_graph.front() : aggregate_statistics(result.per_graph);

    const auto& stats = result.statistics;
    const auto centers = stats.bins.centers();
    result.truth.resize(centers.size());
    for (std::size_t j = 0; j < centers.size(); ++j) result.truth[j] = config.model.semivariogram(centers[j]);

    auto& s = result.summary;
    double max_error = 0.0;
    std::size_t compared = 0;
    for (std::size_t j = 0; j < stats.size(); ++j) {
        const std::string idx = pad_index(j);
        s["bin." + idx + ".center"] = io::format_double(centers[j]);
        s["bin." + idx + ".pairs"] = std::to_string(stats.pair_counts[j]);
        s["bin." + idx + ".mean"] = io::format_double(stats.mean[j].value_or(std::numeric_limits<double>::quiet_NaN()));
        s["bin." + idx + ".truth"] = io::format_double(result.truth[j]);
        if (stats.mean[j] && stats.pair_counts[j] >= config.min_pairs) {
            max_error = std::max(max_error, std::abs(*stats.mean[j] - result.truth[j]));
            ++compared;
        }
    }
    s["experiment"] = "variogram";
    s["bins"] = std::to_string(stats.size());
    s["bin_span"] = io::format_double(stats.bins.max_distance());
    s["graphs"] = std::to_string(config.graph_realizations);
    s["realizations"] = std::to_string(config.realizations);
    s["min_pairs"] = std::to_string(config.min_pairs);
    s["bins_compared"] = std::to_string(compared);
    s["max_abs_error"] = compared ? io::format_double(max_error) : "nan";
    return result;
}

void write_variogram_outputs(const ExperimentConfig& config, const VariogramExperimentResult& result) {
    const auto dir = prepare_output_dir(config);
    {
        auto out = open_output(dir / "variogram.dat");
        io::write_band_dat(out, "h", io::variogram_curve(result.statistics));
    }
    {
        auto out = open_output(dir / "truth.dat");
        out << "# h gamma\n";
        const auto centers = result.statistics.bins.centers();
        for (std::size_t j = 0; j < centers.size(); ++j)
            out << io::format_double(centers[j]) << ' ' << io::format_double(result.truth[j]) << '\n';
    }
    if (result.per_graph.size() > 1) {
        for (std::size_t g = 0; g < result.per_graph.size(); ++g) {
            auto out = open_output(dir / ("variogram_graph" + pad_index(g) + ".dat"));
            io::write_band_dat(out, "h", io::variogram_curve(result.per_graph[g]));
        }
    }
    write_common(dir, config, result.summary);
}

// ---- PSD experiment -------------------------------------------------------

PsdExperimentResult run_psd_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto run = realize(config, 0);
    const auto basis = decompose(laplacian(run.graph));
    PsdExperimentResult result{empirical_psd(run.ensemble.signals, basis), {}};

    const auto& psd = result.psd;
    double high = 0.0, low = 0.0;
    std::size_t high_n = 0, low_n = 0;
    for (Eigen::Index i = 0; i < psd.frequencies.size(); ++i) {
        if (psd.frequencies(i) > 0.5) {
            high += psd.mean(i);
            ++high_n;
        }
        if (psd.frequencies(i) < 0.1) {
            low += psd.mean(i);
            ++low_n;
        }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double high_mean = high_n ? high / static_cast<double>(high_n) : nan;
    const double low_mean = low_n ? low / static_cast<double>(low_n) : nan;
    const double total = psd.mean.sum();
    auto& s = result.summary;
    s["experiment"] = "psd";
    s["vertices"] = std::to_string(psd.frequencies.size());
    s["realizations"] = std::to_string(config.realizations);
    s["lambda_max"] = io::format_double(basis.eigenvalues.size() ? basis.eigenvalues.maxCoeff() : 0.0);
    s["high_band_mean"] = io::format_double(high_mean);
    s["low_band_mean"] = io::format_double(low_mean);
    s["energy_ratio_high_over_low"] = io::format_double(high_mean / low_mean);
    s["dc_fraction"] = io::format_double(total > 0.0 ? psd.mean(0) / total : nan);
    s["total_energy"] = io::format_double(total);
    return result;
}

void write_psd_outputs(const ExperimentConfig& config, const PsdExperimentResult& result) {
    const auto dir = prepare_output_dir(config);
    const auto& psd = result.psd;
    auto out = open_output(dir / "psd.dat");
    out << "# lambda mean mean_plus_std mean_minus_std" << (config.emit_db ? " (dB)" : "") << '\n';
    Eigen::VectorXd mean = psd.mean;
    Eigen::VectorXd upper = psd.mean + psd.stddev;
    Eigen::VectorXd lower = psd.mean - psd.stddev;
    if (config.emit_db) {
        mean = to_decibels(mean);
        upper = to_decibels(upper);
        lower = to_decibels(lower);
    }
    for (Eigen::Index i = 0; i < psd.frequencies.size(); ++i)
        out << io::format_double(psd.frequencies(i)) << ' ' << io::format_double(mean(i)) << ' '
            << io::format_double(upper(i)) << ' ' << io::format_double(lower(i)) << '\n';
    write_common(dir, config, result.summary);
}

// ---- Stationarity diagnostic --------------------------------------------

DiagnosticExperimentResult run_stationarity_diagnostic(const ExperimentConfig& config) {
    config.validate();
    const auto run = realize(config, 0);
    const BinPartition bins =
        config.bin_span > 0.0 ? BinPartition::equal_width(config.bin_span, config.bins) : make_bins(run.graph, config.bins);
    DiagnosticExperimentResult result{
        stationarity_diagnostic(run.ensemble.signals, run.graph, bins, config.window, config.threads), {}};

    std::size_t defined = 0, within = 0;
    double max_abs = 0.0;
    for (Eigen::Index k = 0; k < result.scores.scores.rows(); ++k) {
        for (Eigen::Index b = 0; b < result.scores.scores.cols(); ++b) {
            const double z = result.scores.scores(k, b);
            if (std::isnan(z)) continue;
            ++defined;
            if (std::abs(z) <= 2.0) ++within;
            max_abs = std::max(max_abs, std::abs(z));
        }
    }
    auto& s = result.summary;
    s["experiment"] = "diagnose";
    s["window"] = format_window(config.window);
    s["defined_scores"] = std::to_string(defined);
    s["fraction_within_2"] =
        io::format_double(defined ? static_cast<double>(within) / static_cast<double>(defined) : std::nan(""));
    s["max_abs_score"] = io::format_double(max_abs);
    return result;
}

void write_diagnostic_outputs(const ExperimentConfig& config, const DiagnosticExperimentResult& result) {
    const auto dir = prepare_output_dir(config);
    auto out = open_output(dir / "scores.dat");
    out << "# k h score\n";
    const auto& sc = result.scores;
    for (Eigen::Index k = 0; k < sc.scores.rows(); ++k)
        for (Eigen::Index b = 0; b < sc.scores.cols(); ++b)
            out << k << ' ' << io::format_double(sc.bins.center(static_cast<std::size_t>(b))) << ' '
                << io::format_double(sc.scores(k, b)) << '\n';
    write_common(dir, config, result.summary);
}

// ---- Raw simulation dump ---------------------------------------------------

void write_simulation_outputs(const ExperimentConfig& config) {
    config.validate();
    const auto run = realize(config, 0);
    const auto dir = prepare_output_dir(config);
    {
        auto out = open_output(dir / "positions.dat");
        io::write_positions(out, run.sample);
    }
    {
        auto out = open_output(dir / "signals.dat");
        io::write_signals(out, run.ensemble.signals);
    }
    {
        auto out = open_output(dir / "edges.dat");
        write_edge_list(out, run.graph);
    }
    io::KeyValues summary{{"experiment", "simulate"},
                          {"vertices", std::to_string(run.sample.size())},
                          {"edges", std::to_string(run.graph.edges().size())},
                          {"realizations", std::to_string(run.ensemble.size())},
                          {"d_max", io::format_double(run.graph.max_distance())}};
    write_common(dir, config, summary);
}

}  // namespace graphvario
