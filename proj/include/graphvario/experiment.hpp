#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "graphvario/graph.hpp"
#include "graphvario/io.hpp"
#include "graphvario/spatial_field.hpp"
#include "graphvario/spectral.hpp"
#include "graphvario/variogram.hpp"

namespace graphvario {

/// Defaults: 500 sensors, 1000
/// realizations, sigma = 0.05, K = 100, exponential(1, 0.2), 20 bins.
struct ExperimentConfig {
    std::size_t n = 500;
    SamplingScheme scheme = SamplingScheme::uniform;
    Connectivity connectivity = Connectivity::full;
    std::size_t k = 100;
    double kernel_sigma = 0.05;
    VariogramModel model = VariogramModel::exponential(1.0, 0.2);
    double jitter = kDefaultCovarianceJitter;
    std::size_t realizations = 1000;
    std::size_t graph_realizations = 1;
    std::size_t bins = kDefaultBinCount;
    /// Upper end of the binned distance range; 0 picks the graph's largest
    /// pairwise distance for a single graph and the unit-square diagonal when
    /// several graphs must share one partition.
    double bin_span = 0.0;
    VertexWindow window = VertexWindow::ones();
    std::uint64_t seed = 1;
    std::string output_dir = ".";
    bool emit_db = false;
    unsigned threads = 1;
    /// Bins with fewer pairs are left out of the summary error.
    std::size_t min_pairs = 100;

    ConnectivitySpec connectivity_spec() const {
        return connectivity == Connectivity::full ? ConnectivitySpec::full() : ConnectivitySpec::knn(k);
    }
    /// Throws std::invalid_argument on an unusable configuration.
    void validate() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

std::string format_model(const VariogramModel& model);
/// "exp:<sill>:<range>[:<nugget>]", "nugget:<sill>", "linear:<slope>:<range>[:<nugget>]".
VariogramModel parse_model(const std::string& text);
std::string format_window(const VertexWindow& window);
/// "ones", "ball:<r>", "gauss:<rho>".
VertexWindow parse_window(const std::string& text);
std::string format_scheme(SamplingScheme scheme);
SamplingScheme parse_scheme(const std::string& text);
std::string format_connectivity(Connectivity connectivity);
Connectivity parse_connectivity(const std::string& text);

io::KeyValues to_key_values(const ExperimentConfig& config);
/// Applies the recognised keys on top of `base`; unknown keys are an error.
ExperimentConfig config_from_key_values(const io::KeyValues& values, ExperimentConfig base = {});

/// Seeds used for graph realization g.
std::uint64_t sample_seed(std::uint64_t seed, std::size_t graph_index);
std::uint64_t field_seed(std::uint64_t seed, std::size_t graph_index);

struct VariogramExperimentResult {
    /// Across-realization statistics for one graph, or across-graph
    /// statistics of the per-graph means for several.
    EnsembleStatistics statistics;
    std::vector<EnsembleStatistics> per_graph;
    std::vector<double> truth;  // gamma(h) at each bin centre
    io::KeyValues summary;
};

VariogramExperimentResult run_variogram_experiment(const ExperimentConfig& config);

struct PsdExperimentResult {
    PsdStatistics psd;
    io::KeyValues summary;
};

PsdExperimentResult run_psd_experiment(const ExperimentConfig& config);

struct DiagnosticExperimentResult {
    StationarityScores scores;
    io::KeyValues summary;
};

DiagnosticExperimentResult run_stationarity_diagnostic(const ExperimentConfig& config);

/// File emitters; each writes into config.output_dir (created if missing)
/// together with summary.txt and config.txt.
void write_variogram_outputs(const ExperimentConfig& config, const VariogramExperimentResult& result);
void write_psd_outputs(const ExperimentConfig& config, const PsdExperimentResult& result);
void write_diagnostic_outputs(const ExperimentConfig& config, const DiagnosticExperimentResult& result);
/// positions.dat, signals.dat and edges.dat for the first graph realization.
void write_simulation_outputs(const ExperimentConfig& config);

}  // namespace graphvario
