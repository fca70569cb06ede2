#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "graphvario/graph.hpp"
#include "graphvario/spatial_field.hpp"

namespace graphvario {

/// H disjoint distance intervals (e_{j-1}, e_j] covering (0, d_max].
class BinPartition {
public:
    /// Single bin (0, 1].
    BinPartition() : edges_{0.0, 1.0} {}
    /// Validates edges: at least two, edges[0] == 0, strictly increasing.
    explicit BinPartition(std::vector<double> edges);

    /// Equal-width partition; edge j is d_max * (j / H), so partitions whose
    /// counts divide one another share their common breakpoints exactly.
    static BinPartition equal_width(double d_max, std::size_t count);

    std::size_t size() const noexcept { return edges_.size() - 1; }
    const std::vector<double>& edges() const noexcept { return edges_; }
    double lower(std::size_t bin) const { return edges_.at(bin); }
    double upper(std::size_t bin) const { return edges_.at(bin + 1); }
    double center(std::size_t bin) const { return 0.5 * (lower(bin) + upper(bin)); }
    std::vector<double> centers() const;
    double width(std::size_t bin) const { return upper(bin) - lower(bin); }
    double max_distance() const noexcept { return edges_.back(); }

    /// Bin j with lower(j) < d <= upper(j); nullopt outside (0, d_max].
    std::optional<std::size_t> locate(double d) const noexcept;

    friend bool operator==(const BinPartition&, const BinPartition&) = default;

private:
    std::vector<double> edges_;
};

inline constexpr std::size_t kDefaultBinCount = 20;

/// Equal-width partition of (0, d_max] where d_max is the graph's largest
/// pairwise distance.
BinPartition make_bins(const SensorGraph& graph, std::size_t count = kDefaultBinCount);

enum class WindowKind { ones, ball, gaussian };

/// Vertex-domain window g_k centred on vertex k.
struct VertexWindow {
    WindowKind kind = WindowKind::ones;
    double scale = 0.0;  // ball radius r, or Gaussian decay rho

    static VertexWindow ones() { return {WindowKind::ones, 0.0}; }
    static VertexWindow ball(double radius);
    static VertexWindow gaussian(double rho);

    bool is_ones() const noexcept { return kind == WindowKind::ones; }
    Eigen::VectorXd values(const SpatialSample& sample, std::size_t center) const;

    friend bool operator==(const VertexWindow&, const VertexWindow&) = default;
};

/// Binary per-bin adjacency A_Delta restricted to the source graph's edges.
/// Window independent; shared by every centre vertex.
struct BinnedSupport {
    BinPartition bins;
    std::size_t vertices = 0;
    /// Upper-triangle pairs (i < j) per bin, sorted by (i, j).
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> pairs;

    std::size_t size() const noexcept { return pairs.size(); }
    /// Symmetric 0/1 matrix for one bin.
    SparseMatrix mask(std::size_t bin) const;
};

std::shared_ptr<const BinnedSupport> bin_support(const SensorGraph& graph, const BinPartition& bins);

/// Per-bin windowed adjacency A_(Delta,k) = G_k A_Delta G_k, its Laplacian,
/// and the normalization 1^T D_(Delta,k) 1.
class BinnedGraphFamily {
public:
    BinnedGraphFamily(std::shared_ptr<const BinnedSupport> support, const Eigen::VectorXd& window_values,
                      std::optional<std::size_t> center);

    const BinPartition& bins() const noexcept { return support_->bins; }
    std::size_t size() const noexcept { return support_->size(); }
    std::size_t vertices() const noexcept { return support_->vertices; }
    std::optional<std::size_t> center() const noexcept { return center_; }
    const BinnedSupport& support() const noexcept { return *support_; }

    /// Ordered pairs in the unwindowed binary mask (nnz of A_Delta).
    std::size_t support_count(std::size_t bin) const { return 2 * support_->pairs.at(bin).size(); }
    /// Unordered pairs carrying nonzero windowed weight.
    std::size_t pair_count(std::size_t bin) const { return pair_counts_.at(bin); }
    const SparseMatrix& adjacency(std::size_t bin) const { return adjacency_.at(bin); }
    const LaplacianView& laplacian(std::size_t bin) const { return laplacians_.at(bin); }
    double normalization(std::size_t bin) const { return normalization_.at(bin); }

private:
    std::shared_ptr<const BinnedSupport> support_;
    std::optional<std::size_t> center_;
    std::vector<SparseMatrix> adjacency_;
    std::vector<LaplacianView> laplacians_;
    std::vector<double> normalization_;
    std::vector<std::size_t> pair_counts_;
};

/// Throws std::out_of_range for a bad centre and std::invalid_argument when a
/// non-ones window has no centre.
BinnedGraphFamily binned_family(const SensorGraph& graph, const BinPartition& bins, const VertexWindow& window,
                                std::optional<std::size_t> center = std::nullopt);

enum class Scope { local, global };

/// Per-bin variogram values 2*gamma (not semivariogram); nullopt = undefined.
struct VariogramEstimate {
    BinPartition bins;
    std::vector<std::optional<double>> values;
    std::vector<std::size_t> pair_counts;
    Scope scope = Scope::global;
    std::optional<std::size_t> center;

    std::size_t size() const noexcept { return values.size(); }
    std::optional<double> semivariogram(std::size_t bin) const;
};

/// 2 x^T L_(Delta,k) x / 1^T D_(Delta,k) 1 per bin.
VariogramEstimate local_graph_variogram(const Eigen::Ref<const Eigen::VectorXd>& signal,
                                        const BinnedGraphFamily& family);

/// Average of the local variograms over the centres where each bin is defined.
/// With the ones window every centre shares one family and the result is that
/// single local estimate.
VariogramEstimate global_graph_variogram(const Eigen::Ref<const Eigen::VectorXd>& signal, const SensorGraph& graph,
                                         const BinPartition& bins, const VertexWindow& window);

/// Global variogram of every column of `signals` (N x R).
std::vector<VariogramEstimate> global_graph_variograms(const Eigen::MatrixXd& signals, const SensorGraph& graph,
                                                       const BinPartition& bins, const VertexWindow& window,
                                                       unsigned threads = 1);

/// Direct pairwise estimator over all sample pairs:
/// (1/|N(h)|) sum (x_i - x_j)^2.
VariogramEstimate classical_empirical_variogram(const Eigen::Ref<const Eigen::VectorXd>& signal,
                                                const SpatialSample& sample, const BinPartition& bins);

/// Per-bin statistics of the semivariogram gamma = value / 2.
struct EnsembleStatistics {
    BinPartition bins;
    std::vector<std::optional<double>> mean;
    /// (n-1)-normalized; 0 when a bin has a single sample.
    std::vector<std::optional<double>> stddev;
    std::vector<std::size_t> samples;
    /// Smallest pair count seen for the bin across the inputs.
    std::vector<std::size_t> pair_counts;

    std::size_t size() const noexcept { return mean.size(); }
};

/// Throws std::invalid_argument on an empty input or mixed partitions.
EnsembleStatistics ensemble_statistics(std::span<const VariogramEstimate> estimates);

/// Second aggregation level: mean and spread of per-graph mean curves.
EnsembleStatistics aggregate_statistics(std::span<const EnsembleStatistics> per_graph);

/// Standardized deviation of each local variogram from the global one:
/// (mean_r gamma(k) - mean_r gamma_global) / (std_r gamma(k) / sqrt(R)).
struct StationarityScores {
    BinPartition bins;
    /// N x H; NaN marks bins undefined at that centre.
    Eigen::MatrixXd scores;
    Eigen::MatrixXd local_mean;
    Eigen::VectorXd global_mean;
};

StationarityScores stationarity_diagnostic(const Eigen::MatrixXd& signals, const SensorGraph& graph,
                                           const BinPartition& bins, const VertexWindow& window,
                                           unsigned threads = 1);

}  // namespace graphvario
