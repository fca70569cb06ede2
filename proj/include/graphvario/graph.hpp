#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "graphvario/spatial_field.hpp"

namespace graphvario {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class Connectivity { full, knn };

struct ConnectivitySpec {
    Connectivity kind = Connectivity::full;
    std::size_t k = 0;

    static ConnectivitySpec full() { return {Connectivity::full, 0}; }
    static ConnectivitySpec knn(std::size_t k) { return {Connectivity::knn, k}; }
    friend bool operator==(const ConnectivitySpec&, const ConnectivitySpec&) = default;
};

/// Undirected edge stored once with i < j.
struct Edge {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    double distance = 0.0;
    double weight = 0.0;
};

/// Distance matrices are kept dense up to this many vertices.
inline constexpr std::size_t kDenseDistanceLimit = 2000;

/// Sensor network graph with Gaussian-kernel weights.
///
/// The edge list is the canonical store (sorted by (i, j)); the adjacency is a
/// compressed symmetric matrix. An edge belongs to the support even if its
/// kernel weight underflows to zero.
class SensorGraph {
public:
    SensorGraph(SpatialSample sample, std::vector<Edge> edges, double kernel_sigma, ConnectivitySpec connectivity);

    std::size_t size() const noexcept { return sample_.size(); }
    const SpatialSample& sample() const noexcept { return sample_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const SparseMatrix& adjacency() const noexcept { return adjacency_; }
    double kernel_sigma() const noexcept { return kernel_sigma_; }
    const ConnectivitySpec& connectivity() const noexcept { return connectivity_; }

    /// Largest distance over all vertex pairs (edges or not).
    double max_distance() const noexcept { return max_distance_; }
    double distance(std::size_t i, std::size_t j) const;
    /// Dense distance matrix; throws std::length_error above kDenseDistanceLimit.
    const Eigen::MatrixXd& distances() const;

private:
    SpatialSample sample_;
    std::vector<Edge> edges_;
    SparseMatrix adjacency_;
    Eigen::MatrixXd distances_;
    double kernel_sigma_;
    ConnectivitySpec connectivity_;
    double max_distance_ = 0.0;
};

/// w_ij = exp(-d_ij^2 / (2 sigma^2)) on the full graph or the union-symmetrized
/// K-nearest-neighbour relation (ties broken by lower vertex index).
SensorGraph build_graph(const SpatialSample& sample, ConnectivitySpec connectivity, double sigma);

struct LaplacianView {
    SparseMatrix laplacian;
    Eigen::VectorXd degree;
};

/// L = D - A with D_ii = sum_j A_ij.
LaplacianView laplacian(const SensorGraph& graph);
LaplacianView laplacian_from_adjacency(const SparseMatrix& adjacency);

/// x^T M x for a symmetric M, evaluated as
///   sum_i rowsum_i x_i^2 - sum_{i<j} M_ij (x_i - x_j)^2,
/// which equals the edge form of the Laplacian quadratic form when the row
/// sums vanish. Only the upper triangle of M is read for off-diagonal terms.
double quadratic_form(const SparseMatrix& symmetric, const Eigen::Ref<const Eigen::VectorXd>& signal);
double quadratic_form(const Eigen::MatrixXd& symmetric, const Eigen::Ref<const Eigen::VectorXd>& signal);

/// Edge form sum_{i<j} -L_ij (x_i - x_j)^2 of a Laplacian-like matrix whose
/// rows sum to zero. Reads only the strictly upper triangle, so the result is
/// nonnegative whenever the off-diagonal entries are nonpositive.
double laplacian_quadratic_form(const SparseMatrix& laplacian, const Eigen::Ref<const Eigen::VectorXd>& signal);

/// Rows "i j d_ij w_ij", 0-based, one per undirected edge.
void write_edge_list(std::ostream& out, const SensorGraph& graph);

}  // namespace graphvario
