#include "graphvario/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace graphvario {

namespace {

SparseMatrix symmetric_from_edges(std::size_t n, const std::vector<Edge>& edges) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(2 * edges.size());
    for (const auto& e : edges) {
        triplets.emplace_back(e.i, e.j, e.weight);
        triplets.emplace_back(e.j, e.i, e.weight);
    }
    SparseMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    a.setFromTriplets(triplets.begin(), triplets.end());
    return a;
}

}  // namespace

SensorGraph::SensorGraph(SpatialSample sample, std::vector<Edge> edges, double kernel_sigma,
                         ConnectivitySpec connectivity)
    : sample_(std::move(sample)), edges_(std::move(edges)), kernel_sigma_(kernel_sigma), connectivity_(connectivity) {
    const std::size_t n = sample_.size();
    for (const auto& e : edges_) {
        if (e.i >= e.j || e.j >= n) throw std::invalid_argument("SensorGraph: edges must satisfy i < j < N");
        if (!(e.weight >= 0.0)) throw std::invalid_argument("SensorGraph: negative edge weight");
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    if (std::adjacent_find(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
            return a.i == b.i && a.j == b.j;
        }) != edges_.end())
        throw std::invalid_argument("SensorGraph: duplicate edge");
    adjacency_ = symmetric_from_edges(n, edges_);

    const bool dense = n <= kDenseDistanceLimit;
    if (dense) distances_.setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = sample_.distance(i, j);
            max_distance_ = std::max(max_distance_, d);
            if (dense) {
                distances_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
                distances_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
            }
        }
    }
}

double SensorGraph::distance(std::size_t i, std::size_t j) const {
    if (distances_.size() > 0) return distances_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return sample_.distance(i, j);
}

const Eigen::MatrixXd& SensorGraph::distances() const {
    if (distances_.size() == 0)
        throw std::length_error("SensorGraph: dense distances are only kept for N <= " +
                                std::to_string(kDenseDistanceLimit));
    return distances_;
}

SensorGraph build_graph(const SpatialSample& sample, ConnectivitySpec connectivity, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("build_graph: sigma must be > 0");
    const std::size_t n = sample.size();
    const double scale = 2.0 * sigma * sigma;
    auto make_edge = [&](std::size_t i, std::size_t j) {
        const double d = sample.distance(i, j);
        return Edge{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), d, std::exp(-(d * d) / scale)};
    };

    std::vector<Edge> edges;
    if (connectivity.kind == Connectivity::full) {
        edges.reserve(n * (n - 1) / 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) edges.push_back(make_edge(i, j));
        return SensorGraph(sample, std::move(edges), sigma, connectivity);
    }

    const std::size_t k = connectivity.k;
    if (k < 1 || k >= n) throw std::invalid_argument("build_graph: knn requires 1 <= K < N");
    std::vector<char> selected(n * n, 0);
    std::vector<std::size_t> order(n);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) dist[j] = sample.distance(i, j);
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
        std::erase(order, i);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                          [&](std::size_t a, std::size_t b) { return dist[a] != dist[b] ? dist[a] < dist[b] : a < b; });
        for (std::size_t r = 0; r < k; ++r) {
            const std::size_t j = order[r];
            selected[std::min(i, j) * n + std::max(i, j)] = 1;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (selected[i * n + j]) edges.push_back(make_edge(i, j));
    return SensorGraph(sample, std::move(edges), sigma, connectivity);
}

LaplacianView laplacian_from_adjacency(const SparseMatrix& adjacency) {
    const Eigen::Index n = adjacency.rows();
    if (adjacency.cols() != n) throw std::invalid_argument("laplacian: adjacency is not square");
    LaplacianView view;
    view.degree = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(adjacency.nonZeros() + n));
    for (Eigen::Index c = 0; c < adjacency.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(adjacency, c); it; ++it) {
            if (it.row() == it.col()) continue;
            view.degree(it.row()) += it.value();
            triplets.emplace_back(it.row(), it.col(), -it.value());
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) triplets.emplace_back(i, i, view.degree(i));
    view.laplacian.resize(n, n);
    view.laplacian.setFromTriplets(triplets.begin(), triplets.end());
    return view;
}

LaplacianView laplacian(const SensorGraph& graph) { return laplacian_from_adjacency(graph.adjacency()); }

double quadratic_form(const SparseMatrix& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (m.rows() != m.cols() || m.rows() != x.size())
        throw std::invalid_argument("quadratic_form: dimension mismatch");
    Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(m.rows());
    double edge_terms = 0.0;
    for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
            row_sum(it.row()) += it.value();
            if (it.row() < it.col()) {
                const double diff = x(it.row()) - x(it.col());
                edge_terms -= it.value() * diff * diff;
            }
        }
    }
    double diagonal_terms = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (row_sum(i) != 0.0) diagonal_terms += row_sum(i) * x(i) * x(i);
    return diagonal_terms + edge_terms;
}

double quadratic_form(const Eigen::MatrixXd& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (m.rows() != m.cols() || m.rows() != x.size())
        throw std::invalid_argument("quadratic_form: dimension mismatch");
    const Eigen::Index n = m.rows();
    double edge_terms = 0.0;
    double diagonal_terms = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const double diff = x(i) - x(j);
            edge_terms -= m(i, j) * diff * diff;
        }
        const double row_sum = m.row(j).sum();
        if (row_sum != 0.0) diagonal_terms += row_sum * x(j) * x(j);
    }
    return diagonal_terms + edge_terms;
}

double laplacian_quadratic_form(const SparseMatrix& l, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (l.rows() != l.cols() || l.rows() != x.size())
        throw std::invalid_argument("laplacian_quadratic_form: dimension mismatch");
    double total = 0.0;
    for (Eigen::Index c = 0; c < l.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(l, c); it; ++it) {
            if (it.row() >= it.col()) continue;
            const double diff = x(it.row()) - x(it.col());
            total -= it.value() * diff * diff;
        }
    }
    return total;
}

void write_edge_list(std::ostream& out, const SensorGraph& graph) {
    const auto old_precision = out.precision(17);
    out << "# i j d_ij w_ij\n";
    for (const auto& e : graph.edges()) out << e.i << ' ' << e.j << ' ' << e.distance << ' ' << e.weight << '\n';
    out.precision(old_precision);
}

}  // namespace graphvario
