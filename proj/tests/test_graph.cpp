#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "graphvario/graph.hpp"
#include "oracles.hpp"

using namespace graphvario;
using Catch::Approx;

namespace {

SpatialSample points(std::vector<Point> p) { return SpatialSample(std::move(p), SamplingScheme::uniform, 0); }

Eigen::MatrixXd dense(const SparseMatrix& m) { return Eigen::MatrixXd(m); }

}  // namespace

TEST_CASE("full graph with 500 uniform sensors", "[graph]") {
    const auto s = sample_positions(500, SamplingScheme::uniform, 1);
    const auto g = build_graph(s, ConnectivitySpec::full(), 0.05);
    REQUIRE(g.edges().size() == 124750);
    const auto a = dense(g.adjacency());
    REQUIRE((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(a.diagonal().isZero(0.0));
    REQUIRE(a.minCoeff() >= 0.0);
    for (const auto& e : g.edges()) {
        REQUIRE(e.distance == s.distance(e.i, e.j));
        REQUIRE(e.weight == std::exp(-(e.distance * e.distance) / (2.0 * 0.05 * 0.05)));
    }
    REQUIRE(g.max_distance() > 0.0);
}

TEST_CASE("kernel weight between equidistant collinear points", "[graph]") {
    const auto g = build_graph(points({{0.0, 0.0}, {0.1, 0.0}, {0.2, 0.0}}), ConnectivitySpec::full(), 0.1);
    const auto a = dense(g.adjacency());
    REQUIRE(a(0, 1) == Approx(0.6065306597126334).epsilon(1e-12));
    REQUIRE(a(1, 2) == Approx(0.6065306597126334).epsilon(1e-12));
    REQUIRE(a(0, 2) == Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("knn support equals the brute-force union-symmetrized relation", "[graph]") {
    const auto pts = oracle::random_points(20, 33);
    const auto s = points(pts);
    const auto g = build_graph(s, ConnectivitySpec::knn(3), 0.1);
    std::set<std::pair<std::size_t, std::size_t>> got;
    for (const auto& e : g.edges()) got.emplace(e.i, e.j);
    REQUIRE(got == oracle::knn_pairs(pts, 3));
}

TEST_CASE("knn edge count is monotone in K and K = N-1 is the full graph", "[graph]") {
    const auto s = sample_positions(30, SamplingScheme::nonuniform, 5);
    std::size_t prev = 0;
    for (std::size_t k = 1; k < 30; ++k) {
        const auto g = build_graph(s, ConnectivitySpec::knn(k), 0.1);
        REQUIRE(g.edges().size() >= prev);
        prev = g.edges().size();
    }
    REQUIRE(prev == 30 * 29 / 2);
}

TEST_CASE("knn ties are broken by lower vertex index", "[graph]") {
    // Vertices 1 and 2 are both at distance 0.25 from vertex 0; vertex 2's own
    // nearest neighbour is vertex 4, so only the tie-break decides {0, 1}.
    const auto g = build_graph(points({{0.5, 0.5}, {0.75, 0.5}, {0.25, 0.5}, {0.9, 0.9}, {0.2, 0.5}}),
                               ConnectivitySpec::knn(1), 0.1);
    std::set<std::pair<std::size_t, std::size_t>> got;
    for (const auto& e : g.edges()) got.emplace(e.i, e.j);
    const std::set<std::pair<std::size_t, std::size_t>> expected{{0, 1}, {1, 3}, {2, 4}};
    REQUIRE(got == expected);
}

TEST_CASE("build_graph validates its arguments", "[graph]") {
    const auto s = sample_positions(10, SamplingScheme::uniform, 1);
    REQUIRE_THROWS_AS(build_graph(s, ConnectivitySpec::full(), 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(build_graph(s, ConnectivitySpec::full(), -1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(build_graph(s, ConnectivitySpec::knn(0), 0.1), std::invalid_argument);
    REQUIRE_THROWS_AS(build_graph(s, ConnectivitySpec::knn(10), 0.1), std::invalid_argument);
}

TEST_CASE("two-node Laplacian", "[laplacian]") {
    SparseMatrix a(2, 2);
    a.insert(0, 1) = 1.0;
    a.insert(1, 0) = 1.0;
    const auto view = laplacian_from_adjacency(a);
    Eigen::MatrixXd expected(2, 2);
    expected << 1, -1, -1, 1;
    REQUIRE(dense(view.laplacian) == expected);
    REQUIRE(view.degree == Eigen::Vector2d(1, 1));
}

TEST_CASE("Laplacian invariants on a kernel graph", "[laplacian]") {
    const auto s = sample_positions(60, SamplingScheme::nonuniform, 12);
    const auto g = build_graph(s, ConnectivitySpec::full(), 0.2);
    const auto view = laplacian(g);
    const auto l = dense(view.laplacian);
    REQUIRE(l.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
    REQUIRE((l.diagonal() - view.degree).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l, Eigen::EigenvaluesOnly);
    REQUIRE(solver.eigenvalues().minCoeff() >= -1e-9);
    const Eigen::VectorXd c = Eigen::VectorXd::Constant(60, 3.25);
    REQUIRE(std::abs(quadratic_form(view.laplacian, c)) <= 1e-12);
    REQUIRE(laplacian_quadratic_form(view.laplacian, c) == 0.0);
}

TEST_CASE("quadratic form equals the half double-sum of weighted differences", "[laplacian]") {
    const auto pts = oracle::random_points(10, 4);
    const auto g = build_graph(points(pts), ConnectivitySpec::full(), 0.3);
    const auto view = laplacian(g);
    const Eigen::VectorXd x = Eigen::VectorXd::Random(10);
    const double ref = oracle::half_weighted_sum(dense(g.adjacency()), x);
    REQUIRE(quadratic_form(view.laplacian, x) == Approx(ref).epsilon(1e-12));
    REQUIRE(quadratic_form(dense(view.laplacian), x) == Approx(ref).epsilon(1e-12));
    REQUIRE(laplacian_quadratic_form(view.laplacian, x) == Approx(ref).epsilon(1e-12));
    const Eigen::MatrixXd l = dense(view.laplacian);
    REQUIRE(x.dot(l * x) == Approx(ref).epsilon(1e-10));
}

TEST_CASE("quadratic form of a general symmetric matrix", "[laplacian]") {
    Eigen::MatrixXd m(3, 3);
    m << 2, 1, 0,  //
        1, 3, -1,  //
        0, -1, 1;
    const Eigen::Vector3d x(1.0, -2.0, 0.5);
    REQUIRE(quadratic_form(m, x) == Approx(x.dot(m * x)).epsilon(1e-14));
    REQUIRE(quadratic_form(SparseMatrix(m.sparseView()), x) == Approx(x.dot(m * x)).epsilon(1e-14));
    REQUIRE_THROWS_AS(quadratic_form(m, Eigen::Vector2d(1, 2)), std::invalid_argument);
}

TEST_CASE("graph quantities are permutation equivariant", "[graph]") {
    const auto pts = oracle::random_points(15, 8);
    std::vector<std::size_t> perm(15);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::swap(perm[2], perm[9]);
    std::vector<Point> permuted(15);
    for (std::size_t i = 0; i < 15; ++i) permuted[i] = pts[perm[i]];

    const auto g = build_graph(points(pts), ConnectivitySpec::knn(4), 0.2);
    const auto gp = build_graph(points(permuted), ConnectivitySpec::knn(4), 0.2);
    const auto a = dense(g.adjacency());
    const auto ap = dense(gp.adjacency());
    for (std::size_t i = 0; i < 15; ++i)
        for (std::size_t j = 0; j < 15; ++j)
            REQUIRE(ap(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
                    a(static_cast<Eigen::Index>(perm[i]), static_cast<Eigen::Index>(perm[j])));

    const Eigen::VectorXd x = oracle::dyadic_signal(15, 3);
    Eigen::VectorXd xp(15);
    for (std::size_t i = 0; i < 15; ++i) xp(static_cast<Eigen::Index>(i)) = x(static_cast<Eigen::Index>(perm[i]));
    REQUIRE(quadratic_form(laplacian(gp).laplacian, xp) == Approx(quadratic_form(laplacian(g).laplacian, x)).epsilon(1e-13));
}

TEST_CASE("edge list serialization", "[graph]") {
    const auto g = build_graph(points({{0.0, 0.0}, {0.1, 0.0}, {0.2, 0.0}}), ConnectivitySpec::full(), 0.1);
    std::ostringstream out;
    write_edge_list(out, g);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    REQUIRE(header.front() == '#');
    std::size_t i = 0, j = 0;
    double d = 0, w = 0;
    std::size_t rows = 0;
    while (in >> i >> j >> d >> w) {
        REQUIRE(i < j);
        REQUIRE(d == g.distance(i, j));
        ++rows;
    }
    REQUIRE(rows == 3);
}

TEST_CASE("dense distances are symmetric and exact", "[graph]") {
    const auto s = sample_positions(25, SamplingScheme::uniform, 2);
    const auto g = build_graph(s, ConnectivitySpec::knn(3), 0.1);
    const auto& d = g.distances();
    REQUIRE((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
    double dmax = 0.0;
    for (std::size_t i = 0; i < 25; ++i)
        for (std::size_t j = 0; j < 25; ++j) {
            REQUIRE(d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == s.distance(i, j));
            dmax = std::max(dmax, s.distance(i, j));
        }
    REQUIRE(g.max_distance() == dmax);
}
