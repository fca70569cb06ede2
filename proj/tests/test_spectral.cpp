#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "graphvario/spectral.hpp"

using namespace graphvario;
using Catch::Approx;

namespace {

SparseMatrix path_adjacency(Eigen::Index n) {
    SparseMatrix a(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        a.insert(i, i + 1) = 1.0;
        a.insert(i + 1, i) = 1.0;
    }
    return a;
}

// Mean PSD resampled at evenly spaced normalized frequencies by nearest eigenvalue.
Eigen::VectorXd on_grid(const PsdStatistics& psd, int points) {
    Eigen::VectorXd out(points);
    for (int p = 0; p < points; ++p) {
        const double f = static_cast<double>(p) / (points - 1);
        Eigen::Index best = 0;
        (psd.frequencies.array() - f).abs().minCoeff(&best);
        out(p) = psd.mean(best);
    }
    return out;
}

PsdStatistics psd_for(SamplingScheme scheme, std::uint64_t seed, std::size_t n, std::size_t r) {
    const auto s = sample_positions(n, scheme, seed);
    const auto g = build_graph(s, ConnectivitySpec::full(), 0.05);
    const auto e = generate_ensemble(s, VariogramModel::exponential(1.0, 0.2), r, seed + 1000);
    return empirical_psd(e.signals, decompose(laplacian(g)));
}

}  // namespace

TEST_CASE("two-node spectrum", "[spectral]") {
    const auto d = decompose(laplacian_from_adjacency(path_adjacency(2)));
    REQUIRE(d.eigenvalues(0) == Approx(0.0).margin(1e-15));
    REQUIRE(d.eigenvalues(1) == Approx(2.0).epsilon(1e-15));
    const double h = 1.0 / std::sqrt(2.0);
    REQUIRE(d.eigenvectors(0, 0) == Approx(h).epsilon(1e-15));
    REQUIRE(d.eigenvectors(1, 0) == Approx(h).epsilon(1e-15));
    REQUIRE(d.eigenvectors(0, 1) == Approx(h).epsilon(1e-15));
    REQUIRE(d.eigenvectors(1, 1) == Approx(-h).epsilon(1e-15));
    REQUIRE(d.normalized_frequencies(1) == 1.0);
}

TEST_CASE("path graph spectrum matches the closed form", "[spectral]") {
    for (Eigen::Index n : {4, 7}) {
        const auto d = decompose(laplacian_from_adjacency(path_adjacency(n)));
        for (Eigen::Index k = 0; k < n; ++k)
            REQUIRE(d.eigenvalues(k) ==
                    Approx(2.0 - 2.0 * std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)))
                        .margin(1e-12));
    }
}

TEST_CASE("decomposition of a 500-vertex kernel graph", "[spectral][slow]") {
    const auto s = sample_positions(500, SamplingScheme::uniform, 1);
    const auto view = laplacian(build_graph(s, ConnectivitySpec::full(), 0.05));
    const Eigen::MatrixXd l = view.laplacian;
    const auto d = decompose(view);
    const Eigen::MatrixXd& u = d.eigenvectors;
    REQUIRE((u * d.eigenvalues.asDiagonal() * u.transpose() - l).cwiseAbs().maxCoeff() <= 1e-8);
    REQUIRE((u.transpose() * u - Eigen::MatrixXd::Identity(500, 500)).cwiseAbs().maxCoeff() <= 1e-9);
    REQUIRE(std::abs(d.eigenvalues(0)) <= 1e-9);
    const double top = d.eigenvalues.maxCoeff();
    REQUIRE((l * u - u * d.eigenvalues.asDiagonal()).cwiseAbs().maxCoeff() <= 1e-8 * top);
    REQUIRE(d.normalized_frequencies.minCoeff() >= 0.0);
    REQUIRE(d.normalized_frequencies.maxCoeff() == 1.0);
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        Eigen::Index i = 0;
        while (u(i, c) == 0.0) ++i;
        REQUIRE(u(i, c) > 0.0);
    }
}

TEST_CASE("decompose rejects non-symmetric input", "[spectral]") {
    Eigen::MatrixXd m(2, 2);
    m << 1, 2, 0, 1;
    REQUIRE_THROWS_AS(decompose(m), std::invalid_argument);
    REQUIRE_THROWS_AS(decompose(Eigen::MatrixXd(2, 3)), std::invalid_argument);
}

TEST_CASE("constant ensemble puts all energy at frequency zero", "[psd]") {
    const auto s = sample_positions(40, SamplingScheme::uniform, 2);
    const auto d = decompose(laplacian(build_graph(s, ConnectivitySpec::full(), 0.2)));
    const Eigen::MatrixXd signals = Eigen::MatrixXd::Constant(40, 5, 2.5);
    const auto psd = empirical_psd(signals, d);
    REQUIRE(psd.mean(0) == Approx(40.0 * 2.5 * 2.5).epsilon(1e-12));
    REQUIRE(psd.mean.tail(39).maxCoeff() <= 1e-24 * psd.mean(0));
    REQUIRE(psd.stddev.maxCoeff() <= 1e-12);
}

TEST_CASE("white noise has a flat PSD", "[psd][slow]") {
    const auto s = sample_positions(50, SamplingScheme::nonuniform, 6);
    const auto d = decompose(laplacian(build_graph(s, ConnectivitySpec::full(), 0.05)));
    const auto e = generate_ensemble(s, VariogramModel::pure_nugget(1.0), 5000, 3);
    const auto psd = empirical_psd(e.signals, d);
    REQUIRE((psd.mean.array() - 1.0).abs().maxCoeff() <= 0.1);
}

TEST_CASE("Parseval holds per realization", "[psd]") {
    const auto s = sample_positions(60, SamplingScheme::uniform, 8);
    const auto d = decompose(laplacian(build_graph(s, ConnectivitySpec::full(), 0.05)));
    const auto e = generate_ensemble(s, VariogramModel::exponential(1.0, 0.2), 50, 4);
    for (std::size_t r = 0; r < e.size(); ++r) {
        const Eigen::VectorXd x = e.realization(r);
        const Eigen::VectorXd xh = d.forward(x);
        REQUIRE(std::abs(xh.squaredNorm() - x.squaredNorm()) <= 1e-9 * x.squaredNorm());
    }
}

TEST_CASE("mean PSD converges to the diagonal of U^T Sigma U", "[psd][slow]") {
    const auto s = sample_positions(50, SamplingScheme::uniform, 10);
    const auto model = VariogramModel::exponential(1.0, 0.2);
    const auto d = decompose(laplacian(build_graph(s, ConnectivitySpec::full(), 0.05)));
    const auto e = generate_ensemble(s, model, 20000, 12);
    const auto psd = empirical_psd(e.signals, d);
    const Eigen::VectorXd population =
        (d.eigenvectors.transpose() * covariance_from_model(s, model) * d.eigenvectors).diagonal();
    REQUIRE((psd.mean - population).cwiseAbs().maxCoeff() <= 0.05 * population.maxCoeff());
}

TEST_CASE("correlated field concentrates energy at low graph frequencies", "[psd][slow]") {
    const auto psd = psd_for(SamplingScheme::uniform, 3, 200, 1000);
    double high = 0, low = 0;
    int nh = 0, nl = 0;
    for (Eigen::Index i = 0; i < psd.frequencies.size(); ++i) {
        if (psd.frequencies(i) > 0.5) high += psd.mean(i), ++nh;
        if (psd.frequencies(i) < 0.1) low += psd.mean(i), ++nl;
    }
    REQUIRE(nh > 0);
    REQUIRE(nl > 0);
    REQUIRE(high / nh < low / nl);
}

TEST_CASE("uniform and nonuniform samplings give inconsistent graph PSDs", "[psd][slow]") {
    const int grid = 101;
    const Eigen::VectorXd u1 = on_grid(psd_for(SamplingScheme::uniform, 11, 200, 1000), grid);
    const Eigen::VectorXd u2 = on_grid(psd_for(SamplingScheme::uniform, 12, 200, 1000), grid);
    const Eigen::VectorXd nu = on_grid(psd_for(SamplingScheme::nonuniform, 13, 200, 1000), grid);
    const double within = (u1 - u2).norm() / u1.norm();
    const double across = (u1 - nu).norm() / u1.norm();
    INFO("within-scheme " << within << ", across-scheme " << across);
    REQUIRE(across > within);
}

TEST_CASE("PSD argument checks and decibels", "[psd]") {
    const auto d = decompose(laplacian_from_adjacency(path_adjacency(3)));
    REQUIRE_THROWS_AS(empirical_psd(Eigen::MatrixXd::Zero(4, 2), d), std::invalid_argument);
    const Eigen::Vector3d v(1.0, 100.0, 0.0);
    const auto db = to_decibels(v);
    REQUIRE(db(0) == 0.0);
    REQUIRE(db(1) == Approx(20.0).epsilon(1e-15));
    REQUIRE(std::isinf(db(2)));
}
