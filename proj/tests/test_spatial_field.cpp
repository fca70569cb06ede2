#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "graphvario/rng.hpp"
#include "graphvario/spatial_field.hpp"
#include "oracles.hpp"

using namespace graphvario;
using Catch::Approx;

TEST_CASE("rng substreams are counter-derived and reproducible", "[rng]") {
    Rng a(derive_seed(5, Stream::field, 3));
    Rng b(derive_seed(5, Stream::field, 3));
    Rng c(derive_seed(5, Stream::field, 4));
    bool differs = false;
    for (int i = 0; i < 10; ++i) {
        const double x = a.normal();
        REQUIRE(x == b.normal());
        differs = differs || x != c.normal();
    }
    REQUIRE(differs);
    REQUIRE(derive_seed(5, Stream::field, 3) != derive_seed(5, Stream::field, 4));
    REQUIRE(derive_seed(5, Stream::field, 0) != derive_seed(5, Stream::positions, 0));
}

TEST_CASE("rng normal variates have unit variance", "[rng]") {
    Rng rng(42);
    double s = 0.0, ss = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        ss += z * z;
    }
    REQUIRE(std::abs(s / n) < 0.01);
    REQUIRE(ss / n == Approx(1.0).margin(0.01));
}

TEST_CASE("sample_positions draws inside the unit square", "[spatial]") {
    const auto s = sample_positions(500, SamplingScheme::uniform, 1);
    REQUIRE(s.size() == 500);
    for (const auto& p : s.positions()) {
        REQUIRE(p.x >= 0.0);
        REQUIRE(p.x <= 1.0);
        REQUIRE(p.y >= 0.0);
        REQUIRE(p.y <= 1.0);
    }
    const auto tiny = sample_positions(2, SamplingScheme::uniform, 7);
    REQUIRE(tiny.size() == 2);
    REQUIRE_FALSE(tiny[0] == tiny[1]);
}

TEST_CASE("sample_positions rejects n < 2", "[spatial]") {
    REQUIRE_THROWS_AS(sample_positions(1, SamplingScheme::uniform, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(sample_positions(0, SamplingScheme::nonuniform, 1), std::invalid_argument);
}

TEST_CASE("nonuniform sampling clusters around mixture means", "[spatial]") {
    const auto s = sample_positions(1000, SamplingScheme::nonuniform, 3);
    auto count_near = [&](Point c) {
        return std::count_if(s.positions().begin(), s.positions().end(),
                             [&](const Point& p) { return oracle::dist(p, c) <= 0.1; });
    };
    const auto dense = count_near({0.25, 0.25});
    const auto sparse = count_near({0.95, 0.05});
    REQUIRE(dense > 4 * std::max<long>(sparse, 1));
    for (const auto& p : s.positions()) {
        REQUIRE(p.x >= 0.0);
        REQUIRE(p.x <= 1.0);
        REQUIRE(p.y >= 0.0);
        REQUIRE(p.y <= 1.0);
    }
}

TEST_CASE("sample_positions is deterministic in the seed", "[spatial]") {
    const auto a = sample_positions(50, SamplingScheme::nonuniform, 9);
    const auto b = sample_positions(50, SamplingScheme::nonuniform, 9);
    const auto c = sample_positions(50, SamplingScheme::nonuniform, 10);
    REQUIRE(a.positions() == b.positions());
    REQUIRE_FALSE(a.positions() == c.positions());
}

TEST_CASE("SpatialSample rejects duplicates", "[spatial]") {
    REQUIRE_THROWS_AS(SpatialSample({{0.1, 0.1}, {0.1, 0.1}}, SamplingScheme::uniform, 0), std::invalid_argument);
}

TEST_CASE("exponential model values", "[model]") {
    const auto m = VariogramModel::exponential(1.0, 0.2);
    REQUIRE(m.semivariogram(0.0) == 0.0);
    REQUIRE(m.semivariogram(0.2) == Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    REQUIRE(m.covariance(0.2) == Approx(0.36787944117144233).epsilon(1e-15));
    double prev = 0.0;
    for (double h = 0.01; h < 2.0; h += 0.01) {
        REQUIRE(m.semivariogram(h) >= prev);
        prev = m.semivariogram(h);
    }
    REQUIRE_THROWS_AS(VariogramModel::exponential(1.0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(VariogramModel::exponential(-1.0, 0.2), std::invalid_argument);
}

TEST_CASE("covariance_from_model closed form at distance equal to the range", "[covariance]") {
    const SpatialSample s({{0.0, 0.0}, {0.2, 0.0}}, SamplingScheme::uniform, 0);
    const auto cov = covariance_from_model(s, VariogramModel::exponential(1.0, 0.2), 0.0);
    REQUIRE(cov(0, 1) == Approx(0.36787944117144233).epsilon(1e-14));
    REQUIRE(cov(0, 0) == 1.0);
}

TEST_CASE("covariance diagonal is sill + nugget + jitter", "[covariance]") {
    const auto s = sample_positions(20, SamplingScheme::uniform, 4);
    const auto m = VariogramModel::exponential(1.5, 0.3, 0.25);
    const auto cov = covariance_from_model(s, m, 1e-10);
    for (Eigen::Index i = 0; i < cov.rows(); ++i) REQUIRE(cov(i, i) == 1.5 + 0.25 + 1e-10);
    const auto cov0 = covariance_from_model(s, m, 0.0);
    for (Eigen::Index i = 0; i < cov0.rows(); ++i) REQUIRE(cov0(i, i) == 1.75);
}

TEST_CASE("covariance matches a brute-force entrywise oracle", "[covariance]") {
    const auto pts = oracle::random_points(10, 17);
    const SpatialSample s(pts, SamplingScheme::uniform, 17);
    const auto cov = covariance_from_model(s, VariogramModel::exponential(1.0, 0.2), 0.0);
    const auto ref = oracle::covariance(pts, 1.0, 0.2);
    REQUIRE((cov - ref).cwiseAbs().maxCoeff() <= 1e-14);
    REQUIRE((cov - cov.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("covariance decays strictly with distance", "[covariance]") {
    const auto s = sample_positions(30, SamplingScheme::uniform, 8);
    const auto cov = covariance_from_model(s, VariogramModel::exponential(1.0, 0.2), 0.0);
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
            pairs.emplace_back(s.distance(i, j), cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    std::sort(pairs.begin(), pairs.end());
    for (std::size_t t = 1; t < pairs.size(); ++t)
        if (pairs[t].first > pairs[t - 1].first) REQUIRE(pairs[t].second < pairs[t - 1].second);
}

TEST_CASE("linear model is rejected by covariance construction", "[covariance]") {
    const auto s = sample_positions(5, SamplingScheme::uniform, 1);
    REQUIRE_THROWS_AS(covariance_from_model(s, VariogramModel::linear(1.0, 1.0)), UnsupportedModelError);
    REQUIRE(VariogramModel::linear(2.0, 1.0).semivariogram(0.5) == 1.0);
}

TEST_CASE("cholesky reports the failing leading minor", "[covariance]") {
    Eigen::MatrixXd a(3, 3);
    a << 1, 0, 0,  //
        0, 1, 1,   //
        0, 1, 1;
    try {
        cholesky_lower(a);
        FAIL("expected FactorizationError");
    } catch (const FactorizationError& e) {
        REQUIRE(e.leading_minor() == 3);
    }
    Eigen::MatrixXd spd(2, 2);
    spd << 4, 2, 2, 3;
    const auto l = cholesky_lower(spd);
    REQUIRE((l * l.transpose() - spd).cwiseAbs().maxCoeff() < 1e-14);
    REQUIRE(l(0, 1) == 0.0);
}

TEST_CASE("generate_ensemble shape and determinism", "[ensemble]") {
    const auto s = sample_positions(500, SamplingScheme::uniform, 1);
    const auto m = VariogramModel::exponential(1.0, 0.2);
    const auto e = generate_ensemble(s, m, 1000, 11);
    REQUIRE(e.vertices() == 500);
    REQUIRE(e.size() == 1000);

    const auto small = sample_positions(40, SamplingScheme::nonuniform, 2);
    const auto a = generate_ensemble(small, m, 30, 5, kDefaultCovarianceJitter, 1);
    const auto b = generate_ensemble(small, m, 30, 5, kDefaultCovarianceJitter, 4);
    REQUIRE(a.signals == b.signals);
    // Growing R keeps the earlier realizations.
    const auto c = generate_ensemble(small, m, 40, 5);
    REQUIRE(c.signals.leftCols(30) == a.signals);
}

TEST_CASE("zero-variance model yields all-zero realizations", "[ensemble]") {
    const auto s = sample_positions(25, SamplingScheme::uniform, 3);
    const auto e = generate_ensemble(s, VariogramModel::pure_nugget(0.0), 10, 1);
    REQUIRE(e.signals.isZero(0.0));
}

TEST_CASE("ensemble sample covariance converges to the model", "[ensemble][slow]") {
    const auto s = sample_positions(50, SamplingScheme::uniform, 21);
    const auto m = VariogramModel::exponential(1.0, 0.2);
    const auto cov = covariance_from_model(s, m);
    const auto e = generate_ensemble(s, m, 20000, 99);
    const Eigen::MatrixXd x = e.signals;
    const Eigen::VectorXd mean = x.rowwise().mean();
    const Eigen::MatrixXd centered = x.colwise() - mean;
    const Eigen::MatrixXd sample_cov = centered * centered.transpose() / static_cast<double>(x.cols() - 1);
    REQUIRE((sample_cov - cov).cwiseAbs().maxCoeff() <= 0.05);
    REQUIRE(mean.cwiseAbs().maxCoeff() < 0.05);
}
