#include "graphvario/spatial_field.hpp"

#include <array>
#include <cmath>
#include <set>
#include <utility>

#include "graphvario/rng.hpp"

namespace graphvario {

namespace {

struct MixtureComponent {
    Point mean;
};

constexpr std::array<MixtureComponent, 3> kMixture{{
    {{0.25, 0.25}},
    {{0.70, 0.60}},
    {{0.40, 0.85}},
}};
constexpr double kMixtureStd = 0.12;

Point draw_uniform(Rng& rng) {
    const double x = rng.uniform();
    const double y = rng.uniform();
    return {x, y};
}

Point draw_mixture(Rng& rng) {
    for (;;) {
        const auto component = std::min<std::size_t>(
            static_cast<std::size_t>(rng.uniform() * kMixture.size()), kMixture.size() - 1);
        const Point& mean = kMixture[component].mean;
        const double x = mean.x + kMixtureStd * rng.normal();
        const double y = mean.y + kMixtureStd * rng.normal();
        if (x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0) return {x, y};
    }
}

bool in_unit_square(const Point& p) {
    return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0;
}

}  // namespace

SpatialSample::SpatialSample(std::vector<Point> positions, SamplingScheme scheme, std::uint64_t seed)
    : positions_(std::move(positions)), scheme_(scheme), seed_(seed) {
    if (positions_.size() < 2) throw std::invalid_argument("SpatialSample: need at least 2 positions");
    std::set<std::pair<double, double>> seen;
    for (const auto& p : positions_) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("SpatialSample: non-finite coordinate");
        if (!seen.emplace(p.x, p.y).second)
            throw std::invalid_argument("SpatialSample: duplicate position");
    }
}

SpatialSample sample_positions(std::size_t n, SamplingScheme scheme, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("sample_positions: n must be at least 2");
    Rng rng(derive_seed(seed, Stream::positions));
    std::vector<Point> points;
    points.reserve(n);
    std::set<std::pair<double, double>> seen;
    while (points.size() < n) {
        const Point p = scheme == SamplingScheme::uniform ? draw_uniform(rng) : draw_mixture(rng);
        if (!in_unit_square(p)) continue;
        if (!seen.emplace(p.x, p.y).second) continue;  // exact collision: resample
        points.push_back(p);
    }
    return SpatialSample(std::move(points), scheme, seed);
}

VariogramModel VariogramModel::exponential(double sill, double range, double nugget) {
    VariogramModel m{ModelKind::exponential, sill, range, nugget};
    m.validate();
    return m;
}

VariogramModel VariogramModel::pure_nugget(double sill) {
    VariogramModel m{ModelKind::nugget, sill, 0.0, 0.0};
    m.validate();
    return m;
}

VariogramModel VariogramModel::linear(double slope_sill, double range, double nugget) {
    VariogramModel m{ModelKind::linear, slope_sill, range, nugget};
    m.validate();
    return m;
}

void VariogramModel::validate() const {
    if (!(sill >= 0.0) || !std::isfinite(sill)) throw std::invalid_argument("variogram model: sill must be finite and >= 0");
    if (!(nugget >= 0.0) || !std::isfinite(nugget))
        throw std::invalid_argument("variogram model: nugget must be finite and >= 0");
    if (kind != ModelKind::nugget && !(range > 0.0))
        throw std::invalid_argument("variogram model: range must be > 0");
}

double VariogramModel::semivariogram(double h) const {
    if (h < 0.0) h = -h;
    if (h == 0.0) return 0.0;
    switch (kind) {
        case ModelKind::exponential:
            return nugget + sill * (1.0 - std::exp(-h / range));
        case ModelKind::nugget:
            return sill + nugget;
        case ModelKind::linear:
            return nugget + sill * h / range;
    }
    return 0.0;
}

double VariogramModel::covariance(double h) const {
    if (!has_covariance())
        throw UnsupportedModelError("variogram model without a stationary covariance (linear)");
    return variance() - semivariogram(h);
}

Eigen::MatrixXd covariance_from_model(const SpatialSample& sample, const VariogramModel& model, double jitter) {
    model.validate();
    if (!model.has_covariance())
        throw UnsupportedModelError("covariance_from_model: linear variogram has no stationary covariance");
    if (!(jitter >= 0.0)) throw std::invalid_argument("covariance_from_model: jitter must be >= 0");
    const auto n = static_cast<Eigen::Index>(sample.size());
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        cov(j, j) = model.covariance(0.0) + jitter;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double c = model.covariance(sample.distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
            cov(i, j) = c;
            cov(j, i) = c;
        }
    }
    return cov;
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("cholesky_lower: matrix is not square");
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    // Column-oriented (left-looking) factorization; l is column-major.
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = a(j, j);
        if (j > 0) pivot -= l.row(j).head(j).squaredNorm();
        if (!(pivot > 0.0) || !std::isfinite(pivot)) {
            throw FactorizationError("cholesky: leading minor " + std::to_string(j + 1) + " is not positive definite",
                                     static_cast<std::size_t>(j + 1));
        }
        const double diag = std::sqrt(pivot);
        l(j, j) = diag;
        if (j + 1 < n) {
            const Eigen::Index rest = n - j - 1;
            auto col = l.col(j).tail(rest);
            col = a.col(j).tail(rest);
            if (j > 0) col.noalias() -= l.bottomLeftCorner(rest, j) * l.row(j).head(j).transpose();
            col /= diag;
        }
    }
    return l;
}

Eigen::MatrixXd sample_gaussian(const Eigen::MatrixXd& covariance, std::size_t r, std::uint64_t seed,
                                unsigned threads) {
    const Eigen::MatrixXd factor = cholesky_lower(covariance);
    const Eigen::Index n = factor.rows();
    Eigen::MatrixXd signals(n, static_cast<Eigen::Index>(r));
    parallel_for(r, threads, [&](std::size_t k) {
        Rng rng(derive_seed(seed, Stream::field, k));
        Eigen::VectorXd z(n);
        for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
        signals.col(static_cast<Eigen::Index>(k)).noalias() = factor.triangularView<Eigen::Lower>() * z;
    });
    return signals;
}

FieldEnsemble generate_ensemble(const SpatialSample& sample, const VariogramModel& model, std::size_t r,
                                std::uint64_t seed, double jitter, unsigned threads) {
    if (r < 1) throw std::invalid_argument("generate_ensemble: need at least one realization");
    FieldEnsemble ensemble;
    ensemble.seed = seed;
    ensemble.model = model;
    ensemble.covariance_jitter = jitter;
    Eigen::MatrixXd cov = covariance_from_model(sample, model, jitter);
    if (model.variance() == 0.0) {
        // Zero-variance field: the jitter only conditions positive-variance models.
        ensemble.signals = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sample.size()), static_cast<Eigen::Index>(r));
        return ensemble;
    }
    ensemble.signals = sample_gaussian(cov, r, seed, threads);
    return ensemble;
}

}  // namespace graphvario
