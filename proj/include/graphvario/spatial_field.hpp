#pragma once

#include <cstddef>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace graphvario {

enum class SamplingScheme { uniform, nonuniform };

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

/// Euclidean distance. Every module measures distances through this function
/// so that bin membership agrees across estimators.
inline double distance(const Point& a, const Point& b) noexcept {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

/// N distinct sensor locations in the unit square.
class SpatialSample {
public:
    SpatialSample(std::vector<Point> positions, SamplingScheme scheme, std::uint64_t seed);

    std::size_t size() const noexcept { return positions_.size(); }
    const std::vector<Point>& positions() const noexcept { return positions_; }
    const Point& operator[](std::size_t i) const { return positions_[i]; }
    SamplingScheme scheme() const noexcept { return scheme_; }
    std::uint64_t seed() const noexcept { return seed_; }
    double distance(std::size_t i, std::size_t j) const {
        return graphvario::distance(positions_[i], positions_[j]);
    }

private:
    std::vector<Point> positions_;
    SamplingScheme scheme_;
    std::uint64_t seed_;
};

/// Draws n points in [0,1]^2. The nonuniform scheme is a truncated
/// three-component Gaussian mixture.
SpatialSample sample_positions(std::size_t n, SamplingScheme scheme, std::uint64_t seed);

enum class ModelKind { exponential, nugget, linear };

/// Isotropic semivariogram model. `nugget` adds a discontinuity at the origin
/// to every kind; the pure nugget kind has no spatial structure at all
/// (gamma(h) = sill + nugget for every h > 0).
struct VariogramModel {
    ModelKind kind = ModelKind::exponential;
    double sill = 1.0;
    double range = 0.2;
    double nugget = 0.0;

    static VariogramModel exponential(double sill, double range, double nugget = 0.0);
    static VariogramModel pure_nugget(double sill);
    static VariogramModel linear(double slope_sill, double range, double nugget = 0.0);

    /// gamma(h), semivariogram units.
    double semivariogram(double h) const;
    /// C(h) = C(0) - gamma(h); only for models with a stationary covariance.
    double covariance(double h) const;
    /// C(0) = sill + nugget.
    double variance() const noexcept { return sill + nugget; }
    bool has_covariance() const noexcept { return kind != ModelKind::linear; }

    /// Throws std::invalid_argument on negative or non-finite parameters.
    void validate() const;

    friend bool operator==(const VariogramModel&, const VariogramModel&) = default;
};

class UnsupportedModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class FactorizationError : public std::runtime_error {
public:
    FactorizationError(const std::string& what, std::size_t leading_minor)
        : std::runtime_error(what), leading_minor_(leading_minor) {}
    /// 1-based order of the first leading minor that is not positive definite.
    std::size_t leading_minor() const noexcept { return leading_minor_; }

private:
    std::size_t leading_minor_;
};

inline constexpr double kDefaultCovarianceJitter = 1e-10;

/// Sigma_ij = C(|s_i - s_j|) + jitter * [i == j].
Eigen::MatrixXd covariance_from_model(const SpatialSample& sample, const VariogramModel& model,
                                      double jitter = kDefaultCovarianceJitter);

/// Lower Cholesky factor; throws FactorizationError naming the failing minor.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& covariance);

/// R zero-mean Gaussian realizations stored column-wise (N x R).
struct FieldEnsemble {
    Eigen::MatrixXd signals;
    std::uint64_t seed = 0;
    VariogramModel model;
    double covariance_jitter = kDefaultCovarianceJitter;

    std::size_t size() const noexcept { return static_cast<std::size_t>(signals.cols()); }
    std::size_t vertices() const noexcept { return static_cast<std::size_t>(signals.rows()); }
    Eigen::VectorXd realization(std::size_t r) const { return signals.col(static_cast<Eigen::Index>(r)); }
};

/// Realization r is factor * z_r with z_r drawn from its own counter-derived
/// substream, so results do not depend on `threads` or on R.
FieldEnsemble generate_ensemble(const SpatialSample& sample, const VariogramModel& model, std::size_t r,
                                std::uint64_t seed, double jitter = kDefaultCovarianceJitter,
                                unsigned threads = 1);

/// Same construction from an explicit covariance matrix.
Eigen::MatrixXd sample_gaussian(const Eigen::MatrixXd& covariance, std::size_t r, std::uint64_t seed,
                                unsigned threads = 1);

}  // namespace graphvario
