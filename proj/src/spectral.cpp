#include "graphvario/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace graphvario {

namespace {

constexpr double kSymmetryTolerance = 1e-12;

}  // namespace

Eigen::VectorXd SpectralDecomposition::forward(const Eigen::Ref<const Eigen::VectorXd>& signal) const {
    if (signal.size() != eigenvectors.rows()) throw std::invalid_argument("GFT: dimension mismatch");
    return eigenvectors.transpose() * signal;
}

SpectralDecomposition decompose(const Eigen::MatrixXd& l) {
    if (l.rows() != l.cols()) throw std::invalid_argument("decompose: matrix is not square");
    const double scale = std::max(1.0, l.cwiseAbs().maxCoeff());
    if ((l - l.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale)
        throw std::invalid_argument("decompose: matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l);
    if (solver.info() != Eigen::Success) throw std::runtime_error("decompose: eigensolver did not converge");

    SpectralDecomposition out;
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
        auto v = out.eigenvectors.col(c);
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (v(i) != 0.0) {
                if (v(i) < 0.0) v = -v;
                break;
            }
        }
    }
    const double top = out.eigenvalues.size() > 0 ? out.eigenvalues.maxCoeff() : 0.0;
    if (top > 0.0) {
        out.normalized_frequencies = (out.eigenvalues / top).cwiseMax(0.0);
    } else {
        out.normalized_frequencies = Eigen::VectorXd::Zero(out.eigenvalues.size());
    }
    return out;
}

SpectralDecomposition decompose(const LaplacianView& view) {
    return decompose(Eigen::MatrixXd(view.laplacian));
}

PsdStatistics empirical_psd(const Eigen::MatrixXd& signals, const SpectralDecomposition& basis) {
    if (signals.rows() != basis.eigenvectors.rows())
        throw std::invalid_argument("empirical_psd: ensemble length does not match the graph");
    if (signals.cols() < 1) throw std::invalid_argument("empirical_psd: empty ensemble");
    const Eigen::MatrixXd power = (basis.eigenvectors.transpose() * signals).array().square().matrix();
    const auto r = static_cast<double>(signals.cols());

    PsdStatistics out;
    out.frequencies = basis.normalized_frequencies;
    out.mean = power.rowwise().sum() / r;
    if (signals.cols() > 1) {
        out.stddev = ((power.colwise() - out.mean).array().square().rowwise().sum() / (r - 1.0)).sqrt().matrix();
    } else {
        out.stddev = Eigen::VectorXd::Zero(power.rows());
    }
    return out;
}

Eigen::VectorXd to_decibels(const Eigen::VectorXd& linear) {
    return linear.unaryExpr([](double v) {
        return v > 0.0 ? 10.0 * std::log10(v) : -std::numeric_limits<double>::infinity();
    });
}

}  // namespace graphvario
