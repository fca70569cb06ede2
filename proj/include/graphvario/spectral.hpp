#pragma once

#include <Eigen/Core>

#include "graphvario/graph.hpp"

namespace graphvario {

/// Graph Fourier basis of a Laplacian: ascending eigenvalues, orthonormal
/// eigenvectors (columns), each signed so its first nonzero entry is positive.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    /// eigenvalues / max eigenvalue (all zero for an edgeless graph).
    Eigen::VectorXd normalized_frequencies;

    Eigen::Index size() const noexcept { return eigenvalues.size(); }
    Eigen::VectorXd forward(const Eigen::Ref<const Eigen::VectorXd>& signal) const;
};

/// Throws std::invalid_argument for a non-square or non-symmetric input.
SpectralDecomposition decompose(const Eigen::MatrixXd& laplacian);
SpectralDecomposition decompose(const LaplacianView& view);

/// Per-frequency statistics of |x_hat_i|^2 across realizations, linear scale.
struct PsdStatistics {
    Eigen::VectorXd frequencies;
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;
};

/// signals is N x R, one realization per column.
PsdStatistics empirical_psd(const Eigen::MatrixXd& signals, const SpectralDecomposition& decomposition);

/// 10 log10(value); nonpositive values map to -inf.
Eigen::VectorXd to_decibels(const Eigen::VectorXd& linear);

}  // namespace graphvario
