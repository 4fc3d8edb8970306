// pca.hpp
#ifndef TRAJKIT_PCA_HPP_
#define TRAJKIT_PCA_HPP_

#include "trajkit/core.hpp"

#include <Eigen/Dense>

namespace trajkit {

struct SymmetricEigen {
    VectorX values;   // descending
    MatrixX vectors;  // column j pairs with values(j)
    int sweeps = 0;
};

/// Cyclic Jacobi rotations until every off-diagonal entry is below
/// `rel_tol * ||A||_F`. Eigenvectors are sign-normalised so that each one's
/// largest-magnitude entry is nonnegative.
SymmetricEigen jacobi_eigen(const MatrixX& a, double rel_tol = 1e-12, int max_sweeps = 100);

struct PcaModel {
    VectorX mean;
    /// Per-column divisor applied after centring; empty means no scaling.
    VectorX scale;
    MatrixX components;  // k x n, orthonormal rows
    VectorX eigenvalues; // k retained, descending
    VectorX all_eigenvalues;
    double retained_ratio = 0.0;

    Eigen::Index input_dim() const { return mean.size(); }
    Eigen::Index output_dim() const { return components.rows(); }
};

struct PcaOptions {
    double target_ratio = 0.85;
    /// Divide each centred column by its sample standard deviation before the
    /// covariance step (constant columns are left unscaled).
    bool standardize = false;
};

/// Rows of `data` are samples. Keeps the smallest k whose cumulative
/// contribution reaches the target ratio.
PcaModel pca_fit(const MatrixX& data, const PcaOptions& options = {});

/// Centred covariance X^T X / (m - 1) of the (optionally scaled) data.
MatrixX covariance(const MatrixX& data, const VectorX& mean, const VectorX& scale);

/// Contribution of each eigenvalue to the total.
VectorX contributions(const VectorX& eigenvalues);

VectorX pca_project(const PcaModel& model, const Eigen::Ref<const VectorX>& x);

/// Row-wise projection of a sample matrix.
MatrixX pca_project_rows(const PcaModel& model, const MatrixX& data);

} // namespace trajkit

#endif // TRAJKIT_PCA_HPP_
