#include "trajkit/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace trajkit {

namespace {

double max_off_diagonal(const MatrixX& a) {
    double m = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (i != j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

} // namespace

SymmetricEigen jacobi_eigen(const MatrixX& input, double rel_tol, int max_sweeps) {
    if (input.rows() != input.cols()) throw Error(ErrorKind::DimensionError, "matrix must be square");
    if (!input.allFinite()) throw Error(ErrorKind::InvalidData, "non-finite matrix entry");
    const Eigen::Index n = input.rows();

    MatrixX a = 0.5 * (input + input.transpose());
    MatrixX v = MatrixX::Identity(n, n);
    const double threshold = rel_tol * a.norm();

    int sweep = 0;
    for (; sweep < max_sweeps && max_off_diagonal(a) >= threshold && threshold > 0.0; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Symmetric Schur 2x2: choose (c, s) so that the rotated a(p,q) vanishes.
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (threshold > 0.0 && max_off_diagonal(a) >= threshold)
        throw Error(ErrorKind::ConvergenceFailure, "Jacobi sweeps did not converge");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

    SymmetricEigen out;
    out.sweeps = sweep;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(j)];
        out.values(j) = a(src, src);
        VectorX col = v.col(src);
        Eigen::Index arg = 0;
        col.cwiseAbs().maxCoeff(&arg);
        if (col(arg) < 0.0) col = -col;
        out.vectors.col(j) = col;
    }
    return out;
}

MatrixX covariance(const MatrixX& data, const VectorX& mean, const VectorX& scale) {
    MatrixX centred = data.rowwise() - mean.transpose();
    if (scale.size() == centred.cols()) centred = centred.array().rowwise() / scale.transpose().array();
    return (centred.transpose() * centred) / static_cast<double>(data.rows() - 1);
}

VectorX contributions(const VectorX& eigenvalues) {
    const double total = eigenvalues.sum();
    if (!(total > 0.0)) return VectorX::Zero(eigenvalues.size());
    return eigenvalues / total;
}

PcaModel pca_fit(const MatrixX& data, const PcaOptions& options) {
    if (data.rows() < 2) throw Error(ErrorKind::InsufficientData, "PCA needs at least 2 samples");
    if (data.cols() < 1) throw Error(ErrorKind::InsufficientData, "PCA needs at least 1 column");
    if (!data.allFinite()) throw Error(ErrorKind::InvalidData, "non-finite entry in PCA input");
    if (!(options.target_ratio > 0.0 && options.target_ratio <= 1.0))
        throw Error(ErrorKind::InvalidArgument, "target ratio must lie in (0, 1]");

    PcaModel model;
    model.mean = data.colwise().mean().transpose();
    if (options.standardize) {
        const MatrixX centred = data.rowwise() - model.mean.transpose();
        model.scale = (centred.colwise().squaredNorm() / static_cast<double>(data.rows() - 1)).cwiseSqrt().transpose();
        for (Eigen::Index j = 0; j < model.scale.size(); ++j)
            if (!(model.scale(j) > 1e-12)) model.scale(j) = 1.0;
    }
    const MatrixX cov = covariance(data, model.mean, model.scale);
    const auto eig = jacobi_eigen(cov);
    model.all_eigenvalues = eig.values;

    const VectorX contrib = contributions(eig.values);
    Eigen::Index k = eig.values.size();
    double cumulative = 0.0;
    if (contrib.sum() > 0.0) {
        for (Eigen::Index i = 0; i < contrib.size(); ++i) {
            cumulative += contrib(i);
            // Rounding can leave the full sum a few ulps below 1.
            if (cumulative >= options.target_ratio - 1e-12) {
                k = i + 1;
                break;
            }
        }
        model.retained_ratio = std::min(1.0, cumulative);
    } else {
        k = 1;
        model.retained_ratio = 1.0;
    }
    model.components = eig.vectors.leftCols(k).transpose();
    model.eigenvalues = eig.values.head(k);
    return model;
}

VectorX pca_project(const PcaModel& model, const Eigen::Ref<const VectorX>& x) {
    if (x.size() != model.input_dim())
        throw Error(ErrorKind::DimensionError, "projection input has wrong length");
    VectorX centred = x - model.mean;
    if (model.scale.size() == centred.size()) centred = centred.cwiseQuotient(model.scale);
    return model.components * centred;
}

MatrixX pca_project_rows(const PcaModel& model, const MatrixX& data) {
    if (data.cols() != model.input_dim())
        throw Error(ErrorKind::DimensionError, "projection input has wrong width");
    MatrixX centred = data.rowwise() - model.mean.transpose();
    if (model.scale.size() == centred.cols()) centred = centred.array().rowwise() / model.scale.transpose().array();
    return centred * model.components.transpose();
}

} // namespace trajkit
