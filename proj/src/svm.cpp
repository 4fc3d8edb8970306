#include "trajkit/svm.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace trajkit {

double BinarySvm::decision(const Eigen::Ref<const VectorX>& x) const {
    if (x.size() != dim()) throw Error(ErrorKind::DimensionError, "SVM input has wrong length");
    double f = bias;
    for (Eigen::Index i = 0; i < support_vectors.rows(); ++i)
        f += coef(i) * kernel(support_vectors.row(i).transpose(), x);
    return f;
}

namespace {

constexpr double kTau = 1e-12;

} // namespace

SvmTrainResult svm_train(const MatrixX& x, const VectorX& y, const SvmParams& params) {
    const Eigen::Index n = x.rows();
    if (n != y.size()) throw Error(ErrorKind::DimensionError, "label count does not match samples");
    if (!(params.C > 0.0)) throw Error(ErrorKind::InvalidArgument, "C must be > 0");
    if (!x.allFinite()) throw Error(ErrorKind::InvalidData, "non-finite training input");
    bool has_pos = false, has_neg = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y(i) == 1.0) has_pos = true;
        else if (y(i) == -1.0) has_neg = true;
        else throw Error(ErrorKind::InvalidData, "labels must be +1 or -1");
    }
    if (!has_pos || !has_neg) throw Error(ErrorKind::DegenerateLabels, "both classes must be present");

    const double C = params.C;
    MatrixX Q(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j)
            Q(i, j) = Q(j, i) = y(i) * y(j) * params.kernel(x.row(i).transpose(), x.row(j).transpose());

    VectorX alpha = VectorX::Zero(n);
    VectorX grad = VectorX::Constant(n, -1.0);  // gradient of 1/2 a'Qa - e'a
    auto at_upper = [&](Eigen::Index t) { return alpha(t) >= C; };
    auto at_lower = [&](Eigen::Index t) { return alpha(t) <= 0.0; };

    const long budget = std::max<long>(params.max_passes * static_cast<long>(n), 1000);
    long iter = 0;
    for (;; ++iter) {
        if (iter >= budget)
            throw Error(ErrorKind::ConvergenceFailure, "SMO exceeded its iteration budget");

        // Maximal violating index i, then j by second-order gain.
        double gmax = -std::numeric_limits<double>::infinity();
        Eigen::Index i = -1;
        for (Eigen::Index t = 0; t < n; ++t) {
            if (y(t) > 0) {
                if (!at_upper(t) && -grad(t) >= gmax) { gmax = -grad(t); i = t; }
            } else {
                if (!at_lower(t) && grad(t) >= gmax) { gmax = grad(t); i = t; }
            }
        }
        double gmax2 = -std::numeric_limits<double>::infinity();
        Eigen::Index j = -1;
        double best_obj = std::numeric_limits<double>::infinity();
        for (Eigen::Index t = 0; t < n; ++t) {
            if (y(t) > 0) {
                if (at_lower(t)) continue;
                const double diff = gmax + grad(t);
                gmax2 = std::max(gmax2, grad(t));
                if (i >= 0 && diff > 0) {
                    double quad = Q(i, i) + Q(t, t) - 2.0 * y(i) * y(t) * Q(i, t);
                    if (quad <= 0) quad = kTau;
                    const double obj = -(diff * diff) / quad;
                    if (obj <= best_obj) { best_obj = obj; j = t; }
                }
            } else {
                if (at_upper(t)) continue;
                const double diff = gmax - grad(t);
                gmax2 = std::max(gmax2, -grad(t));
                if (i >= 0 && diff > 0) {
                    double quad = Q(i, i) + Q(t, t) - 2.0 * y(i) * y(t) * Q(i, t);
                    if (quad <= 0) quad = kTau;
                    const double obj = -(diff * diff) / quad;
                    if (obj <= best_obj) { best_obj = obj; j = t; }
                }
            }
        }
        if (i < 0 || j < 0 || gmax + gmax2 < params.tol) break;

        const double old_ai = alpha(i), old_aj = alpha(j);
        if (y(i) != y(j)) {
            double quad = Q(i, i) + Q(j, j) + 2.0 * Q(i, j);
            if (quad <= 0) quad = kTau;
            const double delta = (-grad(i) - grad(j)) / quad;
            const double diff = alpha(i) - alpha(j);
            alpha(i) += delta;
            alpha(j) += delta;
            if (diff > 0) {
                if (alpha(j) < 0) { alpha(j) = 0; alpha(i) = diff; }
            } else {
                if (alpha(i) < 0) { alpha(i) = 0; alpha(j) = -diff; }
            }
            if (diff > 0) {
                if (alpha(i) > C) { alpha(i) = C; alpha(j) = C - diff; }
            } else {
                if (alpha(j) > C) { alpha(j) = C; alpha(i) = C + diff; }
            }
        } else {
            double quad = Q(i, i) + Q(j, j) - 2.0 * Q(i, j);
            if (quad <= 0) quad = kTau;
            const double delta = (grad(i) - grad(j)) / quad;
            const double sum = alpha(i) + alpha(j);
            alpha(i) -= delta;
            alpha(j) += delta;
            if (sum > C) {
                if (alpha(i) > C) { alpha(i) = C; alpha(j) = sum - C; }
            } else {
                if (alpha(j) < 0) { alpha(j) = 0; alpha(i) = sum; }
            }
            if (sum > C) {
                if (alpha(j) > C) { alpha(j) = C; alpha(i) = sum - C; }
            } else {
                if (alpha(i) < 0) { alpha(i) = 0; alpha(j) = sum; }
            }
        }
        const double dai = alpha(i) - old_ai, daj = alpha(j) - old_aj;
        grad += Q.col(i) * dai + Q.col(j) * daj;
    }

    // Offset: average over free vectors, else midpoint of the feasible range.
    double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
    long n_free = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
        const double yg = y(t) * grad(t);
        if (at_upper(t)) {
            if (y(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (at_lower(t)) {
            if (y(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);

    SvmTrainResult result;
    result.alpha = alpha;
    result.iterations = iter;
    std::vector<Eigen::Index> sv;
    for (Eigen::Index t = 0; t < n; ++t)
        if (alpha(t) > 0.0) sv.push_back(t);
    result.model.kernel = params.kernel;
    result.model.bias = -rho;
    result.model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
    result.model.coef.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t k = 0; k < sv.size(); ++k) {
        result.model.support_vectors.row(static_cast<Eigen::Index>(k)) = x.row(sv[k]);
        result.model.coef(static_cast<Eigen::Index>(k)) = alpha(sv[k]) * y(sv[k]);
    }
    return result;
}

double kkt_violation(const SvmTrainResult& result, const MatrixX& x, const VectorX& y, double C) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double margin = y(i) * result.model.decision(x.row(i).transpose());
        const double a = result.alpha(i);
        double v = 0.0;
        if (a <= 0.0) v = std::max(0.0, 1.0 - margin);
        else if (a >= C) v = std::max(0.0, margin - 1.0);
        else v = std::abs(margin - 1.0);
        worst = std::max(worst, v);
    }
    return worst;
}

} // namespace trajkit
