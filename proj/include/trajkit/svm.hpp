// svm.hpp
//
// Binary soft-margin SVM trained with SMO (second-order working-set
// selection), the building block of the DAG classifier.
#ifndef TRAJKIT_SVM_HPP_
#define TRAJKIT_SVM_HPP_

#include "trajkit/core.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <utility>

namespace trajkit {

struct Kernel {
    enum class Type { Linear, Rbf };
    Type type = Type::Rbf;
    double gamma = 1.0;

    static Kernel linear() { return {Type::Linear, 0.0}; }
    static Kernel rbf(double gamma) { return {Type::Rbf, gamma}; }

    template <typename DerivedA, typename DerivedB>
    double operator()(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) const {
        if (type == Type::Linear) return a.dot(b);
        return std::exp(-gamma * (a - b).squaredNorm());
    }
};

struct BinarySvm {
    MatrixX support_vectors;  // one per row
    VectorX coef;             // alpha_i * y_i
    double bias = 0.0;
    Kernel kernel;
    /// +1 votes for `positive`, -1 for `negative`.
    FlightState positive = FlightState::Climb;
    FlightState negative = FlightState::Level;

    Eigen::Index dim() const { return support_vectors.cols(); }
    double decision(const Eigen::Ref<const VectorX>& x) const;
};

struct SvmParams {
    double C = 10.0;
    Kernel kernel = Kernel::rbf(1.0);
    double tol = 1e-3;
    /// Iteration budget is max_passes * n working-set updates.
    long max_passes = 1000;
};

struct SvmTrainResult {
    BinarySvm model;
    VectorX alpha;  // full dual vector, one per training row
    long iterations = 0;
};

/// Rows of `x` are samples; `y` holds +1 / -1.
SvmTrainResult svm_train(const MatrixX& x, const VectorX& y, const SvmParams& params);

/// Largest KKT violation of a trained dual solution on its training data:
/// for alpha = 0 require y f >= 1, for 0 < alpha < C require y f = 1, for
/// alpha = C require y f <= 1.
double kkt_violation(const SvmTrainResult& result, const MatrixX& x, const VectorX& y, double C);

} // namespace trajkit

#endif // TRAJKIT_SVM_HPP_
