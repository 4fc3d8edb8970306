// dagsvm.hpp
//
// Five-class recognition with ten pairwise SVMs walked as a decision DAG:
// the root compares the first and last states of the active list, and each
// node removes the losing state until one remains.
#ifndef TRAJKIT_DAGSVM_HPP_
#define TRAJKIT_DAGSVM_HPP_

#include "trajkit/core.hpp"
#include "trajkit/svm.hpp"

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace trajkit {

inline constexpr int kNumPairs = kNumStates * (kNumStates - 1) / 2;

/// Index of the unordered pair {a, b} in a 10-slot table.
int pair_index(FlightState a, FlightState b);

struct DagSvmModel {
    std::array<FlightState, kNumStates> order = kAllStates;
    /// classifiers[pair_index(a, b)] separates a from b (lower index is +1).
    std::array<BinarySvm, kNumPairs> classifiers;
    /// Identifies the projection the inputs are expected to come from.
    std::string pca_ref;

    Eigen::Index dim() const { return classifiers[0].dim(); }
    const BinarySvm& classifier(FlightState a, FlightState b) const { return classifiers[static_cast<std::size_t>(pair_index(a, b))]; }
};

struct DagStep {
    FlightState first;
    FlightState second;
    FlightState winner;
};

struct DagResult {
    FlightState state;
    std::vector<DagStep> path;
};

/// Decision value for the pair (a, b): positive means a wins.
using PairDecision = std::function<double(FlightState a, FlightState b)>;

/// Walks the DAG with an arbitrary pairwise oracle. Exactly N-1 evaluations.
DagResult dag_walk(const std::array<FlightState, kNumStates>& order, const PairDecision& decide);

DagResult dag_classify(const DagSvmModel& model, const Eigen::Ref<const VectorX>& x);

/// One-vs-one majority vote over all ten classifiers; ties go to the state
/// that appears first in `order`.
FlightState vote_classify(const DagSvmModel& model, const Eigen::Ref<const VectorX>& x);

struct DagSvmParams {
    double C = 10.0;
    /// Non-positive gamma selects 1 / dimension.
    double gamma = 0.0;
    bool linear = false;
    double tol = 1e-3;
};

DagSvmModel dagsvm_train(const MatrixX& x, std::span<const FlightState> labels, const DagSvmParams& params);

// ---------------------------------------------------------------------------
// Evaluation

/// 1 / (alpha / precision + (1 - alpha) / recall); alpha weights precision.
double weighted_f1(double precision, double recall, double alpha);

inline constexpr double kDefaultF1Alpha = 0.7;

struct ConfusionMatrix {
    Eigen::Matrix<long, kNumStates, kNumStates> counts = Eigen::Matrix<long, kNumStates, kNumStates>::Zero();  // rows true
};

struct ClassificationReport {
    ConfusionMatrix confusion;
    std::array<double, kNumStates> precision{};
    std::array<double, kNumStates> recall{};
    std::array<double, kNumStates> f1{};
    double accuracy = 0.0;
    std::size_t total = 0;
};

/// Metrics from paired truth/prediction labels. A class whose precision or
/// recall is undefined (no predictions, no members) reports 0 for it and
/// for its F1.
ClassificationReport score_predictions(std::span<const FlightState> truth, std::span<const FlightState> predicted,
                                       double alpha = kDefaultF1Alpha);

ClassificationReport evaluate(const DagSvmModel& model, const MatrixX& x, std::span<const FlightState> labels,
                              double alpha = kDefaultF1Alpha);

} // namespace trajkit

#endif // TRAJKIT_DAGSVM_HPP_
