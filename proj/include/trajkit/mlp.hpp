// mlp.hpp
//
// Single-hidden-layer perceptron (ReLU hidden, identity output) trained with
// full-batch gradient descent on mean squared error. The trajectory variant
// maps (t, x, y, z, vx, vy, vz) at one tick to (x, y, z, speed) at the next.
#ifndef TRAJKIT_MLP_HPP_
#define TRAJKIT_MLP_HPP_

#include "trajkit/adams.hpp"
#include "trajkit/core.hpp"
#include "trajkit/fusion.hpp"
#include "trajkit/state_models.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace trajkit {

inline constexpr int kMlpInputs = 7;
inline constexpr int kMlpHidden = 8;
inline constexpr int kMlpOutputs = 4;

struct Normalization {
    VectorX mean;
    VectorX scale;

    VectorX apply(const Eigen::Ref<const VectorX>& x) const { return (x - mean).cwiseQuotient(scale); }
    VectorX invert(const Eigen::Ref<const VectorX>& z) const { return z.cwiseProduct(scale) + mean; }

    static Normalization identity(Eigen::Index n) { return {VectorX::Zero(n), VectorX::Ones(n)}; }
    /// Column statistics of a row-sample matrix; near-constant columns get scale 1.
    static Normalization fit(const MatrixX& rows);
};

struct MlpModel {
    MatrixX w1;  // hidden x inputs
    VectorX b1;
    MatrixX w2;  // outputs x hidden
    VectorX b2;
    Normalization input_norm;
    Normalization output_norm;
    std::uint64_t seed = 0;
    double final_loss = 0.0;
    /// Tick spacing of the transitions the model was trained on.
    double dt = 0.1;

    Eigen::Index inputs() const { return w1.cols(); }
    Eigen::Index hidden() const { return w1.rows(); }
    Eigen::Index outputs() const { return w2.rows(); }
};

/// Columns are samples, already normalised.
struct MlpBatch {
    MatrixX x;
    MatrixX y;
};

struct MlpGradients {
    MatrixX w1;
    VectorX b1;
    MatrixX w2;
    VectorX b2;
};

/// Mean over samples and outputs of the squared error, in normalised units.
double mlp_loss(const MlpModel& model, const MlpBatch& batch);
MlpGradients mlp_gradients(const MlpModel& model, const MlpBatch& batch);

/// Raw forward pass in normalised units (no normalisation applied).
VectorX mlp_forward(const MlpModel& model, const Eigen::Ref<const VectorX>& normalized_input);

struct MlpTrainOptions {
    double lr = 0.001;
    int epochs = 5000;
    std::uint64_t seed = 42;
    int hidden = kMlpHidden;
    /// Start the output layer at zero instead of the seeded uniform init.
    bool zero_output_layer = false;
    bool record_trace = false;
    bool normalize = true;
};

struct MlpTrainResult {
    MlpModel model;
    std::vector<double> loss_trace;  // loss before each epoch's update, if recorded
};

/// Rows of `inputs` and `targets` are paired samples.
MlpTrainResult mlp_train(const MatrixX& inputs, const MatrixX& targets, const MlpTrainOptions& options);

/// Seeded uniform weights in [-s, s], s = sqrt(6 / (fan_in + fan_out)); hidden
/// biases start at 1, output biases at 0.
MlpModel mlp_init(Eigen::Index inputs, Eigen::Index hidden, Eigen::Index outputs, std::uint64_t seed);

VectorX mlp_predict(const MlpModel& model, const Eigen::Ref<const VectorX>& input);

// ---------------------------------------------------------------------------
// Trajectory use

struct MotionState {
    double t = 0.0;
    Vec3 pos = Vec3::Zero();
    Vec3 vel = Vec3::Zero();
};

/// Input row for a motion state.
Eigen::Matrix<double, kMlpInputs, 1> mlp_input(const MotionState& s);

/// Consecutive-tick transitions of a frame sequence: inputs (n-1) x 7, targets
/// (n-1) x 4.
struct TransitionSet {
    MatrixX inputs;
    MatrixX targets;
};
TransitionSet mlp_transitions(std::span<const FlightFrame> frames);
TransitionSet concat(std::span<const TransitionSet> parts);

/// Feeds each prediction back as the next input. The next velocity points
/// along the predicted displacement with the predicted speed as magnitude.
TrajectoryPrediction rollout(const MlpModel& model, const MotionState& start, int steps);

using MlpModelSet = StateModels<MlpModel>;

} // namespace trajkit

#endif // TRAJKIT_MLP_HPP_
