#include "trajkit/mlp.hpp"

#include <cmath>
#include <random>

namespace trajkit {

Normalization Normalization::fit(const MatrixX& rows) {
    Normalization n;
    n.mean = rows.colwise().mean().transpose();
    n.scale = ((rows.rowwise() - n.mean.transpose()).colwise().squaredNorm() / static_cast<double>(rows.rows()))
                  .cwiseSqrt()
                  .transpose();
    for (Eigen::Index j = 0; j < n.scale.size(); ++j)
        if (!(n.scale(j) > 1e-12)) n.scale(j) = 1.0;
    return n;
}

// About one standard deviation of the initial pre-activation on standardized
// inputs, so nearly every rectifier starts in its active region.
constexpr double kHiddenBiasInit = 1.0;

MlpModel mlp_init(Eigen::Index inputs, Eigen::Index hidden, Eigen::Index outputs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](Eigen::Index rows, Eigen::Index cols) {
        const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
        std::uniform_real_distribution<double> dist(-s, s);
        MatrixX w(rows, cols);
        // Fill row-major so the draw order matches the persisted layout.
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = dist(rng);
        return w;
    };
    MlpModel m;
    m.w1 = uniform(hidden, inputs);
    m.b1 = VectorX::Constant(hidden, kHiddenBiasInit);
    m.w2 = uniform(outputs, hidden);
    m.b2 = VectorX::Zero(outputs);
    m.input_norm = Normalization::identity(inputs);
    m.output_norm = Normalization::identity(outputs);
    m.seed = seed;
    return m;
}

namespace {

struct Forward {
    MatrixX pre;     // hidden pre-activation
    MatrixX hidden;  // after ReLU
    MatrixX out;
};

Forward forward(const MlpModel& m, const MatrixX& x) {
    Forward f;
    f.pre = (m.w1 * x).colwise() + m.b1;
    f.hidden = f.pre.cwiseMax(0.0);
    f.out = (m.w2 * f.hidden).colwise() + m.b2;
    return f;
}

} // namespace

VectorX mlp_forward(const MlpModel& model, const Eigen::Ref<const VectorX>& normalized_input) {
    const VectorX h = (model.w1 * normalized_input + model.b1).cwiseMax(0.0);
    return model.w2 * h + model.b2;
}

double mlp_loss(const MlpModel& model, const MlpBatch& batch) {
    const auto f = forward(model, batch.x);
    return (f.out - batch.y).squaredNorm() / static_cast<double>(batch.y.size());
}

MlpGradients mlp_gradients(const MlpModel& model, const MlpBatch& batch) {
    const auto f = forward(model, batch.x);
    const MatrixX d_out = 2.0 * (f.out - batch.y) / static_cast<double>(batch.y.size());
    MlpGradients g;
    g.w2 = d_out * f.hidden.transpose();
    g.b2 = d_out.rowwise().sum();
    const MatrixX d_hidden = (model.w2.transpose() * d_out).cwiseProduct((f.pre.array() > 0.0).cast<double>().matrix());
    g.w1 = d_hidden * batch.x.transpose();
    g.b1 = d_hidden.rowwise().sum();
    return g;
}

MlpTrainResult mlp_train(const MatrixX& inputs, const MatrixX& targets, const MlpTrainOptions& options) {
    if (inputs.rows() < 1) throw Error(ErrorKind::InsufficientData, "MLP training needs at least 1 sample");
    if (inputs.rows() != targets.rows()) throw Error(ErrorKind::DimensionError, "input/target count mismatch");
    if (!(options.lr > 0.0)) throw Error(ErrorKind::InvalidArgument, "learning rate must be > 0");
    if (options.epochs < 0) throw Error(ErrorKind::InvalidArgument, "epochs must be >= 0");
    if (options.hidden < 1) throw Error(ErrorKind::InvalidArgument, "hidden layer must be non-empty");
    if (!inputs.allFinite() || !targets.allFinite()) throw Error(ErrorKind::InvalidData, "non-finite training data");

    MlpTrainResult result;
    MlpModel& m = result.model;
    m = mlp_init(inputs.cols(), options.hidden, targets.cols(), options.seed);
    if (options.zero_output_layer) m.w2.setZero();
    if (options.normalize) {
        m.input_norm = Normalization::fit(inputs);
        m.output_norm = Normalization::fit(targets);
    }
    // An input that never varies carries no information and gets no gradient;
    // leaving its random weights in place would amplify any rollout drift.
    for (Eigen::Index j = 0; j < inputs.cols(); ++j)
        if (inputs.col(j).maxCoeff() == inputs.col(j).minCoeff()) m.w1.col(j).setZero();

    MlpBatch batch;
    batch.x = ((inputs.rowwise() - m.input_norm.mean.transpose()).array().rowwise() /
               m.input_norm.scale.transpose().array())
                  .matrix()
                  .transpose();
    batch.y = ((targets.rowwise() - m.output_norm.mean.transpose()).array().rowwise() /
               m.output_norm.scale.transpose().array())
                  .matrix()
                  .transpose();

    if (options.record_trace) result.loss_trace.reserve(static_cast<std::size_t>(options.epochs));
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        if (options.record_trace) result.loss_trace.push_back(mlp_loss(m, batch));
        const auto g = mlp_gradients(m, batch);
        m.w1 -= options.lr * g.w1;
        m.b1 -= options.lr * g.b1;
        m.w2 -= options.lr * g.w2;
        m.b2 -= options.lr * g.b2;
        if (!m.w1.allFinite() || !m.w2.allFinite())
            throw Error(ErrorKind::DivergedTraining, "weights became non-finite at epoch " + std::to_string(epoch));
    }
    m.final_loss = mlp_loss(m, batch);
    if (!std::isfinite(m.final_loss)) throw Error(ErrorKind::DivergedTraining, "non-finite final loss");
    return result;
}

VectorX mlp_predict(const MlpModel& model, const Eigen::Ref<const VectorX>& input) {
    if (input.size() != model.inputs()) throw Error(ErrorKind::DimensionError, "MLP input has wrong length");
    if (!input.allFinite()) throw Error(ErrorKind::InvalidData, "non-finite MLP input");
    return model.output_norm.invert(mlp_forward(model, model.input_norm.apply(input)));
}

Eigen::Matrix<double, kMlpInputs, 1> mlp_input(const MotionState& s) {
    Eigen::Matrix<double, kMlpInputs, 1> in;
    in << s.t, s.pos, s.vel;
    return in;
}

TransitionSet mlp_transitions(std::span<const FlightFrame> frames) {
    if (frames.size() < 2) throw Error(ErrorKind::InsufficientData, "transitions need at least 2 frames");
    const auto n = static_cast<Eigen::Index>(frames.size() - 1);
    TransitionSet set{MatrixX(n, kMlpInputs), MatrixX(n, kMlpOutputs)};
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& cur = frames[static_cast<std::size_t>(k)];
        const auto& next = frames[static_cast<std::size_t>(k) + 1];
        set.inputs.row(k) = mlp_input({cur.t, cur.pos, cur.vel}).transpose();
        set.targets.row(k) << next.pos.transpose(), next.speed_mag;
    }
    return set;
}

TransitionSet concat(std::span<const TransitionSet> parts) {
    Eigen::Index rows = 0;
    for (const auto& p : parts) rows += p.inputs.rows();
    TransitionSet out{MatrixX(rows, kMlpInputs), MatrixX(rows, kMlpOutputs)};
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        out.inputs.middleRows(at, p.inputs.rows()) = p.inputs;
        out.targets.middleRows(at, p.targets.rows()) = p.targets;
        at += p.inputs.rows();
    }
    return out;
}

TrajectoryPrediction rollout(const MlpModel& model, const MotionState& start, int steps) {
    if (steps < 1) throw Error(ErrorKind::InvalidArgument, "steps must be >= 1");
    if (model.inputs() != kMlpInputs || model.outputs() != kMlpOutputs)
        throw Error(ErrorKind::DimensionError, "rollout needs a 7-input, 4-output model");
    TrajectoryPrediction pred;
    pred.method = PredictionMethod::Mlp;
    pred.points.reserve(static_cast<std::size_t>(steps));
    MotionState cur = start;
    for (int i = 1; i <= steps; ++i) {
        const VectorX out = mlp_predict(model, mlp_input(cur));
        const Vec3 next = out.head<3>();
        const double speed = out(3);
        const Vec3 step = next - cur.pos;
        const double len = step.norm();
        MotionState nxt;
        nxt.t = start.t + static_cast<double>(i) * model.dt;
        nxt.pos = next;
        nxt.vel = len > 0.0 ? Vec3(step * (std::max(speed, 0.0) / len)) : Vec3::Zero();
        if (!nxt.pos.allFinite()) throw Error(ErrorKind::InvalidData, "rollout diverged at step " + std::to_string(i));
        pred.points.push_back({nxt.t, nxt.pos});
        cur = nxt;
    }
    return pred;
}

} // namespace trajkit
