#include "trajkit/dagsvm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace trajkit {

int pair_index(FlightState a, FlightState b) {
    int i = index_of(a), j = index_of(b);
    if (i == j) throw Error(ErrorKind::InvalidArgument, "pair needs two distinct states");
    if (i > j) std::swap(i, j);
    // Row-major upper triangle: (0,1)=0 ... (0,4)=3, (1,2)=4 ... (3,4)=9.
    return i * kNumStates - i * (i + 1) / 2 + (j - i - 1);
}

DagResult dag_walk(const std::array<FlightState, kNumStates>& order, const PairDecision& decide) {
    std::deque<FlightState> active(order.begin(), order.end());
    DagResult result;
    result.path.reserve(kNumStates - 1);
    while (active.size() > 1) {
        const FlightState first = active.front();
        const FlightState last = active.back();
        const double v = decide(first, last);
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidData, "non-finite decision value");
        if (v > 0.0) {
            active.pop_back();
            result.path.push_back({first, last, first});
        } else {
            active.pop_front();
            result.path.push_back({first, last, last});
        }
    }
    result.state = active.front();
    return result;
}

namespace {

/// Decision value oriented so that positive favours `a`.
double oriented_decision(const DagSvmModel& model, FlightState a, FlightState b, const Eigen::Ref<const VectorX>& x) {
    const auto& svm = model.classifier(a, b);
    const double v = svm.decision(x);
    return svm.positive == a ? v : -v;
}

} // namespace

DagResult dag_classify(const DagSvmModel& model, const Eigen::Ref<const VectorX>& x) {
    if (x.size() != model.dim()) throw Error(ErrorKind::DimensionError, "classifier input has wrong length");
    return dag_walk(model.order, [&](FlightState a, FlightState b) { return oriented_decision(model, a, b, x); });
}

FlightState vote_classify(const DagSvmModel& model, const Eigen::Ref<const VectorX>& x) {
    if (x.size() != model.dim()) throw Error(ErrorKind::DimensionError, "classifier input has wrong length");
    std::array<int, kNumStates> votes{};
    for (int i = 0; i < kNumStates; ++i) {
        for (int j = i + 1; j < kNumStates; ++j) {
            const auto a = state_from_index(i), b = state_from_index(j);
            ++votes[static_cast<std::size_t>(index_of(oriented_decision(model, a, b, x) > 0.0 ? a : b))];
        }
    }
    FlightState best = model.order[0];
    for (auto s : model.order)
        if (votes[static_cast<std::size_t>(index_of(s))] > votes[static_cast<std::size_t>(index_of(best))]) best = s;
    return best;
}

DagSvmModel dagsvm_train(const MatrixX& x, std::span<const FlightState> labels, const DagSvmParams& params) {
    if (static_cast<std::size_t>(x.rows()) != labels.size())
        throw Error(ErrorKind::DimensionError, "label count does not match samples");
    if (x.cols() < 1) throw Error(ErrorKind::DimensionError, "zero-dimensional input");

    SvmParams svm;
    svm.C = params.C;
    svm.tol = params.tol;
    svm.kernel = params.linear ? Kernel::linear()
                               : Kernel::rbf(params.gamma > 0.0 ? params.gamma : 1.0 / static_cast<double>(x.cols()));

    DagSvmModel model;
    for (int i = 0; i < kNumStates; ++i) {
        for (int j = i + 1; j < kNumStates; ++j) {
            const auto a = state_from_index(i), b = state_from_index(j);
            std::vector<Eigen::Index> rows;
            for (std::size_t r = 0; r < labels.size(); ++r)
                if (labels[r] == a || labels[r] == b) rows.push_back(static_cast<Eigen::Index>(r));
            MatrixX px(static_cast<Eigen::Index>(rows.size()), x.cols());
            VectorX py(static_cast<Eigen::Index>(rows.size()));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                px.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
                py(static_cast<Eigen::Index>(r)) = labels[static_cast<std::size_t>(rows[r])] == a ? 1.0 : -1.0;
            }
            try {
                auto trained = svm_train(px, py, svm);
                trained.model.positive = a;
                trained.model.negative = b;
                model.classifiers[static_cast<std::size_t>(pair_index(a, b))] = std::move(trained.model);
            } catch (const Error& e) {
                throw Error(e.kind(), std::string("pair ") + state_letter(a) + state_letter(b) + ": " + e.what());
            }
        }
    }
    return model;
}

double weighted_f1(double precision, double recall, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1]");
    if (!(precision > 0.0) || !(recall > 0.0))
        throw Error(ErrorKind::MetricUndefined, "precision and recall must be positive");
    if (precision > 1.0 || recall > 1.0) throw Error(ErrorKind::InvalidArgument, "precision and recall must be <= 1");
    return 1.0 / (alpha / precision + (1.0 - alpha) / recall);
}

ClassificationReport score_predictions(std::span<const FlightState> truth, std::span<const FlightState> predicted,
                                       double alpha) {
    if (truth.size() != predicted.size()) throw Error(ErrorKind::DimensionError, "label count mismatch");
    if (truth.empty()) throw Error(ErrorKind::InsufficientData, "empty evaluation set");
    ClassificationReport rep;
    rep.total = truth.size();
    for (std::size_t i = 0; i < truth.size(); ++i) ++rep.confusion.counts(index_of(truth[i]), index_of(predicted[i]));
    long correct = 0;
    for (int c = 0; c < kNumStates; ++c) {
        const long tp = rep.confusion.counts(c, c);
        const long predicted_c = rep.confusion.counts.col(c).sum();
        const long actual_c = rep.confusion.counts.row(c).sum();
        correct += tp;
        const auto k = static_cast<std::size_t>(c);
        rep.precision[k] = predicted_c > 0 ? static_cast<double>(tp) / static_cast<double>(predicted_c) : 0.0;
        rep.recall[k] = actual_c > 0 ? static_cast<double>(tp) / static_cast<double>(actual_c) : 0.0;
        rep.f1[k] = (rep.precision[k] > 0.0 && rep.recall[k] > 0.0) ? weighted_f1(rep.precision[k], rep.recall[k], alpha)
                                                                    : 0.0;
    }
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
    return rep;
}

ClassificationReport evaluate(const DagSvmModel& model, const MatrixX& x, std::span<const FlightState> labels,
                              double alpha) {
    if (x.rows() == 0) throw Error(ErrorKind::InsufficientData, "empty evaluation set");
    if (static_cast<std::size_t>(x.rows()) != labels.size())
        throw Error(ErrorKind::DimensionError, "label count does not match samples");
    std::vector<FlightState> predicted(labels.size());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        predicted[static_cast<std::size_t>(i)] = dag_classify(model, x.row(i).transpose()).state;
    return score_predictions(labels, predicted, alpha);
}

} // namespace trajkit
