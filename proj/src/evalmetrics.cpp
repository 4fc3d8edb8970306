#include "trajkit/evalmetrics.hpp"

#include <cmath>
#include <string>

namespace trajkit {

double point_distance(const Vec3& actual, const Vec3& predicted) {
    if (!actual.allFinite() || !predicted.allFinite()) throw Error(ErrorKind::InvalidData, "non-finite point");
    return (actual - predicted).norm();
}

ErrorReport trajectory_error(std::span<const Vec3> actual, std::span<const Vec3> predicted) {
    if (actual.size() != predicted.size())
        throw Error(ErrorKind::AlignmentError, "trajectories differ in length (" + std::to_string(actual.size()) +
                                                   " vs " + std::to_string(predicted.size()) + ")");
    if (actual.empty()) throw Error(ErrorKind::AlignmentError, "trajectories are empty");
    ErrorReport r;
    r.distances.reserve(actual.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        r.distances.push_back(point_distance(actual[i], predicted[i]));
        sum += r.distances.back();
    }
    r.mu = sum / static_cast<double>(actual.size());
    return r;
}

ErrorReport trajectory_error(std::span<const TrajectoryPoint> actual, std::span<const TrajectoryPoint> predicted,
                             double time_tol) {
    if (actual.size() != predicted.size())
        throw Error(ErrorKind::AlignmentError, "trajectories differ in length (" + std::to_string(actual.size()) +
                                                   " vs " + std::to_string(predicted.size()) + ")");
    std::vector<Vec3> a, p;
    a.reserve(actual.size());
    p.reserve(actual.size());
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (!(std::abs(actual[i].t - predicted[i].t) <= time_tol))
            throw Error(ErrorKind::AlignmentError, "time stamps differ at point " + std::to_string(i));
        a.push_back(actual[i].pos);
        p.push_back(predicted[i].pos);
    }
    return trajectory_error(a, p);
}

const MethodErrors& RecognitionComparison::get(PredictionMethod m, bool with_recognition) const {
    if (m == PredictionMethod::Adams) return with_recognition ? adams_with : adams_without;
    return with_recognition ? mlp_with : mlp_without;
}

namespace {

struct Accumulator {
    std::array<double, kNumStates> sum{};
    std::array<long, kNumStates> count{};

    void add(FlightState s, const ErrorReport& r) {
        const auto i = static_cast<std::size_t>(index_of(s));
        for (double d : r.distances) sum[i] += d;
        count[i] += static_cast<long>(r.distances.size());
    }

    MethodErrors finish() const {
        MethodErrors e;
        double total = 0.0;
        long n = 0;
        for (std::size_t i = 0; i < sum.size(); ++i) {
            e.per_state[i].points = count[i];
            e.per_state[i].mu = count[i] > 0 ? sum[i] / static_cast<double>(count[i]) : 0.0;
            total += sum[i];
            n += count[i];
        }
        e.overall.points = n;
        e.overall.mu = n > 0 ? total / static_cast<double>(n) : 0.0;
        return e;
    }
};

} // namespace

RecognitionComparison compare_recognition(std::span<const PredictionCase> cases, const AdamsModelSet& adams,
                                          const MlpModelSet& mlp, const DagSvmModel& recognizer,
                                          const PredictOptions& adams_options) {
    Accumulator aw, ao, mw, mo;
    RecognitionComparison out;
    out.recognized.reserve(cases.size());
    for (const auto& c : cases) {
        if (c.actual.empty()) throw Error(ErrorKind::AlignmentError, "case has no future points");
        const FlightState guess = dag_classify(recognizer, c.features).state;
        out.recognized.push_back(guess);

        PredictOptions opt = adams_options;
        opt.steps = static_cast<int>(c.actual.size());
        opt.with_confidence = false;
        auto adams_error = [&](std::optional<FlightState> s) {
            const auto pred = predict_trajectory(adams.select(s), c.start.t, c.start.pos, opt);
            return trajectory_error(c.actual, pred.points);
        };
        auto mlp_error = [&](std::optional<FlightState> s) {
            const auto pred = rollout(mlp.select(s), c.start, static_cast<int>(c.actual.size()));
            return trajectory_error(c.actual, pred.points);
        };
        aw.add(c.state, adams_error(guess));
        ao.add(c.state, adams_error(std::nullopt));
        mw.add(c.state, mlp_error(guess));
        mo.add(c.state, mlp_error(std::nullopt));
    }
    out.adams_with = aw.finish();
    out.adams_without = ao.finish();
    out.mlp_with = mw.finish();
    out.mlp_without = mo.finish();
    return out;
}

double relative_gain(const MethodErrors& with, const MethodErrors& without) {
    if (without.overall.mu == 0.0) return 0.0;
    return 1.0 - with.overall.mu / without.overall.mu;
}

} // namespace trajkit
