// evalmetrics.hpp
#ifndef TRAJKIT_EVALMETRICS_HPP_
#define TRAJKIT_EVALMETRICS_HPP_

#include "trajkit/adams.hpp"
#include "trajkit/core.hpp"
#include "trajkit/dagsvm.hpp"
#include "trajkit/mlp.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace trajkit {

double point_distance(const Vec3& actual, const Vec3& predicted);

struct ErrorReport {
    double mu = 0.0;
    std::vector<double> distances;
};

/// Mean point distance of two equally long sequences.
ErrorReport trajectory_error(std::span<const Vec3> actual, std::span<const Vec3> predicted);

/// Timestamped variant; point i of each sequence must share its time stamp to
/// within time_tol.
ErrorReport trajectory_error(std::span<const TrajectoryPoint> actual, std::span<const TrajectoryPoint> predicted,
                             double time_tol = 1e-9);

/// One held-out stream: what the recognizer sees, where prediction starts and
/// what actually happened next, all in one coordinate frame.
struct PredictionCase {
    FlightState state = FlightState::Level;  // true label
    VectorX features;                        // recognizer input
    MotionState start;
    std::vector<TrajectoryPoint> actual;
};

struct StateError {
    long points = 0;
    double mu = 0.0;
};

struct MethodErrors {
    std::array<StateError, kNumStates> per_state{};
    StateError overall;
};

struct RecognitionComparison {
    MethodErrors adams_with, adams_without, mlp_with, mlp_without;
    std::vector<FlightState> recognized;  // per case

    const MethodErrors& get(PredictionMethod m, bool with_recognition) const;
};

/// Predicts every case with the state model chosen by the recognizer and with
/// the global model, grouping errors by the true state.
RecognitionComparison compare_recognition(std::span<const PredictionCase> cases, const AdamsModelSet& adams,
                                          const MlpModelSet& mlp, const DagSvmModel& recognizer,
                                          const PredictOptions& adams_options = {});

/// Relative improvement 1 - with / without; 0 when without is 0.
double relative_gain(const MethodErrors& with, const MethodErrors& without);

} // namespace trajkit

#endif // TRAJKIT_EVALMETRICS_HPP_
