// core.hpp
#ifndef TRAJKIT_CORE_HPP_
#define TRAJKIT_CORE_HPP_

#include <Eigen/Core>

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace trajkit {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
using Vec3 = Vector3<double>;
using VectorX = Eigen::VectorXd;
using MatrixX = Eigen::MatrixXd;

enum class ErrorKind {
    InsufficientData,
    DegenerateNodes,
    ExtrapolationRefused,
    InvalidCoefficient,
    NonphysicalPressure,
    DegeneratePoints,
    InvalidData,
    DimensionError,
    DegenerateLabels,
    ConvergenceFailure,
    MetricUndefined,
    SingularDesign,
    FieldBlowup,
    DegenerateSpread,
    DegenerateDirection,
    DivergedTraining,
    AlignmentError,
    InvalidScenario,
    InvalidArgument,
    MissingModel,
    IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure in the library is reported through this exception. `kind()`
/// identifies the failure class; `what()` carries a human readable message
/// that may include context such as a channel name or step index.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// The five flight states. Letters follow the A..E labelling used for the DAG.
enum class FlightState : int { Climb = 0, Level = 1, Turn = 2, Circle = 3, Descent = 4 };

inline constexpr int kNumStates = 5;
inline constexpr std::array<FlightState, kNumStates> kAllStates{
    FlightState::Climb, FlightState::Level, FlightState::Turn, FlightState::Circle,
    FlightState::Descent};

inline constexpr int index_of(FlightState s) noexcept { return static_cast<int>(s); }
inline constexpr FlightState state_from_index(int i) { return kAllStates.at(static_cast<std::size_t>(i)); }

std::string_view state_name(FlightState s) noexcept;   // "climb", "level", ...
char state_letter(FlightState s) noexcept;             // 'A'..'E'
/// Accepts a name ("circle"), a letter ("D") or an index ("3").
std::optional<FlightState> parse_state(std::string_view text) noexcept;

} // namespace trajkit

#endif // TRAJKIT_CORE_HPP_
