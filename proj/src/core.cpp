#include "trajkit/core.hpp"

#include <charconv>

namespace trajkit {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::DegenerateNodes: return "DegenerateNodes";
    case ErrorKind::ExtrapolationRefused: return "ExtrapolationRefused";
    case ErrorKind::InvalidCoefficient: return "InvalidCoefficient";
    case ErrorKind::NonphysicalPressure: return "NonphysicalPressure";
    case ErrorKind::DegeneratePoints: return "DegeneratePoints";
    case ErrorKind::InvalidData: return "InvalidData";
    case ErrorKind::DimensionError: return "DimensionError";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::MetricUndefined: return "MetricUndefined";
    case ErrorKind::SingularDesign: return "SingularDesign";
    case ErrorKind::FieldBlowup: return "FieldBlowup";
    case ErrorKind::DegenerateSpread: return "DegenerateSpread";
    case ErrorKind::DegenerateDirection: return "DegenerateDirection";
    case ErrorKind::DivergedTraining: return "DivergedTraining";
    case ErrorKind::AlignmentError: return "AlignmentError";
    case ErrorKind::InvalidScenario: return "InvalidScenario";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MissingModel: return "MissingModel";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

std::string_view state_name(FlightState s) noexcept {
    switch (s) {
    case FlightState::Climb: return "climb";
    case FlightState::Level: return "level";
    case FlightState::Turn: return "turn";
    case FlightState::Circle: return "circle";
    case FlightState::Descent: return "descent";
    }
    return "?";
}

char state_letter(FlightState s) noexcept { return static_cast<char>('A' + index_of(s)); }

std::optional<FlightState> parse_state(std::string_view text) noexcept {
    for (auto s : kAllStates) {
        if (text == state_name(s)) return s;
    }
    if (text.size() == 1) {
        char c = text[0];
        if (c >= 'A' && c <= 'E') return state_from_index(c - 'A');
        if (c >= 'a' && c <= 'e') return state_from_index(c - 'a');
    }
    int idx = -1;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), idx);
    if (ec == std::errc() && ptr == text.data() + text.size() && idx >= 0 && idx < kNumStates)
        return state_from_index(idx);
    return std::nullopt;
}

} // namespace trajkit
