// state_models.hpp
#ifndef TRAJKIT_STATE_MODELS_HPP_
#define TRAJKIT_STATE_MODELS_HPP_

#include "trajkit/core.hpp"

#include <array>
#include <optional>
#include <string>

namespace trajkit {

/// One predictor per flight state plus a pooled baseline fitted on all states.
template <typename Model>
struct StateModels {
    std::array<std::optional<Model>, kNumStates> per_state;
    std::optional<Model> global;

    /// The state's model, or the global one for std::nullopt.
    const Model& select(std::optional<FlightState> state) const {
        if (state) {
            const auto& m = per_state[static_cast<std::size_t>(index_of(*state))];
            if (!m) throw Error(ErrorKind::MissingModel, "no model for state " + std::string(state_name(*state)));
            return *m;
        }
        if (!global) throw Error(ErrorKind::MissingModel, "no global model");
        return *global;
    }

    bool complete() const {
        for (const auto& m : per_state)
            if (!m) return false;
        return global.has_value();
    }
};

} // namespace trajkit

#endif // TRAJKIT_STATE_MODELS_HPP_
