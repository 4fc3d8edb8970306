// simgen.hpp
//
// Deterministic synthetic flights for the five flight states. Each scenario
// yields the raw sensor stream a logger would record plus the ground-truth
// frames at the same ticks.
#ifndef TRAJKIT_SIMGEN_HPP_
#define TRAJKIT_SIMGEN_HPP_

#include "trajkit/core.hpp"
#include "trajkit/fusion.hpp"
#include "trajkit/telemetry.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace trajkit {

struct SensorNoise {
    double gps = 0.5;       // m
    double pressure = 5.0;  // Pa
    double gyro = 0.01;     // rad/s
    double accel = 0.05;    // m/s^2

    static SensorNoise none() { return {0.0, 0.0, 0.0, 0.0}; }
};

struct KinematicParams {
    double cruise_speed = 10.0;  // horizontal, m/s
    double climb_rate = 2.5;     // m/s
    double descent_rate = 2.5;   // m/s
    double turn_rate = 0.4;      // rad/s
    double turn_angle = 1.5707963267948966;  // rad, at most 120 degrees
    double turn_start = 2.0;     // s after the stream starts
    double circle_radius = 50.0; // m
    double roll_time = 0.5;      // s to roll into or out of a turn's bank
    int turn_direction = 1;      // +1 counter-clockwise, -1 clockwise
    double heading = 0.0;        // rad, initial track angle from +x
    Vec3 start = Vec3(0.0, 0.0, 100.0);
};

struct FlightScenario {
    FlightState state = FlightState::Level;
    double duration = 60.0;
    double period = 0.1;
    KinematicParams params;
    SensorNoise noise;
    std::uint64_t seed = 7;
};

struct GeneratedFlight {
    FlightState state = FlightState::Level;
    RawStream raw;
    /// Exact positions and attitude; velocity, acceleration and curvature use
    /// the same discrete rules as fusion so a noiseless stream fuses back to
    /// these frames.
    std::vector<FlightFrame> truth;
};

void validate_scenario(const FlightScenario& scenario);

GeneratedFlight generate(const FlightScenario& scenario);

/// Parameter ranges drawn per stream when building a corpus.
struct CorpusJitter {
    std::array<double, 2> speed{9.0, 11.0};
    std::array<double, 2> climb_rate{1.5, 3.5};
    std::array<double, 2> descent_rate{1.5, 3.5};
    std::array<double, 2> turn_rate{0.3, 0.6};
    std::array<double, 2> turn_angle{1.0471975511965976, 2.0943951023931953};  // 60..120 degrees
    std::array<double, 2> turn_start{0.3, 1.2};
    std::array<double, 2> circle_radius{20.0, 50.0};
    std::array<double, 2> start_xy{-200.0, 200.0};
    std::array<double, 2> altitude{80.0, 150.0};
};

struct CorpusSpec {
    std::array<int, kNumStates> per_state{200, 200, 200, 200, 200};
    double duration = 5.0;
    double period = 0.1;
    SensorNoise noise;
    CorpusJitter jitter;
    std::uint64_t seed = 7;
};

/// Streams ordered by state then index. Stream i of state s draws its
/// parameters and noise from derive_seed(seed, s, i) only.
std::vector<GeneratedFlight> generate_corpus(const CorpusSpec& spec);

/// SplitMix64 mix of a base seed with two stream coordinates.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

} // namespace trajkit

#endif // TRAJKIT_SIMGEN_HPP_
