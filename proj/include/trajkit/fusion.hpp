// fusion.hpp
#ifndef TRAJKIT_FUSION_HPP_
#define TRAJKIT_FUSION_HPP_

#include "trajkit/core.hpp"
#include "trajkit/telemetry.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trajkit {

struct FlightFrame {
    double t = 0.0;
    Vec3 pos = Vec3::Zero();
    Vec3 vel = Vec3::Zero();
    Vec3 attitude = Vec3::Zero();
    Vec3 acc = Vec3::Zero();
    double curvature = 0.0;
    double speed_mag = 0.0;
    double acc_mag = 0.0;
};

// Barometric altitude constants: 9.87e-6 ~ 1/101325 Pa and 5.256 is the ISA
// exponent.
inline constexpr double kAltitudeScale = 4.43e4;
inline constexpr double kPressureRatio = 9.87e-6;
inline constexpr double kBarometricExponent = 5.256;

/// z = 4.43e4 * (1 - (9.87e-6 P)^(1/5.256))
template <typename Scalar>
Scalar altitude_from_pressure(Scalar pressure) {
    using std::pow;
    if (!(pressure > Scalar(0)))
        throw Error(ErrorKind::NonphysicalPressure, "pressure must be positive");
    return Scalar(kAltitudeScale) *
           (Scalar(1) - pow(Scalar(kPressureRatio) * pressure, Scalar(1) / Scalar(kBarometricExponent)));
}

/// Inverse of altitude_from_pressure.
template <typename Scalar>
Scalar pressure_from_altitude(Scalar z) {
    using std::pow;
    const Scalar base = Scalar(1) - z / Scalar(kAltitudeScale);
    if (!(base > Scalar(0))) throw Error(ErrorKind::InvalidData, "altitude above model ceiling");
    return pow(base, Scalar(kBarometricExponent)) / Scalar(kPressureRatio);
}

/// Reciprocal circumradius of three points, 4 Area / (a b c). Collinear points
/// give 0.
template <typename Scalar>
Scalar curvature3(const Vector3<Scalar>& p1, const Vector3<Scalar>& p2, const Vector3<Scalar>& p3) {
    const Scalar a = (p2 - p3).norm();
    const Scalar b = (p1 - p3).norm();
    const Scalar c = (p1 - p2).norm();
    if (a == Scalar(0) || b == Scalar(0) || c == Scalar(0))
        throw Error(ErrorKind::DegeneratePoints, "curvature needs three distinct points");
    const Scalar twice_area = (p2 - p1).cross(p3 - p1).norm();
    return Scalar(2) * twice_area / (a * b * c);
}

/// Backward difference divided by T; the first tick copies the second.
std::vector<Vec3> velocity(std::span<const Vec3> pos, double period);

/// Same difference rule applied to a velocity series.
std::vector<Vec3> acceleration(std::span<const Vec3> vel, double period);

/// theta(n) = theta(0) + sum_{i=1..n} omega(i) T. omega(0) does not contribute.
std::vector<Vec3> attitude(std::span<const Vec3> omega, const Vec3& theta0, double period);

/// Frames from sampled positions and attitude: differenced velocity and
/// acceleration (ticks 0 and 1 copy the first defined second difference),
/// three-point curvature and the two magnitudes.
std::vector<FlightFrame> kinematic_frames(std::span<const double> times, std::span<const Vec3> pos,
                                          std::span<const Vec3> attitude, double period);

/// Per-tick kinematics from a clean stream. Curvature at tick k uses ticks
/// k-1, k, k+1 (coincident points give 0); endpoint ticks copy their neighbour.
std::vector<FlightFrame> fuse(const CleanStream& clean, const Vec3& theta0 = Vec3::Zero());

// ---------------------------------------------------------------------------
// Windowed features

inline constexpr int kFeatureChannels = 15;
inline constexpr int kFeatureStats = 5;
inline constexpr int kFeatureCount = kFeatureChannels * kFeatureStats;

/// Channel c, statistic s lives at index c * 5 + s. Channels: x y z vx vy vz
/// thx thy thz ax ay az k speed acc; statistics: mean var max min range.
const std::vector<std::string>& feature_names();

/// The 15 scalar channels of a frame in feature order.
Eigen::Matrix<double, kFeatureChannels, 1> frame_channels(const FlightFrame& f);

struct FeatureVector {
    Eigen::Matrix<double, kFeatureCount, 1> values;
    std::size_t window_start = 0;
    std::optional<FlightState> label;
};

struct WindowConfig {
    std::size_t window_len = 20;
    std::size_t stride = 10;
};

std::vector<FeatureVector> window_features(std::span<const FlightFrame> frames,
                                           const WindowConfig& config = {});

/// Features of the single window frames[start, start + len).
FeatureVector window_feature(std::span<const FlightFrame> frames, std::size_t start, std::size_t len);

} // namespace trajkit

#endif // TRAJKIT_FUSION_HPP_
