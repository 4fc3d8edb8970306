// telemetry.hpp
//
// Raw telemetry records and the three-stage cleanup applied to every channel:
// sigma rejection, cubic Newton repair of the rejected samples, and first-order
// exponential smoothing.
#ifndef TRAJKIT_TELEMETRY_HPP_
#define TRAJKIT_TELEMETRY_HPP_

#include "trajkit/core.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace trajkit {

struct RawSample {
    double t = 0.0;         // s
    double x = 0.0;         // m, local planar frame
    double y = 0.0;         // m
    double pressure = 0.0;  // Pa
    double omega_x = 0.0;   // rad/s
    double omega_y = 0.0;
    double omega_z = 0.0;
    double accel_x = 0.0;   // m/s^2
    double accel_y = 0.0;
    double accel_z = 0.0;
};

/// Sensor channels subject to cleanup, in CSV column order (after `t`).
enum class Channel : int { X, Y, Pressure, OmegaX, OmegaY, OmegaZ, AccelX, AccelY, AccelZ };
inline constexpr int kNumChannels = 9;

std::string_view channel_name(Channel c) noexcept;
double& channel_ref(RawSample& s, Channel c) noexcept;
double channel_value(const RawSample& s, Channel c) noexcept;

struct RawStream {
    std::vector<RawSample> samples;
    double period = 0.1;
};

/// Checks the stream invariants (strictly increasing time, constant period
/// within 1e-9 s, positive pressure) and returns the measured period.
double validate_stream(std::span<const RawSample> samples);

enum class RepairAction { Rejected, Interpolated, Filtered };
std::string_view action_name(RepairAction a) noexcept;

struct RepairEntry {
    std::size_t index = 0;
    Channel channel = Channel::X;
    RepairAction action = RepairAction::Rejected;

    friend bool operator==(const RepairEntry&, const RepairEntry&) = default;
};

struct CleanStream {
    std::vector<RawSample> samples;
    double period = 0.1;
    std::vector<RepairEntry> repair_log;
};

// ---------------------------------------------------------------------------
// Outlier rejection

struct OutlierResult {
    std::vector<std::optional<double>> kept;
    std::vector<std::size_t> flagged;
};

/// Marks every value outside (mean - k*sigma, mean + k*sigma) as missing.
/// Mean and population sigma are taken over the whole input.
OutlierResult reject_outliers(std::span<const double> series, double sigma_k = 3.0);

// ---------------------------------------------------------------------------
// Newton interpolation

template <typename Scalar>
struct Node {
    Scalar t;
    Scalar v;
};

/// Cubic Newton divided-difference interpolant through four nodes, evaluated
/// at `t_query`. Queries outside the nodes' hull throw unless `allow_extrapolation`.
template <typename Scalar>
Scalar newton_interpolate(const std::array<Node<Scalar>, 4>& nodes, Scalar t_query,
                          bool allow_extrapolation = false) {
    using std::abs;
    Scalar lo = nodes[0].t, hi = nodes[0].t;
    for (std::size_t i = 0; i < 4; ++i) {
        if (!std::isfinite(static_cast<double>(nodes[i].t)) ||
            !std::isfinite(static_cast<double>(nodes[i].v)))
            throw Error(ErrorKind::InvalidData, "non-finite interpolation node");
        for (std::size_t j = i + 1; j < 4; ++j) {
            if (nodes[i].t == nodes[j].t)
                throw Error(ErrorKind::DegenerateNodes, "duplicate abscissae");
        }
        lo = nodes[i].t < lo ? nodes[i].t : lo;
        hi = nodes[i].t > hi ? nodes[i].t : hi;
    }
    if (!allow_extrapolation && (t_query < lo || t_query > hi))
        throw Error(ErrorKind::ExtrapolationRefused, "query outside interpolation nodes");

    // In-place divided-difference table; coef[k] ends up as f[t0..tk].
    std::array<Scalar, 4> coef{nodes[0].v, nodes[1].v, nodes[2].v, nodes[3].v};
    for (std::size_t order = 1; order < 4; ++order) {
        for (std::size_t i = 3; i >= order; --i) {
            coef[i] = (coef[i] - coef[i - 1]) / (nodes[i].t - nodes[i - order].t);
        }
    }
    Scalar result = coef[3];
    for (std::size_t k = 3; k-- > 0;) {
        result = result * (t_query - nodes[k].t) + coef[k];
    }
    return result;
}

/// Picks the four surviving samples nearest to `index` in time (ties go to the
/// earlier sample). Returns their positions in ascending order.
std::array<std::size_t, 4> nearest_survivors(std::span<const double> times,
                                             std::span<const std::optional<double>> values,
                                             std::size_t index);

// ---------------------------------------------------------------------------
// Smoothing

/// Y(0) = X(0); Y(n) = m X(n) + (1 - m) Y(n-1).
std::vector<double> adaptive_smooth(std::span<const double> series, double m);

/// Coefficient policy: given the sample index, the current input and the
/// previous output, return the coefficient to use for this step.
using SmoothingPolicy = std::function<double(std::size_t n, double x, double y_prev)>;

SmoothingPolicy fixed_smoothing(double m);

std::vector<double> adaptive_smooth(std::span<const double> series, const SmoothingPolicy& policy);

// ---------------------------------------------------------------------------

struct PreprocessConfig {
    double sigma_k = 3.0;
    double smoothing = 0.5;
    /// Overrides `smoothing` when set.
    SmoothingPolicy policy;
};

/// Runs rejection, repair and smoothing on every channel. Length and
/// timestamps are preserved exactly.
CleanStream preprocess(const RawStream& stream, const PreprocessConfig& config = {});

} // namespace trajkit

#endif // TRAJKIT_TELEMETRY_HPP_
