// adams.hpp
//
// Trajectory prediction from a per-axis quadratic velocity field
//
//     v_d = a s^2 + b t^2 + c s t + d s + e t + f,   s = position on axis d,
//
// integrated with the four-step Adams-Bashforth-Moulton predictor-corrector,
// plus the circular confidence band drawn around each predicted point.
#ifndef TRAJKIT_ADAMS_HPP_
#define TRAJKIT_ADAMS_HPP_

#include "trajkit/core.hpp"
#include "trajkit/fusion.hpp"
#include "trajkit/state_models.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trajkit {

// ---------------------------------------------------------------------------
// Quadratic velocity regression

using QuadCoefficients = Eigen::Matrix<double, 6, 1>;

/// Design row (s^2, t^2, s t, s, t, 1).
template <typename Scalar>
Eigen::Matrix<Scalar, 6, 1> quad_design_row(Scalar s, Scalar t) {
    Eigen::Matrix<Scalar, 6, 1> row;
    row << s * s, t * t, s * t, s, t, Scalar(1);
    return row;
}

struct RegressionStats {
    long n = 0;
    double mean = 0.0;     // mean of the regressor s
    double spread = 0.0;   // sum (s_i - mean)^2
    double variance = 0.0; // residual mean square, SSE / (n - 6)
};

struct AxisFit {
    QuadCoefficients coef = QuadCoefficients::Zero();
    double residual_rms = 0.0;
    RegressionStats stats;
    double ridge = 0.0;  // regularisation actually applied, 0 if none

    double velocity(double s, double t) const { return coef.dot(quad_design_row(s, t)); }
};

/// Least-squares fit of one axis through column-equilibrated normal
/// equations, with a ridge fallback when they are numerically singular.
AxisFit quad_regress_axis(std::span<const double> s, std::span<const double> t, std::span<const double> v);

struct QuadVelocityModel {
    std::array<AxisFit, 3> axes;
    double residual_rms = 0.0;  // over all three axes

    Vec3 velocity(double t, const Vec3& pos) const {
        return {axes[0].velocity(pos.x(), t), axes[1].velocity(pos.y(), t), axes[2].velocity(pos.z(), t)};
    }
    std::array<RegressionStats, 3> stats() const { return {axes[0].stats, axes[1].stats, axes[2].stats}; }
};

QuadVelocityModel quad_regress(std::span<const FlightFrame> frames);

// ---------------------------------------------------------------------------
// Integrators

namespace detail {
inline bool all_finite(double v) { return std::isfinite(v); }
template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) { return v.allFinite(); }
} // namespace detail

/// Classical four-stage Runge-Kutta step.
template <typename State, typename Field>
State rk4_step(const Field& field, double t, const State& y, double h) {
    const State k1 = field(t, y);
    const State k2 = field(t + 0.5 * h, State(y + 0.5 * h * k1));
    const State k3 = field(t + 0.5 * h, State(y + 0.5 * h * k2));
    const State k4 = field(t + h, State(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// The last four solution points, oldest first: index 3 is (t_n, y_n, f_n).
template <typename State>
struct AbmHistory {
    std::array<double, 4> t{};
    std::array<State, 4> y{};
    std::array<State, 4> f{};
};

template <typename State>
struct AbmPoint {
    double t;
    State y;
    State f;  // field at the corrected point
};

/// One PECE step: Adams-Bashforth predictor, a single Adams-Moulton correction.
template <typename State, typename Field>
AbmPoint<State> abm4_step(const Field& field, const AbmHistory<State>& hist, double h) {
    const auto& f = hist.f;
    const State& yn = hist.y[3];
    const double tn1 = hist.t[3] + h;
    const State predicted = yn + (h / 24.0) * (55.0 * f[3] - 59.0 * f[2] + 37.0 * f[1] - 9.0 * f[0]);
    const State f_pred = field(tn1, predicted);
    if (!detail::all_finite(f_pred)) throw Error(ErrorKind::FieldBlowup, "non-finite field at predictor");
    const State corrected = yn + (h / 24.0) * (9.0 * f_pred + 19.0 * f[3] - 5.0 * f[2] + f[1]);
    const State f_corr = field(tn1, corrected);
    if (!detail::all_finite(f_corr)) throw Error(ErrorKind::FieldBlowup, "non-finite field at corrector");
    return {tn1, corrected, f_corr};
}

template <typename State>
struct IntegrationResult {
    std::vector<double> t;
    std::vector<State> y;
};

/// Integrates `steps` steps from (t0, y0). The first three steps use RK4;
/// times are exactly t0 + i h. The result includes the initial point.
template <typename State, typename Field>
IntegrationResult<State> integrate_abm4(const Field& field, double t0, const State& y0, double h, int steps) {
    if (steps < 1) throw Error(ErrorKind::InvalidArgument, "steps must be >= 1");
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "step must be > 0");
    IntegrationResult<State> out;
    out.t.reserve(static_cast<std::size_t>(steps) + 1);
    out.y.reserve(static_cast<std::size_t>(steps) + 1);
    std::vector<State> fs;
    out.t.push_back(t0);
    out.y.push_back(y0);
    fs.push_back(field(t0, y0));
    if (!detail::all_finite(fs.back())) throw Error(ErrorKind::FieldBlowup, "non-finite field at step 0");
    for (int i = 1; i <= steps; ++i) {
        const double ti = t0 + static_cast<double>(i) * h;
        try {
            if (i <= 3) {
                State yi = rk4_step(field, out.t.back(), out.y.back(), h);
                State fi = field(ti, yi);
                if (!detail::all_finite(yi) || !detail::all_finite(fi))
                    throw Error(ErrorKind::FieldBlowup, "non-finite bootstrap value");
                out.y.push_back(std::move(yi));
                fs.push_back(std::move(fi));
            } else {
                AbmHistory<State> hist;
                const std::size_t base = out.y.size() - 4;
                for (std::size_t k = 0; k < 4; ++k) {
                    hist.t[k] = out.t[base + k];
                    hist.y[k] = out.y[base + k];
                    hist.f[k] = fs[base + k];
                }
                auto next = abm4_step(field, hist, h);
                out.y.push_back(std::move(next.y));
                fs.push_back(std::move(next.f));
            }
        } catch (const Error& e) {
            throw Error(e.kind(), "step " + std::to_string(i) + ": " + e.what());
        }
        out.t.push_back(ti);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Confidence band

struct ConfidenceRadius {
    Vec3 per_axis = Vec3::Zero();
    double combined = 0.0;
};

/// r_d = k S_d sqrt(1 + 1/n + (x0 - mean)^2 / spread), r = |(r_x, r_y, r_z)|.
ConfidenceRadius confidence_radius(const std::array<RegressionStats, 3>& stats, const Vec3& x0,
                                   double coverage_multiplier = 1.0);

/// Two plane rotations, about z (azimuth) then about y (tilt), whose product
/// maps the unit vector `dir` onto +z. For dir = (0, 0, +-1) the azimuth is 0.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> givens_to_vertical(const Vector3<Scalar>& dir) {
    using std::atan2;
    using std::cos;
    using std::sin;
    using std::sqrt;
    const Scalar horiz = sqrt(dir.x() * dir.x() + dir.y() * dir.y());
    const Scalar azimuth = horiz == Scalar(0) ? Scalar(0) : atan2(dir.y(), dir.x());
    const Scalar tilt = atan2(-horiz, dir.z());
    Eigen::Matrix<Scalar, 3, 3> about_y;
    about_y << cos(tilt), Scalar(0), sin(tilt),
               Scalar(0), Scalar(1), Scalar(0),
              -sin(tilt), Scalar(0), cos(tilt);
    Eigen::Matrix<Scalar, 3, 3> about_z;
    about_z << cos(azimuth), sin(azimuth), Scalar(0),
              -sin(azimuth), cos(azimuth), Scalar(0),
               Scalar(0), Scalar(0), Scalar(1);
    return about_y * about_z;
}

struct ConfidenceCurve {
    Vec3 center = Vec3::Zero();
    double radius = 0.0;
    Vec3 direction = Vec3::UnitZ();
    std::vector<Vec3> sample_points;
};

/// Circle of radius r about P1 in the plane orthogonal to P1 - P0, sampled at
/// n uniform parameter values t = 2 pi i / n.
ConfidenceCurve confidence_curve(const Vec3& p0, const Vec3& p1, double r, int n_samples = 36);

// ---------------------------------------------------------------------------
// Prediction

enum class PredictionMethod { Adams, Mlp };
std::string_view method_name(PredictionMethod m) noexcept;

struct TrajectoryPoint {
    double t = 0.0;
    Vec3 pos = Vec3::Zero();
};

struct TrajectoryPrediction {
    std::vector<TrajectoryPoint> points;  // t0 + i h for i = 1..steps
    std::vector<double> radii;            // empty unless confidence requested
    std::vector<ConfidenceCurve> curves;
    std::optional<FlightState> state;     // empty for a global model
    PredictionMethod method = PredictionMethod::Adams;
};

struct PredictOptions {
    double h = 0.1;
    int steps = 50;
    bool with_confidence = false;
    double coverage_multiplier = 1.0;
    int curve_samples = 36;
};

TrajectoryPrediction predict_trajectory(const QuadVelocityModel& model, double t0, const Vec3& pos0,
                                        const PredictOptions& options);

using AdamsModelSet = StateModels<QuadVelocityModel>;

} // namespace trajkit

#endif // TRAJKIT_ADAMS_HPP_
