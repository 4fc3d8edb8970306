#include "trajkit/adams.hpp"

#include <numbers>
#include <set>
#include <utility>

namespace trajkit {

namespace {

constexpr double kMinRcond = 1e-14;
constexpr double kMaxRidge = 1e-4;

} // namespace

AxisFit quad_regress_axis(std::span<const double> s, std::span<const double> t, std::span<const double> v) {
    const std::size_t n = s.size();
    if (t.size() != n || v.size() != n) throw Error(ErrorKind::DimensionError, "regression inputs differ in length");
    if (n < 6) throw Error(ErrorKind::InsufficientData, "quadratic regression needs at least 6 samples");

    Eigen::Matrix<double, Eigen::Dynamic, 6> design(static_cast<Eigen::Index>(n), 6);
    VectorX target(static_cast<Eigen::Index>(n));
    std::set<std::pair<double, double>> distinct;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s[i]) || !std::isfinite(t[i]) || !std::isfinite(v[i]))
            throw Error(ErrorKind::InvalidData, "non-finite regression sample");
        design.row(static_cast<Eigen::Index>(i)) = quad_design_row(s[i], t[i]).transpose();
        target(static_cast<Eigen::Index>(i)) = v[i];
        distinct.emplace(s[i], t[i]);
    }
    if (distinct.size() < 6) throw Error(ErrorKind::SingularDesign, "fewer than 6 distinct design rows");

    // Equilibrate columns so the normal matrix has a unit diagonal.
    QuadCoefficients scale = design.colwise().norm().transpose();
    for (int j = 0; j < 6; ++j)
        if (!(scale(j) > 0.0)) scale(j) = 1.0;
    const auto scaled = design * scale.cwiseInverse().asDiagonal();
    Eigen::Matrix<double, 6, 6> normal = scaled.transpose() * scaled;
    const QuadCoefficients rhs = scaled.transpose() * target;

    AxisFit fit;
    double ridge = 0.0;
    for (;;) {
        Eigen::LDLT<Eigen::Matrix<double, 6, 6>> ldlt(normal + ridge * Eigen::Matrix<double, 6, 6>::Identity());
        if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.rcond() >= kMinRcond) {
            fit.coef = ldlt.solve(rhs).cwiseQuotient(scale);
            break;
        }
        ridge = ridge == 0.0 ? 1e-12 : ridge * 10.0;
        if (ridge > kMaxRidge) throw Error(ErrorKind::SingularDesign, "normal equations singular beyond ridge rescue");
    }
    if (!fit.coef.allFinite()) throw Error(ErrorKind::SingularDesign, "non-finite regression coefficients");
    fit.ridge = ridge;

    const VectorX residual = target - design * fit.coef;
    const double sse = residual.squaredNorm();
    fit.residual_rms = std::sqrt(sse / static_cast<double>(n));

    Eigen::Map<const VectorX> sv(s.data(), static_cast<Eigen::Index>(n));
    fit.stats.n = static_cast<long>(n);
    fit.stats.mean = sv.mean();
    fit.stats.spread = (sv.array() - fit.stats.mean).square().sum();
    fit.stats.variance = sse / static_cast<double>(n > 6 ? n - 6 : 1);
    return fit;
}

QuadVelocityModel quad_regress(std::span<const FlightFrame> frames) {
    if (frames.size() < 6) throw Error(ErrorKind::InsufficientData, "quadratic regression needs at least 6 frames");
    std::vector<double> t(frames.size()), s(frames.size()), v(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) t[i] = frames[i].t;

    QuadVelocityModel model;
    double sse = 0.0;
    for (int d = 0; d < 3; ++d) {
        for (std::size_t i = 0; i < frames.size(); ++i) {
            s[i] = frames[i].pos(d);
            v[i] = frames[i].vel(d);
        }
        try {
            model.axes[static_cast<std::size_t>(d)] = quad_regress_axis(s, t, v);
        } catch (const Error& e) {
            throw Error(e.kind(), std::string("axis ") + "xyz"[d] + ": " + e.what());
        }
        const double rms = model.axes[static_cast<std::size_t>(d)].residual_rms;
        sse += rms * rms * static_cast<double>(frames.size());
    }
    model.residual_rms = std::sqrt(sse / (3.0 * static_cast<double>(frames.size())));
    return model;
}

ConfidenceRadius confidence_radius(const std::array<RegressionStats, 3>& stats, const Vec3& x0,
                                   double coverage_multiplier) {
    ConfidenceRadius out;
    for (int d = 0; d < 3; ++d) {
        const auto& st = stats[static_cast<std::size_t>(d)];
        if (st.n < 2) throw Error(ErrorKind::InsufficientData, "confidence radius needs n >= 2");
        if (!(st.spread > 0.0)) throw Error(ErrorKind::DegenerateSpread, "regressor has zero spread");
        const double dev = x0(d) - st.mean;
        const double se = std::sqrt(st.variance);
        out.per_axis(d) = coverage_multiplier * se *
                          std::sqrt(1.0 + 1.0 / static_cast<double>(st.n) + dev * dev / st.spread);
    }
    out.combined = out.per_axis.norm();
    return out;
}

namespace {

ConfidenceCurve circle_about(const Vec3& p0, const Vec3& p1, double r, int n_samples) {
    const Vec3 travel = p1 - p0;
    const double len = travel.norm();
    if (!(len > 0.0)) throw Error(ErrorKind::DegenerateDirection, "P0 and P1 coincide");
    if (n_samples < 3) throw Error(ErrorKind::InvalidArgument, "need at least 3 curve samples");

    ConfidenceCurve curve;
    curve.center = p1;
    curve.radius = r;
    curve.direction = travel / len;
    // G is orthogonal, so G^-1 = G^T.
    const Eigen::Matrix3d back = givens_to_vertical(curve.direction).transpose();
    curve.sample_points.reserve(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_samples);
        curve.sample_points.push_back(back * Vec3(r * std::cos(t), r * std::sin(t), 0.0) + p1);
    }
    return curve;
}

} // namespace

ConfidenceCurve confidence_curve(const Vec3& p0, const Vec3& p1, double r, int n_samples) {
    if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius must be > 0");
    return circle_about(p0, p1, r, n_samples);
}

std::string_view method_name(PredictionMethod m) noexcept {
    return m == PredictionMethod::Adams ? "adams" : "mlp";
}

TrajectoryPrediction predict_trajectory(const QuadVelocityModel& model, double t0, const Vec3& pos0,
                                        const PredictOptions& options) {
    if (options.steps < 1) throw Error(ErrorKind::InvalidArgument, "steps must be >= 1");
    if (!(options.h > 0.0)) throw Error(ErrorKind::InvalidArgument, "step must be > 0");

    // Each axis is an independent scalar ODE ds/dt = v_d(t, s); integrating the
    // three together is equivalent because the field is axis-decoupled.
    auto field = [&model](double t, const Vec3& p) -> Vec3 { return model.velocity(t, p); };
    const auto sol = integrate_abm4<Vec3>(field, t0, pos0, options.h, options.steps);

    TrajectoryPrediction pred;
    pred.method = PredictionMethod::Adams;
    pred.points.reserve(static_cast<std::size_t>(options.steps));
    for (std::size_t i = 1; i < sol.t.size(); ++i) pred.points.push_back({sol.t[i], sol.y[i]});

    if (options.with_confidence) {
        const auto stats = model.stats();
        Vec3 last_dir = Vec3::UnitZ();
        Vec3 prev = pos0;
        for (const auto& p : pred.points) {
            const double r = confidence_radius(stats, p.pos, options.coverage_multiplier).combined;
            pred.radii.push_back(r);
            // A stalled step has no travel direction; keep the previous plane.
            Vec3 from = prev;
            if ((p.pos - prev).norm() == 0.0) from = p.pos - last_dir;
            // An exact fit has zero residual variance and a zero-radius band.
            auto curve = circle_about(from, p.pos, r, options.curve_samples);
            last_dir = curve.direction;
            pred.curves.push_back(std::move(curve));
            prev = p.pos;
        }
    }
    return pred;
}

} // namespace trajkit
