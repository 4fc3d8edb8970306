#include "trajkit/fusion.hpp"

#include <algorithm>
#include <array>

namespace trajkit {

namespace {

std::vector<Vec3> backward_difference(std::span<const Vec3> series, double period) {
    if (series.size() < 2) throw Error(ErrorKind::InsufficientData, "difference needs at least 2 samples");
    if (!(period > 0.0)) throw Error(ErrorKind::InvalidArgument, "period must be > 0");
    std::vector<Vec3> out(series.size());
    for (std::size_t k = 1; k < series.size(); ++k) out[k] = (series[k] - series[k - 1]) / period;
    out[0] = out[1];
    return out;
}

} // namespace

std::vector<Vec3> velocity(std::span<const Vec3> pos, double period) {
    return backward_difference(pos, period);
}

std::vector<Vec3> acceleration(std::span<const Vec3> vel, double period) {
    return backward_difference(vel, period);
}

std::vector<Vec3> attitude(std::span<const Vec3> omega, const Vec3& theta0, double period) {
    if (!(period > 0.0)) throw Error(ErrorKind::InvalidArgument, "period must be > 0");
    std::vector<Vec3> out(omega.size());
    if (omega.empty()) return out;
    out[0] = theta0;
    for (std::size_t n = 1; n < omega.size(); ++n) out[n] = out[n - 1] + omega[n] * period;
    return out;
}

std::vector<FlightFrame> kinematic_frames(std::span<const double> times, std::span<const Vec3> pos,
                                          std::span<const Vec3> att, double period) {
    const std::size_t n = pos.size();
    if (n < 2) throw Error(ErrorKind::InsufficientData, "kinematics need at least 2 samples");
    if (times.size() != n || att.size() != n) throw Error(ErrorKind::DimensionError, "series lengths differ");

    const auto vel = velocity(pos, period);
    auto acc = acceleration(vel, period);
    // The second difference is first defined at tick 2; ticks 0 and 1 copy it.
    if (n >= 3) acc[0] = acc[1] = acc[2];

    std::vector<FlightFrame> frames(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& f = frames[i];
        f.t = times[i];
        f.pos = pos[i];
        f.vel = vel[i];
        f.attitude = att[i];
        f.acc = acc[i];
        f.speed_mag = vel[i].norm();
        f.acc_mag = acc[i].norm();
    }
    if (n >= 3) {
        for (std::size_t k = 1; k + 1 < n; ++k) {
            try {
                frames[k].curvature = curvature3(pos[k - 1], pos[k], pos[k + 1]);
            } catch (const Error&) {
                frames[k].curvature = 0.0;  // stationary: no defined turning circle
            }
        }
        frames[0].curvature = frames[1].curvature;
        frames[n - 1].curvature = frames[n - 2].curvature;
    }
    return frames;
}

std::vector<FlightFrame> fuse(const CleanStream& clean, const Vec3& theta0) {
    const auto& s = clean.samples;
    if (s.size() < 2) throw Error(ErrorKind::InsufficientData, "fusion needs at least 2 samples");

    const std::size_t n = s.size();
    std::vector<double> times(n);
    std::vector<Vec3> pos(n), omega(n);
    for (std::size_t i = 0; i < n; ++i) {
        times[i] = s[i].t;
        pos[i] = Vec3(s[i].x, s[i].y, altitude_from_pressure(s[i].pressure));
        omega[i] = Vec3(s[i].omega_x, s[i].omega_y, s[i].omega_z);
    }
    const auto att = attitude(omega, theta0, clean.period);
    return kinematic_frames(times, pos, att, clean.period);
}

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = [] {
        constexpr std::array<const char*, kFeatureChannels> channels{
            "x", "y", "z", "vx", "vy", "vz", "thx", "thy", "thz", "ax", "ay", "az", "k", "speed", "acc"};
        constexpr std::array<const char*, kFeatureStats> stats{"mean", "var", "max", "min", "range"};
        std::vector<std::string> out;
        out.reserve(kFeatureCount);
        for (auto c : channels)
            for (auto st : stats) out.push_back(std::string(c) + "_" + st);
        return out;
    }();
    return names;
}

Eigen::Matrix<double, kFeatureChannels, 1> frame_channels(const FlightFrame& f) {
    Eigen::Matrix<double, kFeatureChannels, 1> c;
    c << f.pos, f.vel, f.attitude, f.acc, f.curvature, f.speed_mag, f.acc_mag;
    return c;
}

FeatureVector window_feature(std::span<const FlightFrame> frames, std::size_t start, std::size_t len) {
    if (len < 2) throw Error(ErrorKind::InsufficientData, "window length must be >= 2");
    if (start + len > frames.size()) throw Error(ErrorKind::InsufficientData, "window exceeds frame count");

    Eigen::Matrix<double, kFeatureChannels, Eigen::Dynamic> block(kFeatureChannels, static_cast<Eigen::Index>(len));
    for (std::size_t i = 0; i < len; ++i) block.col(static_cast<Eigen::Index>(i)) = frame_channels(frames[start + i]);

    const Eigen::Matrix<double, kFeatureChannels, 1> mean = block.rowwise().mean();
    const Eigen::Matrix<double, kFeatureChannels, 1> var =
        (block.colwise() - mean).array().square().rowwise().mean();
    const Eigen::Matrix<double, kFeatureChannels, 1> mx = block.rowwise().maxCoeff();
    const Eigen::Matrix<double, kFeatureChannels, 1> mn = block.rowwise().minCoeff();

    FeatureVector fv;
    fv.window_start = start;
    for (int c = 0; c < kFeatureChannels; ++c) {
        fv.values(c * kFeatureStats + 0) = mean(c);
        fv.values(c * kFeatureStats + 1) = var(c);
        fv.values(c * kFeatureStats + 2) = mx(c);
        fv.values(c * kFeatureStats + 3) = mn(c);
        fv.values(c * kFeatureStats + 4) = mx(c) - mn(c);
    }
    return fv;
}

std::vector<FeatureVector> window_features(std::span<const FlightFrame> frames, const WindowConfig& config) {
    if (config.window_len < 2) throw Error(ErrorKind::InsufficientData, "window length must be >= 2");
    if (config.stride < 1) throw Error(ErrorKind::InvalidArgument, "stride must be >= 1");
    if (frames.size() < config.window_len)
        throw Error(ErrorKind::InsufficientData, "not enough frames for one window");
    std::vector<FeatureVector> out;
    for (std::size_t start = 0; start + config.window_len <= frames.size(); start += config.stride)
        out.push_back(window_feature(frames, start, config.window_len));
    return out;
}

} // namespace trajkit
