#include "trajkit/telemetry.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace trajkit {

namespace {

constexpr double kPeriodTolerance = 1e-9;

constexpr std::array<double RawSample::*, kNumChannels> kChannelMembers{
    &RawSample::x,       &RawSample::y,       &RawSample::pressure,
    &RawSample::omega_x, &RawSample::omega_y, &RawSample::omega_z,
    &RawSample::accel_x, &RawSample::accel_y, &RawSample::accel_z};

} // namespace

std::string_view channel_name(Channel c) noexcept {
    constexpr std::array<std::string_view, kNumChannels> names{
        "x", "y", "pressure", "wx", "wy", "wz", "ax", "ay", "az"};
    return names[static_cast<std::size_t>(c)];
}

double& channel_ref(RawSample& s, Channel c) noexcept {
    return s.*kChannelMembers[static_cast<std::size_t>(c)];
}

double channel_value(const RawSample& s, Channel c) noexcept {
    return s.*kChannelMembers[static_cast<std::size_t>(c)];
}

std::string_view action_name(RepairAction a) noexcept {
    switch (a) {
    case RepairAction::Rejected: return "rejected";
    case RepairAction::Interpolated: return "interpolated";
    case RepairAction::Filtered: return "filtered";
    }
    return "?";
}

double validate_stream(std::span<const RawSample> samples) {
    if (samples.empty()) throw Error(ErrorKind::InsufficientData, "empty stream");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!(s.pressure > 0.0))
            throw Error(ErrorKind::NonphysicalPressure, "pressure <= 0 at row " + std::to_string(i));
        for (int c = 0; c < kNumChannels; ++c) {
            if (!std::isfinite(channel_value(s, static_cast<Channel>(c))) || !std::isfinite(s.t))
                throw Error(ErrorKind::InvalidData, "non-finite value at row " + std::to_string(i));
        }
    }
    if (samples.size() < 2) return 0.0;
    const double period = samples[1].t - samples[0].t;
    if (!(period > 0.0)) throw Error(ErrorKind::InvalidData, "timestamps not strictly increasing");
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double dt = samples[i].t - samples[i - 1].t;
        if (!(dt > 0.0))
            throw Error(ErrorKind::InvalidData, "timestamps not strictly increasing at row " + std::to_string(i));
        if (std::abs(dt - period) > kPeriodTolerance)
            throw Error(ErrorKind::InvalidData, "irregular sample period at row " + std::to_string(i));
    }
    return period;
}

OutlierResult reject_outliers(std::span<const double> series, double sigma_k) {
    if (series.size() < 4)
        throw Error(ErrorKind::InsufficientData, "outlier rejection needs at least 4 samples");
    if (!(sigma_k > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma multiplier must be > 0");

    const double n = static_cast<double>(series.size());
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : series) ss += (v - mean) * (v - mean);
    const double sigma = std::sqrt(ss / n);

    OutlierResult out;
    out.kept.reserve(series.size());
    const double lo = mean - sigma_k * sigma;
    const double hi = mean + sigma_k * sigma;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double v = series[i];
        // A constant series has sigma == 0 and an empty open interval; nothing
        // can deviate from it, so it is kept whole.
        if (sigma > 0.0 && !(v > lo && v < hi)) {
            out.kept.emplace_back(std::nullopt);
            out.flagged.push_back(i);
        } else {
            out.kept.emplace_back(v);
        }
    }
    return out;
}

std::array<std::size_t, 4> nearest_survivors(std::span<const double> times,
                                             std::span<const std::optional<double>> values,
                                             std::size_t index) {
    std::array<std::size_t, 4> picked{};
    std::size_t count = 0;
    // Expand outward from `index`, taking the closer side first and the earlier
    // side on a tie.
    std::ptrdiff_t left = static_cast<std::ptrdiff_t>(index) - 1;
    std::size_t right = index + 1;
    const double tq = times[index];
    auto next_left = [&] {
        while (left >= 0 && !values[static_cast<std::size_t>(left)]) --left;
    };
    auto next_right = [&] {
        while (right < values.size() && !values[right]) ++right;
    };
    if (values[index]) picked[count++] = index;
    next_left();
    next_right();
    while (count < 4) {
        const bool has_left = left >= 0;
        const bool has_right = right < values.size();
        if (!has_left && !has_right) break;
        bool take_left = has_left;
        if (has_left && has_right) {
            const double dl = tq - times[static_cast<std::size_t>(left)];
            const double dr = times[right] - tq;
            take_left = dl <= dr;
        }
        if (take_left) {
            picked[count++] = static_cast<std::size_t>(left--);
            next_left();
        } else {
            picked[count++] = right++;
            next_right();
        }
    }
    if (count < 4) throw Error(ErrorKind::InsufficientData, "fewer than 4 surviving samples");
    std::sort(picked.begin(), picked.end());
    return picked;
}

std::vector<double> adaptive_smooth(std::span<const double> series, double m) {
    if (!(m >= 0.0 && m <= 1.0))
        throw Error(ErrorKind::InvalidCoefficient, "smoothing coefficient must lie in [0, 1]");
    return adaptive_smooth(series, fixed_smoothing(m));
}

SmoothingPolicy fixed_smoothing(double m) {
    return [m](std::size_t, double, double) { return m; };
}

std::vector<double> adaptive_smooth(std::span<const double> series, const SmoothingPolicy& policy) {
    if (series.empty()) throw Error(ErrorKind::InsufficientData, "empty series");
    std::vector<double> out(series.size());
    out[0] = series[0];
    for (std::size_t n = 1; n < series.size(); ++n) {
        const double m = policy(n, series[n], out[n - 1]);
        if (!(m >= 0.0 && m <= 1.0))
            throw Error(ErrorKind::InvalidCoefficient, "smoothing coefficient must lie in [0, 1]");
        out[n] = m * series[n] + (1.0 - m) * out[n - 1];
    }
    return out;
}

CleanStream preprocess(const RawStream& stream, const PreprocessConfig& config) {
    const auto& raw = stream.samples;
    if (raw.size() < 4)
        throw Error(ErrorKind::InsufficientData, "preprocess needs at least 4 samples");
    const double period = validate_stream(raw);

    SmoothingPolicy policy = config.policy;
    if (!policy) {
        if (!(config.smoothing >= 0.0 && config.smoothing <= 1.0))
            throw Error(ErrorKind::InvalidCoefficient, "smoothing coefficient must lie in [0, 1]");
        policy = fixed_smoothing(config.smoothing);
    }

    CleanStream clean;
    clean.samples = raw;
    clean.period = period;

    std::vector<double> times(raw.size());
    std::transform(raw.begin(), raw.end(), times.begin(), [](const RawSample& s) { return s.t; });

    std::vector<double> series(raw.size());
    for (int ci = 0; ci < kNumChannels; ++ci) {
        const auto channel = static_cast<Channel>(ci);
        try {
            for (std::size_t i = 0; i < raw.size(); ++i) series[i] = channel_value(raw[i], channel);

            auto outliers = reject_outliers(series, config.sigma_k);
            std::vector<double> repaired = series;
            for (std::size_t idx : outliers.flagged) {
                const auto nb = nearest_survivors(times, outliers.kept, idx);
                std::array<Node<double>, 4> nodes{};
                for (std::size_t k = 0; k < 4; ++k) nodes[k] = {times[nb[k]], *outliers.kept[nb[k]]};
                // Gaps at either end of the stream have survivors on one side only.
                repaired[idx] = newton_interpolate(nodes, times[idx], /*allow_extrapolation=*/true);
                clean.repair_log.push_back({idx, channel, RepairAction::Rejected});
                clean.repair_log.push_back({idx, channel, RepairAction::Interpolated});
            }

            auto smoothed = adaptive_smooth(repaired, policy);
            for (std::size_t i = 0; i < smoothed.size(); ++i) {
                if (smoothed[i] != repaired[i]) {
                    clean.repair_log.push_back({i, channel, RepairAction::Filtered});
                    break;
                }
            }
            for (std::size_t i = 0; i < raw.size(); ++i) channel_ref(clean.samples[i], channel) = smoothed[i];
        } catch (const Error& e) {
            throw Error(e.kind(), "channel " + std::string(channel_name(channel)) + ": " + e.what());
        }
    }
    return clean;
}

} // namespace trajkit
