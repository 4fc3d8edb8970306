#include "trajkit/local_frame.hpp"

#include <algorithm>
#include <cmath>

namespace trajkit {

LineFit fit_line(std::span<const FlightFrame> frames, double t_ref) {
    if (frames.size() < 2) throw Error(ErrorKind::InsufficientData, "line fit needs at least 2 frames");
    double tbar = 0.0;
    Vec3 pbar = Vec3::Zero();
    for (const auto& f : frames) {
        tbar += f.t;
        pbar += f.pos;
    }
    const double n = static_cast<double>(frames.size());
    tbar /= n;
    pbar /= n;
    double stt = 0.0;
    Vec3 stp = Vec3::Zero();
    for (const auto& f : frames) {
        stt += (f.t - tbar) * (f.t - tbar);
        stp += (f.t - tbar) * (f.pos - pbar);
    }
    LineFit fit;
    fit.t_ref = t_ref;
    fit.vel = stp / stt;
    fit.pos = pbar + fit.vel * (t_ref - tbar);
    return fit;
}

LocalFrame LocalFrame::from_history(std::span<const FlightFrame> history, std::size_t tail) {
    if (history.size() < 2) throw Error(ErrorKind::InsufficientData, "local frame needs at least 2 history frames");
    tail = std::clamp<std::size_t>(tail, 2, history.size());

    const auto head_fit = fit_line(history.first(tail), history.front().t);
    const auto tail_fit = fit_line(history.last(tail), history.back().t);

    LocalFrame lf;
    lf.origin_ = head_fit.pos;
    lf.t_origin_ = history.front().t;
    lf.heading_ = std::atan2(tail_fit.vel.y(), tail_fit.vel.x());
    lf.mirrored_ = history.back().attitude.z() - history.front().attitude.z() < 0.0;
    lf.start_.t = lf.time_to_local(history.back().t);
    lf.start_.pos = lf.to_local(tail_fit.pos);
    lf.start_.vel = lf.vector_to_local(tail_fit.vel);
    return lf;
}

Vec3 LocalFrame::vector_to_local(const Vec3& v) const {
    const double c = std::cos(heading_), s = std::sin(heading_);
    Vec3 out(c * v.x() + s * v.y(), -s * v.x() + c * v.y(), v.z());
    if (mirrored_) out.y() = -out.y();
    return out;
}

Vec3 LocalFrame::vector_to_world(const Vec3& v) const {
    Vec3 in = v;
    if (mirrored_) in.y() = -in.y();
    const double c = std::cos(heading_), s = std::sin(heading_);
    return {c * in.x() - s * in.y(), s * in.x() + c * in.y(), in.z()};
}

Vec3 LocalFrame::to_local(const Vec3& p) const { return vector_to_local(p - origin_); }

Vec3 LocalFrame::to_world(const Vec3& p) const { return vector_to_world(p) + origin_; }

FlightFrame LocalFrame::to_local(const FlightFrame& f) const {
    FlightFrame out = f;
    out.t = time_to_local(f.t);
    out.pos = to_local(f.pos);
    out.vel = vector_to_local(f.vel);
    out.acc = vector_to_local(f.acc);
    return out;
}

std::vector<FlightFrame> LocalFrame::to_local(std::span<const FlightFrame> frames) const {
    std::vector<FlightFrame> out;
    out.reserve(frames.size());
    for (const auto& f : frames) out.push_back(to_local(f));
    return out;
}

} // namespace trajkit
