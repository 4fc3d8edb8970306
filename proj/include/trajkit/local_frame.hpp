// local_frame.hpp
#ifndef TRAJKIT_LOCAL_FRAME_HPP_
#define TRAJKIT_LOCAL_FRAME_HPP_

#include "trajkit/core.hpp"
#include "trajkit/fusion.hpp"
#include "trajkit/mlp.hpp"

#include <span>
#include <vector>

namespace trajkit {

/// Least-squares straight-line fit p(t) = p_ref + v (t - t_ref) over a run of
/// frames, reported at t_ref.
struct LineFit {
    double t_ref = 0.0;
    Vec3 pos = Vec3::Zero();
    Vec3 vel = Vec3::Zero();
};
LineFit fit_line(std::span<const FlightFrame> frames, double t_ref);

/// Track-aligned frame built from an observed history: the origin is the
/// smoothed position at the first history tick, +x points along the
/// horizontal track at the last tick, and y is mirrored when the history
/// turns clockwise so that every observed turn is counter-clockwise. Time is
/// measured from the first history tick. All maps are isometries.
class LocalFrame {
public:
    static LocalFrame from_history(std::span<const FlightFrame> history, std::size_t tail = 10);

    Vec3 to_local(const Vec3& p) const;
    Vec3 to_world(const Vec3& p) const;
    Vec3 vector_to_local(const Vec3& v) const;
    Vec3 vector_to_world(const Vec3& v) const;
    double time_to_local(double t) const { return t - t_origin_; }
    double time_to_world(double t) const { return t + t_origin_; }

    FlightFrame to_local(const FlightFrame& f) const;
    std::vector<FlightFrame> to_local(std::span<const FlightFrame> frames) const;

    /// Smoothed motion state at the last history tick, in local coordinates.
    const MotionState& start() const { return start_; }

    double heading() const { return heading_; }
    bool mirrored() const { return mirrored_; }

private:
    Vec3 origin_ = Vec3::Zero();
    double t_origin_ = 0.0;
    double heading_ = 0.0;
    bool mirrored_ = false;
    MotionState start_;
};

} // namespace trajkit

#endif // TRAJKIT_LOCAL_FRAME_HPP_
