#include "trajkit/simgen.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace trajkit {

namespace {

constexpr double kMaxTurnAngle = 2.0 * std::numbers::pi / 3.0;

constexpr double kGravity = 9.80665;

struct Kinematics {
    Vec3 pos;
    double heading = 0.0;
    double heading_rate = 0.0;
    double bank = 0.0;  // coordinated-turn roll angle
    double bank_rate = 0.0;
};

// Linear ramp 0 -> 1 over [a, a + len].
double ramp(double t, double a, double len) {
    if (t <= a) return 0.0;
    if (t >= a + len) return 1.0;
    return (t - a) / len;
}
double ramp_rate(double t, double a, double len) { return t > a && t < a + len ? 1.0 / len : 0.0; }

// Straight run from p at heading psi for tau seconds.
Vec3 straight(const Vec3& p, double psi, double speed, double tau) {
    return p + Vec3(speed * std::cos(psi) * tau, speed * std::sin(psi) * tau, 0.0);
}

// Constant-rate arc; omega is signed.
Vec3 arc(const Vec3& p, double psi, double speed, double omega, double tau) {
    const double r = speed / omega;
    return p + Vec3(r * (std::sin(psi + omega * tau) - std::sin(psi)),
                    -r * (std::cos(psi + omega * tau) - std::cos(psi)), 0.0);
}

class Trajectory {
public:
    Trajectory(FlightState state, const KinematicParams& p) : state_(state), p_(p) {
        switch (state) {
        case FlightState::Climb: vz_ = p.climb_rate; break;
        case FlightState::Descent: vz_ = -p.descent_rate; break;
        default: vz_ = 0.0; break;
        }
        const double dir = p.turn_direction >= 0 ? 1.0 : -1.0;
        if (state == FlightState::Turn) {
            omega_ = dir * p.turn_rate;
            arc_len_ = p.turn_angle / p.turn_rate;
        } else if (state == FlightState::Circle) {
            omega_ = dir * p.cruise_speed / p.circle_radius;
        }
    }

    double pitch() const { return std::atan2(vz_, p_.cruise_speed); }

    /// Bank of a coordinated turn at the current heading rate. A circle holds
    /// it throughout; a turn rolls in at the turn start and out at the end.
    void add_bank(double t, Kinematics& k) const {
        const double full = std::atan(p_.cruise_speed * omega_ / kGravity);
        if (state_ == FlightState::Circle) {
            k.bank = full;
        } else if (state_ == FlightState::Turn) {
            const double r = p_.roll_time;
            const double end = p_.turn_start + arc_len_;
            k.bank = full * (ramp(t, p_.turn_start, r) - ramp(t, end, r));
            k.bank_rate = full * (ramp_rate(t, p_.turn_start, r) - ramp_rate(t, end, r));
        }
    }

    Kinematics at(double t) const {
        const double v = p_.cruise_speed;
        const double psi0 = p_.heading;
        Kinematics k;
        Vec3 base = p_.start;
        base.z() += vz_ * t;
        switch (state_) {
        case FlightState::Circle:
            k.pos = arc(base, psi0, v, omega_, t);
            k.heading = psi0 + omega_ * t;
            k.heading_rate = omega_;
            break;
        case FlightState::Turn: {
            const double ts = p_.turn_start;
            if (t < ts) {
                k.pos = straight(base, psi0, v, t);
                k.heading = psi0;
            } else if (t < ts + arc_len_) {
                k.pos = arc(straight(base, psi0, v, ts), psi0, v, omega_, t - ts);
                k.heading = psi0 + omega_ * (t - ts);
                k.heading_rate = omega_;
            } else {
                const Vec3 entry = straight(base, psi0, v, ts);
                const Vec3 exit = arc(entry, psi0, v, omega_, arc_len_);
                const double psi1 = psi0 + omega_ * arc_len_;
                k.pos = straight(exit, psi1, v, t - ts - arc_len_);
                k.heading = psi1;
            }
            break;
        }
        default:
            k.pos = straight(base, psi0, v, t);
            k.heading = psi0;
            break;
        }
        add_bank(t, k);
        return k;
    }

private:
    FlightState state_;
    KinematicParams p_;
    double vz_ = 0.0;
    double omega_ = 0.0;
    double arc_len_ = 0.0;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::InvalidScenario, what);
}

double uniform(std::mt19937_64& rng, const std::array<double, 2>& range) {
    return std::uniform_real_distribution<double>(range[0], range[1])(rng);
}

} // namespace

void validate_scenario(const FlightScenario& s) {
    require(std::isfinite(s.duration) && s.duration > 0.0, "duration must be > 0");
    require(std::isfinite(s.period) && s.period > 0.0, "period must be > 0");
    require(s.duration >= 2.0 * s.period, "duration must span at least 3 ticks");
    const auto& n = s.noise;
    require(n.gps >= 0.0 && n.pressure >= 0.0 && n.gyro >= 0.0 && n.accel >= 0.0, "noise sigma must be >= 0");
    const auto& p = s.params;
    require(std::isfinite(p.cruise_speed) && p.cruise_speed > 0.0, "cruise speed must be > 0");
    require(p.turn_direction == 1 || p.turn_direction == -1, "turn direction must be +1 or -1");
    require(p.start.allFinite() && std::isfinite(p.heading), "start state must be finite");
    switch (s.state) {
    case FlightState::Climb: require(p.climb_rate > 0.0, "climb rate must be > 0"); break;
    case FlightState::Descent: require(p.descent_rate > 0.0, "descent rate must be > 0"); break;
    case FlightState::Turn:
        require(p.turn_rate > 0.0, "turn rate must be > 0");
        require(p.turn_angle > 0.0 && p.turn_angle <= kMaxTurnAngle + 1e-12, "turn angle must be in (0, 120] degrees");
        require(p.turn_start >= 0.0, "turn start must be >= 0");
        require(p.roll_time > 0.0, "roll time must be > 0");
        break;
    case FlightState::Circle: require(p.circle_radius > 0.0, "circle radius must be > 0"); break;
    default: break;
    }
}

GeneratedFlight generate(const FlightScenario& s) {
    validate_scenario(s);
    const Trajectory traj(s.state, s.params);
    const double T = s.period;
    const auto n = static_cast<std::size_t>(std::floor(s.duration / T + 1e-9)) + 1;

    std::mt19937_64 rng(s.seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    auto noise = [&](double sigma) {
        const double z = unit(rng);  // always drawn so the stream layout is noise independent
        return sigma * z;
    };

    GeneratedFlight out;
    out.state = s.state;
    out.raw.period = T;
    out.raw.samples.reserve(n);

    std::vector<double> times(n);
    std::vector<Vec3> pos(n), att(n);
    const double pitch = traj.pitch();
    const double psi0 = s.params.heading;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * T;
        const auto k = traj.at(t);
        times[i] = t;
        pos[i] = k.pos;
        att[i] = Vec3(k.bank, pitch, k.heading - psi0);

        const Vec3 acc = (traj.at(t + T).pos - 2.0 * k.pos + traj.at(t - T).pos) / (T * T);
        RawSample r;
        r.t = t;
        r.x = k.pos.x() + noise(s.noise.gps);
        r.y = k.pos.y() + noise(s.noise.gps);
        r.pressure = pressure_from_altitude(k.pos.z()) + noise(s.noise.pressure);
        r.omega_x = k.bank_rate + noise(s.noise.gyro);
        r.omega_y = noise(s.noise.gyro);
        r.omega_z = k.heading_rate + noise(s.noise.gyro);
        r.accel_x = acc.x() + noise(s.noise.accel);
        r.accel_y = acc.y() + noise(s.noise.accel);
        r.accel_z = acc.z() + noise(s.noise.accel);
        out.raw.samples.push_back(r);
    }
    out.truth = kinematic_frames(times, pos, att, T);
    return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(base) ^ a) ^ (b * 0xd6e8feb86659fd93ULL));
}

std::vector<GeneratedFlight> generate_corpus(const CorpusSpec& spec) {
    for (int c : spec.per_state) require(c >= 1, "every state needs at least one stream");
    std::vector<GeneratedFlight> out;
    for (auto state : kAllStates) {
        const int count = spec.per_state[static_cast<std::size_t>(index_of(state))];
        for (int i = 0; i < count; ++i) {
            const auto seed = derive_seed(spec.seed, static_cast<std::uint64_t>(index_of(state)),
                                          static_cast<std::uint64_t>(i));
            std::mt19937_64 rng(seed);
            const auto& j = spec.jitter;
            FlightScenario sc;
            sc.state = state;
            sc.duration = spec.duration;
            sc.period = spec.period;
            sc.noise = spec.noise;
            auto& p = sc.params;
            p.cruise_speed = uniform(rng, j.speed);
            p.climb_rate = uniform(rng, j.climb_rate);
            p.descent_rate = uniform(rng, j.descent_rate);
            p.turn_rate = uniform(rng, j.turn_rate);
            p.turn_angle = uniform(rng, j.turn_angle);
            p.turn_start = uniform(rng, j.turn_start);
            p.circle_radius = uniform(rng, j.circle_radius);
            p.turn_direction = std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? -1 : 1;
            p.heading = std::uniform_real_distribution<double>(-std::numbers::pi, std::numbers::pi)(rng);
            p.start = Vec3(uniform(rng, j.start_xy), uniform(rng, j.start_xy), uniform(rng, j.altitude));
            sc.seed = rng();
            out.push_back(generate(sc));
        }
    }
    return out;
}

} // namespace trajkit
