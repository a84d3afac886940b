#include "impb/arm_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace impb {

namespace {

double dist3(const Vec3& a, const Vec3& b) { return std::sqrt(squared_distance(a, b)); }

constexpr std::array<ObjectId, kNumObjects> kObjectOrder{ObjectId::Pen, ObjectId::Joystick1, ObjectId::Joystick2};

std::size_t idx(ObjectId id) { return static_cast<std::size_t>(id); }

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

void WorldConfig::validate() const {
    if (!(link_length > 0.0)) throw ValidationError("world.link_length must be positive");
    if (!(joystick_side > 0.0)) throw ValidationError("world.joystick_side must be positive");
    if (!(grab_radius > 0.0)) throw ValidationError("world.grab_radius must be positive");
    if (!(pen_break_z < floor_z)) throw ValidationError("world.pen_break_z must lie below world.floor_z");
    if (!(floor_z <= contact_z)) throw ValidationError("world.contact_z must not lie below world.floor_z");
}

std::size_t EpisodeTrace::entry_count() const {
    std::size_t n = 0;
    for (const auto& v : prefix_outcomes) n += v.size();
    return n;
}

Vec3 forward_kinematics(const std::array<double, kJoints>& angles, double z, const WorldConfig& world) {
    double x = 0.0;
    double y = 0.0;
    double cumulative = 0.0;
    for (double a : angles) {
        cumulative += a;
        x += world.link_length * std::cos(cumulative);
        y += world.link_length * std::sin(cumulative);
    }
    return {x, y, std::max(z, world.floor_z)};
}

ArmSimulator::ArmSimulator(WorldConfig world, DmpConfig dmp) : world_(world), dmp_(dmp) {
    world_.validate();
    dmp_.validate();
}

WorldState ArmSimulator::reset() const {
    WorldState s;
    s.angles = world_.initial_angles;
    s.commanded_z = world_.initial_z;
    s.tip = forward_kinematics(s.angles, s.commanded_z, world_);
    s.pen = world_.pen_home;
    s.joysticks = {world_.joystick1_home, world_.joystick2_home};
    return s;
}

const Vec3& ArmSimulator::home_of(ObjectId id) const {
    switch (id) {
        case ObjectId::Pen: return world_.pen_home;
        case ObjectId::Joystick1: return world_.joystick1_home;
        case ObjectId::Joystick2: break;
    }
    return world_.joystick2_home;
}

Vec3 ArmSimulator::position_of(const WorldState& s, ObjectId id) const {
    if (id == ObjectId::Pen) return s.pen;
    return s.joysticks[idx(id) - 1];
}

bool ArmSimulator::inside_volume(const Vec3& p, const Vec3& home) const {
    const double half = world_.joystick_side / 2.0;
    for (std::size_t i = 0; i < 3; ++i) {
        if (std::abs(p[i] - home[i]) > half) return false;
    }
    return true;
}

Vec3 ArmSimulator::normalized_joystick(const WorldState& state, std::size_t which) const {
    const Vec3& home = which == 0 ? world_.joystick1_home : world_.joystick2_home;
    const double half = world_.joystick_side / 2.0;
    Vec3 out{};
    for (std::size_t i = 0; i < 3; ++i) out[i] = clamp_unit((state.joysticks[which][i] - home[i]) / half);
    return out;
}

void ArmSimulator::apply_sample(WorldState& s, const JointSample& sample) const {
    s.angles = sample.angles;
    s.commanded_z = sample.z;
    s.tip = forward_kinematics(s.angles, s.commanded_z, world_);

    // grab: nearest unbroken object in reach, ties resolved by object order
    if (!s.held) {
        double best = std::numeric_limits<double>::infinity();
        for (ObjectId id : kObjectOrder) {
            if (s.broken[idx(id)]) continue;
            const double d = dist3(s.tip, position_of(s, id));
            if (d <= world_.grab_radius && d < best) {
                best = d;
                s.held = id;
            }
        }
    }

    // held object follows the tip; a joystick leaving its volume springs home
    if (s.held) {
        if (*s.held == ObjectId::Pen) {
            s.pen = s.tip;
        } else {
            const std::size_t j = idx(*s.held) - 1;
            const Vec3& home = home_of(*s.held);
            if (inside_volume(s.tip, home)) {
                s.joysticks[j] = s.tip;
            } else {
                s.joysticks[j] = home;
                s.held.reset();
            }
        }
    }

    // touching a second object breaks both
    if (s.held) {
        for (ObjectId id : kObjectOrder) {
            if (id == *s.held || s.broken[idx(id)]) continue;
            if (dist3(s.tip, position_of(s, id)) <= world_.grab_radius) {
                s.broken[idx(id)] = true;
                s.broken[idx(*s.held)] = true;
                s.held.reset();
                break;
            }
        }
    }

    // forcing the pen into the floor breaks it
    if (s.held == ObjectId::Pen && s.commanded_z <= world_.pen_break_z) {
        s.broken[idx(ObjectId::Pen)] = true;
        s.held.reset();
    }

    const bool drawing_now = s.held == ObjectId::Pen && s.pen_functional() && s.pen[2] <= world_.contact_z;
    if (drawing_now) {
        const std::array<double, 2> p{s.pen[0], s.pen[1]};
        if (s.segment_points == 0) s.segment_first = p;
        s.segment_last = p;
        ++s.segment_points;
    } else if (s.segment_points > 0) {
        if (s.segment_points >= 2) {
            s.has_drawing = true;
            s.drawing = {s.segment_first[0], s.segment_first[1], s.segment_last[0], s.segment_last[1]};
        }
        s.segment_points = 0;
    }
}

WorldState ArmSimulator::step_primitive(const WorldState& state, const PrimitiveParams& prim,
                                        const SampleObserver& observer) const {
    const JointTrajectory traj = integrate_primitive(prim, state.angles, dmp_);
    WorldState s = state;
    for (const JointSample& sample : traj) {
        apply_sample(s, sample);
        if (&sample == &traj.back()) {
            // the character is refreshed once, from whichever joystick is in hand
            if (s.held == ObjectId::Joystick1) s.character[0] = normalized_joystick(s, 0)[0];
            if (s.held == ObjectId::Joystick2) s.character[1] = normalized_joystick(s, 1)[1];
        }
        if (observer) observer(s);
    }
    return s;
}

std::vector<OutcomeVector> ArmSimulator::extract_outcomes(const WorldState& s) const {
    std::vector<OutcomeVector> out;
    out.emplace_back(SpaceId::Tip, std::initializer_list<double>{s.tip[0], s.tip[1], s.tip[2]});

    if (s.held == ObjectId::Pen && s.pen_functional()) {
        out.emplace_back(SpaceId::Pen, std::initializer_list<double>{s.pen[0], s.pen[1], s.pen[2]});
    }

    if (s.pen_functional()) {
        if (s.segment_points >= 2) {
            out.emplace_back(SpaceId::Drawing, std::initializer_list<double>{s.segment_first[0], s.segment_first[1],
                                                                             s.segment_last[0], s.segment_last[1]});
        } else if (s.has_drawing) {
            out.emplace_back(SpaceId::Drawing, s.drawing);
        }
    }

    if (s.held == ObjectId::Joystick1) {
        const Vec3 j = normalized_joystick(s, 0);
        out.emplace_back(SpaceId::Joystick1, j);
    }
    if (s.held == ObjectId::Joystick2) {
        const Vec3 j = normalized_joystick(s, 1);
        out.emplace_back(SpaceId::Joystick2, j);
    }

    if (s.character[0] != 0.0 || s.character[1] != 0.0) {
        out.emplace_back(SpaceId::Character, s.character);
    }
    return out;
}

EpisodeTrace ArmSimulator::execute_policy(const PolicyParams& policy) const {
    EpisodeTrace trace{policy, {}};
    trace.prefix_outcomes.reserve(policy.size());
    WorldState s = reset();
    for (const auto& prim : policy.primitives()) {
        s = step_primitive(s, prim);
        trace.prefix_outcomes.push_back(extract_outcomes(s));
    }
    return trace;
}

}  // namespace impb
