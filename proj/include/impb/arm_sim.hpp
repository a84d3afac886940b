#ifndef IMPB_ARM_SIM_HPP
#define IMPB_ARM_SIM_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "impb/dmp.hpp"
#include "impb/outcome.hpp"

namespace impb {

using Vec3 = std::array<double, 3>;

enum class ObjectId : std::uint8_t { Pen = 0, Joystick1 = 1, Joystick2 = 2 };
inline constexpr std::size_t kNumObjects = 3;

/// Geometry and interaction thresholds of the arm world.
struct WorldConfig {
    double link_length = 0.33;
    std::array<double, kJoints> initial_angles{0.0, 0.0, 0.0};
    double initial_z = 0.5;
    Vec3 pen_home{0.6, 0.0, 0.5};
    Vec3 joystick1_home{-0.5, 0.4, 0.3};
    Vec3 joystick2_home{0.5, 0.4, 0.3};
    double joystick_side = 0.4;  // edge of each joystick's cubic volume
    double grab_radius = 0.05;
    double floor_z = -0.2;       // lowest reachable tip height
    double contact_z = 0.0;      // pen touches the floor at or below this height
    double pen_break_z = -0.3;   // commanded depth that breaks a held pen

    void validate() const;
};

struct WorldState {
    std::array<double, kJoints> angles{};
    double commanded_z = 0.0;
    Vec3 tip{};

    Vec3 pen{};
    std::array<Vec3, 2> joysticks{};
    std::array<bool, kNumObjects> broken{};
    std::optional<ObjectId> held;

    bool has_drawing = false;
    std::array<double, 4> drawing{};  // xa, ya, xb, yb

    // contact segment currently being drawn
    std::size_t segment_points = 0;
    std::array<double, 2> segment_first{};
    std::array<double, 2> segment_last{};

    std::array<double, 2> character{};

    bool pen_functional() const { return !broken[0]; }

    friend bool operator==(const WorldState&, const WorldState&) = default;
};

/// Observable outcomes after each prefix of an executed complex policy.
struct EpisodeTrace {
    PolicyParams policy;
    std::vector<std::vector<OutcomeVector>> prefix_outcomes;  // index k-1 -> after k primitives

    std::size_t entry_count() const;
};

/// Tip position of the planar arm at height z (clamped to the floor).
Vec3 forward_kinematics(const std::array<double, kJoints>& angles, double z, const WorldConfig& world);

class ArmSimulator {
public:
    using SampleObserver = std::function<void(const WorldState&)>;

    explicit ArmSimulator(WorldConfig world = {}, DmpConfig dmp = {});

    const WorldConfig& world() const { return world_; }
    const DmpConfig& dmp() const { return dmp_; }

    WorldState reset() const;

    /// Runs one primitive sample by sample; `observer` sees the state after
    /// every sample.
    WorldState step_primitive(const WorldState& state, const PrimitiveParams& prim,
                              const SampleObserver& observer = {}) const;

    EpisodeTrace execute_policy(const PolicyParams& policy) const;

    std::vector<OutcomeVector> extract_outcomes(const WorldState& state) const;

    /// Joystick position relative to its volume centre, scaled to [-1, 1]^3.
    Vec3 normalized_joystick(const WorldState& state, std::size_t which) const;

private:
    void apply_sample(WorldState& s, const JointSample& sample) const;
    bool inside_volume(const Vec3& p, const Vec3& home) const;
    const Vec3& home_of(ObjectId id) const;
    Vec3 position_of(const WorldState& s, ObjectId id) const;

    WorldConfig world_;
    DmpConfig dmp_;
};

}  // namespace impb

#endif  // IMPB_ARM_SIM_HPP
