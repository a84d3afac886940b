#ifndef IMPB_DMP_HPP
#define IMPB_DMP_HPP

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "impb/error.hpp"

namespace impb {

inline constexpr std::size_t kJoints = 3;
inline constexpr std::size_t kWeightsPerJoint = 3;
inline constexpr std::size_t kParamsPerJoint = kWeightsPerJoint + 1;
inline constexpr std::size_t kPrimitiveDim = kJoints * kParamsPerJoint + 1;  // 13

/// One primitive motor command: per joint (w0, w1, w2, goal), then the fixed
/// vertical position z. Every component lies in [-1, 1].
class PrimitiveParams {
public:
    PrimitiveParams() = default;  // all zeros
    explicit PrimitiveParams(const std::array<double, kPrimitiveDim>& values);
    static PrimitiveParams from_span(std::span<const double> values);

    double weight(std::size_t joint, std::size_t k) const { return values_[joint * kParamsPerJoint + k]; }
    double goal(std::size_t joint) const { return values_[joint * kParamsPerJoint + kWeightsPerJoint]; }
    double z() const { return values_[kPrimitiveDim - 1]; }

    const std::array<double, kPrimitiveDim>& values() const { return values_; }

    friend bool operator==(const PrimitiveParams&, const PrimitiveParams&) = default;

private:
    std::array<double, kPrimitiveDim> values_{};
};

/// A complex policy: primitives executed back to back without resetting the arm.
class PolicyParams {
public:
    explicit PolicyParams(std::vector<PrimitiveParams> primitives);
    explicit PolicyParams(PrimitiveParams single) : PolicyParams(std::vector<PrimitiveParams>{single}) {}

    /// Rebuilds a policy from 13*n flattened values.
    static PolicyParams from_flat(std::span<const double> flat);

    std::size_t size() const { return primitives_.size(); }
    const std::vector<PrimitiveParams>& primitives() const { return primitives_; }
    const PrimitiveParams& operator[](std::size_t i) const { return primitives_[i]; }

    /// First k primitives, 1 <= k <= size().
    PolicyParams prefix(std::size_t k) const;

    std::vector<double> flatten() const;

    friend bool operator==(const PolicyParams&, const PolicyParams&) = default;

private:
    std::vector<PrimitiveParams> primitives_;
};

PolicyParams concat(const PolicyParams& first, const PolicyParams& second);

struct DmpConfig {
    double spring = 100.0;        // K
    double damping = 20.0;        // D, critically damped for K = 100
    double phase_decay = 8.0;     // alpha
    double duration = 1.0;        // tau
    double dt = 0.01;
    double weight_scale = 20.0;   // W
    /// Basis centres are placed at these fractions of the primitive duration.
    std::array<double, kWeightsPerJoint> basis_times{0.25, 0.5, 0.75};

    std::size_t steps() const;
    std::array<double, kWeightsPerJoint> centers() const;
    std::array<double, kWeightsPerJoint> widths() const;
    void validate() const;
};

/// Maps a normalized value in [-1, 1] to a joint angle in [-pi, pi].
double to_joint_angle(double normalized);

struct JointSample {
    std::array<double, kJoints> angles{};
    double z = 0.0;  // commanded vertical position, constant within a primitive

    friend bool operator==(const JointSample&, const JointSample&) = default;
};

using JointTrajectory = std::vector<JointSample>;

/// Integrates one primitive from `start_angles`; returns steps()+1 samples,
/// sample 0 being the start state at the primitive's own z.
JointTrajectory integrate_primitive(const PrimitiveParams& params,
                                    const std::array<double, kJoints>& start_angles,
                                    const DmpConfig& cfg);

/// Phase values s_0..s_steps used by the integrator (s_0 = 1).
std::vector<double> phase_profile(const DmpConfig& cfg);

/// Chains every primitive of the policy; length n*steps()+1. The sample shared
/// between primitives k and k+1 carries primitive k+1's z.
JointTrajectory execute_policy_kinematics(const PolicyParams& policy,
                                          const std::array<double, kJoints>& initial_angles,
                                          const DmpConfig& cfg);

}  // namespace impb

#endif  // IMPB_DMP_HPP
