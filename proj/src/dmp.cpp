#include "impb/dmp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace impb {

namespace {

void check_unit_range(double v, const char* what) {
    if (!std::isfinite(v) || v < -1.0 || v > 1.0) {
        throw ValidationError(std::string(what) + " must be a finite value in [-1, 1], got " + std::to_string(v));
    }
}

}  // namespace

PrimitiveParams::PrimitiveParams(const std::array<double, kPrimitiveDim>& values) : values_(values) {
    for (double v : values_) check_unit_range(v, "primitive parameter");
}

PrimitiveParams PrimitiveParams::from_span(std::span<const double> values) {
    if (values.size() != kPrimitiveDim) {
        throw ValidationError("primitive needs 13 parameters, got " + std::to_string(values.size()));
    }
    std::array<double, kPrimitiveDim> a{};
    std::copy(values.begin(), values.end(), a.begin());
    return PrimitiveParams(a);
}

PolicyParams::PolicyParams(std::vector<PrimitiveParams> primitives) : primitives_(std::move(primitives)) {
    if (primitives_.empty()) throw ValidationError("a policy needs at least one primitive");
}

PolicyParams PolicyParams::from_flat(std::span<const double> flat) {
    if (flat.empty() || flat.size() % kPrimitiveDim != 0) {
        throw ValidationError("flattened policy length must be a positive multiple of 13, got " +
                              std::to_string(flat.size()));
    }
    std::vector<PrimitiveParams> prims;
    prims.reserve(flat.size() / kPrimitiveDim);
    for (std::size_t i = 0; i < flat.size(); i += kPrimitiveDim) {
        prims.push_back(PrimitiveParams::from_span(flat.subspan(i, kPrimitiveDim)));
    }
    return PolicyParams(std::move(prims));
}

PolicyParams PolicyParams::prefix(std::size_t k) const {
    if (k == 0 || k > size()) throw ValidationError("prefix length out of range");
    return PolicyParams(std::vector<PrimitiveParams>(primitives_.begin(), primitives_.begin() + static_cast<long>(k)));
}

std::vector<double> PolicyParams::flatten() const {
    std::vector<double> out;
    out.reserve(size() * kPrimitiveDim);
    for (const auto& p : primitives_) out.insert(out.end(), p.values().begin(), p.values().end());
    return out;
}

PolicyParams concat(const PolicyParams& first, const PolicyParams& second) {
    std::vector<PrimitiveParams> prims = first.primitives();
    prims.insert(prims.end(), second.primitives().begin(), second.primitives().end());
    return PolicyParams(std::move(prims));
}

std::size_t DmpConfig::steps() const {
    const double ratio = duration / dt;
    return static_cast<std::size_t>(std::llround(ratio));
}

std::array<double, kWeightsPerJoint> DmpConfig::centers() const {
    std::array<double, kWeightsPerJoint> c{};
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::exp(-phase_decay * basis_times[i]);
    return c;
}

std::array<double, kWeightsPerJoint> DmpConfig::widths() const {
    const auto c = centers();
    std::array<double, kWeightsPerJoint> h{};
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        const double gap = c[i + 1] - c[i];
        h[i] = 1.0 / (2.0 * gap * gap);
    }
    h.back() = h[h.size() - 2];
    return h;
}

void DmpConfig::validate() const {
    const auto positive = [](double v, const char* key) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(key) + " must be finite and positive");
    };
    positive(spring, "dmp.spring");
    positive(phase_decay, "dmp.phase_decay");
    positive(duration, "dmp.duration");
    positive(dt, "dmp.dt");
    if (!(damping >= 0.0) || !std::isfinite(damping)) throw ValidationError("dmp.damping must be finite and non-negative");
    if (!std::isfinite(weight_scale)) throw ValidationError("dmp.weight_scale must be finite");
    const double ratio = duration / dt;
    if (ratio < 1.0 || std::abs(ratio - std::round(ratio)) > 1e-9) {
        throw ValidationError("dmp.duration / dmp.dt must be a positive integer");
    }
    for (std::size_t i = 0; i + 1 < basis_times.size(); ++i) {
        if (!(basis_times[i] < basis_times[i + 1])) throw ValidationError("dmp.basis_times must be increasing");
    }
}

double to_joint_angle(double normalized) { return normalized * std::numbers::pi; }

std::vector<double> phase_profile(const DmpConfig& cfg) {
    const std::size_t n = cfg.steps();
    std::vector<double> s(n + 1);
    s[0] = 1.0;
    for (std::size_t k = 0; k < n; ++k) s[k + 1] = s[k] - cfg.dt * cfg.phase_decay * s[k] / cfg.duration;
    return s;
}

JointTrajectory integrate_primitive(const PrimitiveParams& params, const std::array<double, kJoints>& start_angles,
                                    const DmpConfig& cfg) {
    for (double a : start_angles) {
        if (!std::isfinite(a)) throw ValidationError("start angles must be finite");
    }
    const std::size_t n = cfg.steps();
    const auto c = cfg.centers();
    const auto h = cfg.widths();
    const double z = params.z();

    JointTrajectory traj(n + 1);
    traj[0].angles = start_angles;
    traj[0].z = z;

    for (std::size_t j = 0; j < kJoints; ++j) {
        const double goal = to_joint_angle(params.goal(j));
        const double x0 = start_angles[j];
        std::array<double, kWeightsPerJoint> w{};
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = cfg.weight_scale * params.weight(j, i);

        double x = x0;
        double v = 0.0;
        double s = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            double num = 0.0;
            double den = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                const double psi = std::exp(-h[i] * (s - c[i]) * (s - c[i]));
                num += w[i] * psi;
                den += psi;
            }
            const double forcing = num * s / den;
            const double acc = (cfg.spring * (goal - x) - cfg.damping * v + (goal - x0) * forcing) / cfg.duration;
            const double x_next = x + cfg.dt * v / cfg.duration;
            v = v + cfg.dt * acc;
            x = x_next;
            s = s - cfg.dt * cfg.phase_decay * s / cfg.duration;
            traj[k + 1].angles[j] = x;
        }
    }
    for (std::size_t k = 1; k <= n; ++k) traj[k].z = z;
    return traj;
}

JointTrajectory execute_policy_kinematics(const PolicyParams& policy, const std::array<double, kJoints>& initial_angles,
                                          const DmpConfig& cfg) {
    const std::size_t n = cfg.steps();
    JointTrajectory out;
    out.reserve(policy.size() * n + 1);
    std::array<double, kJoints> start = initial_angles;
    for (std::size_t p = 0; p < policy.size(); ++p) {
        JointTrajectory seg = integrate_primitive(policy[p], start, cfg);
        if (p == 0) {
            out.insert(out.end(), seg.begin(), seg.end());
        } else {
            out.back().z = seg.front().z;
            out.insert(out.end(), seg.begin() + 1, seg.end());
        }
        start = seg.back().angles;
    }
    return out;
}

}  // namespace impb
