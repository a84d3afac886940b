#include "impb/local_regression.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "impb/error.hpp"

namespace impb {

namespace {

constexpr double kRankTolerance = 1e-9;

}  // namespace

std::optional<std::vector<double>> local_linear_step(const LocalSample& base, std::span<const LocalSample> neighbours,
                                                     std::span<const double> target, double max_step) {
    const auto in_dim = static_cast<Eigen::Index>(base.input.size());
    const auto out_dim = static_cast<Eigen::Index>(base.output.size());
    if (static_cast<Eigen::Index>(target.size()) != out_dim) throw ValidationError("target dimension mismatch");

    std::vector<const LocalSample*> used;
    for (const LocalSample& n : neighbours) {
        if (static_cast<Eigen::Index>(n.input.size()) != in_dim || static_cast<Eigen::Index>(n.output.size()) != out_dim) {
            throw ValidationError("neighbour dimension mismatch");
        }
        bool differs = false;
        for (Eigen::Index i = 0; i < in_dim; ++i) differs |= n.input[i] != base.input[i];
        if (differs) used.push_back(&n);
    }
    if (used.empty()) return std::nullopt;

    const auto m = static_cast<Eigen::Index>(used.size());
    Eigen::MatrixXd dx(in_dim, m);
    Eigen::MatrixXd dy(out_dim, m);
    for (Eigen::Index c = 0; c < m; ++c) {
        for (Eigen::Index i = 0; i < in_dim; ++i) dx(i, c) = used[c]->input[i] - base.input[i];
        for (Eigen::Index i = 0; i < out_dim; ++i) dy(i, c) = used[c]->output[i] - base.output[i];
    }

    // J = dy * pinv(dx), solved as the min-norm least-squares problem dx^T J^T = dy^T
    constexpr unsigned kThin = Eigen::ComputeThinU | Eigen::ComputeThinV;
    Eigen::JacobiSVD<Eigen::MatrixXd> dx_svd(dx.transpose(), kThin);
    dx_svd.setThreshold(kRankTolerance);
    if (dx_svd.rank() == 0) return std::nullopt;
    const Eigen::MatrixXd jacobian = dx_svd.solve(dy.transpose()).transpose();

    Eigen::JacobiSVD<Eigen::MatrixXd> j_svd(jacobian, kThin);
    j_svd.setThreshold(kRankTolerance);
    if (j_svd.rank() == 0) return std::nullopt;

    Eigen::VectorXd residual(out_dim);
    for (Eigen::Index i = 0; i < out_dim; ++i) residual[i] = target[i] - base.output[i];
    Eigen::VectorXd step = j_svd.solve(residual);
    if (!step.allFinite()) return std::nullopt;

    if (max_step > 0.0) {
        const double norm = step.norm();
        if (norm > max_step) step *= max_step / norm;
    }

    std::vector<double> out(base.input);
    for (Eigen::Index i = 0; i < in_dim; ++i) out[i] += step[i];
    return out;
}

}  // namespace impb
