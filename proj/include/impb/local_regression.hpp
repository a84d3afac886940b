#ifndef IMPB_LOCAL_REGRESSION_HPP
#define IMPB_LOCAL_REGRESSION_HPP

#include <optional>
#include <span>
#include <vector>

namespace impb {

/// A neighbourhood sample for local linear regression: input x, output y.
struct LocalSample {
    std::vector<double> input;
    std::vector<double> output;
};

/// Fits y ~= y0 + J (x - x0) around `base` from the neighbour differences
/// (minimum-norm least squares), then returns the input step that moves the
/// base output onto `target`: x0 + pinv(J) (target - y0). The step's
/// Euclidean norm is capped at `max_step` when positive.
///
/// Returns nullopt when the neighbourhood carries no usable information
/// (fewer than one informative difference, or J of rank zero).
std::optional<std::vector<double>> local_linear_step(const LocalSample& base, std::span<const LocalSample> neighbours,
                                                     std::span<const double> target, double max_step = 0.0);

}  // namespace impb

#endif  // IMPB_LOCAL_REGRESSION_HPP
