#ifndef IMPB_OUTCOME_HPP
#define IMPB_OUTCOME_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace impb {

/// The six task spaces: tip pose, pen pose, drawing endpoints, joystick 1 and
/// 2 poses, video-game character position.
enum class SpaceId : std::size_t { Tip = 0, Pen = 1, Drawing = 2, Joystick1 = 3, Joystick2 = 4, Character = 5 };

inline constexpr std::size_t kNumSpaces = 6;
inline constexpr std::size_t kMaxOutcomeDim = 4;
inline constexpr std::array<std::size_t, kNumSpaces> kSpaceDims{3, 3, 4, 3, 3, 2};

constexpr std::size_t index_of(SpaceId s) { return static_cast<std::size_t>(s); }
constexpr std::size_t dim_of(SpaceId s) { return kSpaceDims[index_of(s)]; }
SpaceId space_from_index(std::size_t i);

/// "Ω3" style label used in files and on the command line.
std::string space_label(SpaceId s);
/// Accepts "Ω3", "O3", "omega3" or "3".
std::optional<SpaceId> parse_space(std::string_view text);

/// A point of one task space. Coordinates beyond dim() are zero.
class OutcomeVector {
public:
    OutcomeVector() = default;
    OutcomeVector(SpaceId space, std::span<const double> coords);
    OutcomeVector(SpaceId space, std::initializer_list<double> coords);

    SpaceId space() const { return space_; }
    std::size_t dim() const { return dim_of(space_); }
    double operator[](std::size_t i) const { return coords_[i]; }
    std::span<const double> coords() const { return {coords_.data(), dim()}; }

    /// True when every coordinate lies in [-1, 1].
    bool in_bounds() const;

    friend bool operator==(const OutcomeVector&, const OutcomeVector&) = default;

private:
    SpaceId space_ = SpaceId::Tip;
    std::array<double, kMaxOutcomeDim> coords_{};
};

/// An ordered pair of subtasks (first then second), possibly from different spaces.
struct Procedure {
    OutcomeVector first;
    OutcomeVector second;

    friend bool operator==(const Procedure&, const Procedure&) = default;
};

/// Sum of squared coordinate differences, accumulated in coordinate order.
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Diameter of the [-1, 1]^dim box.
double space_diameter(SpaceId s);

/// Euclidean distance divided by the box diameter; throws on mismatched spaces.
double normalized_distance(const OutcomeVector& a, const OutcomeVector& b);

}  // namespace impb

#endif  // IMPB_OUTCOME_HPP
