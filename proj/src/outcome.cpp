#include "impb/outcome.hpp"

#include <algorithm>
#include <cmath>

#include "impb/error.hpp"

namespace impb {

SpaceId space_from_index(std::size_t i) {
    if (i >= kNumSpaces) throw ValidationError("space index out of range: " + std::to_string(i));
    return static_cast<SpaceId>(i);
}

std::string space_label(SpaceId s) { return "Ω" + std::to_string(index_of(s)); }

std::optional<SpaceId> parse_space(std::string_view text) {
    for (std::string_view prefix : {"Ω", "O", "o", "omega", "Omega"}) {
        if (text.starts_with(prefix) && text.size() > prefix.size()) {
            text.remove_prefix(prefix.size());
            break;
        }
    }
    if (text.size() != 1 || text[0] < '0' || text[0] > '5') return std::nullopt;
    return static_cast<SpaceId>(static_cast<std::size_t>(text[0] - '0'));
}

OutcomeVector::OutcomeVector(SpaceId space, std::span<const double> coords) : space_(space) {
    if (coords.size() != dim()) {
        throw ValidationError(space_label(space) + " expects " + std::to_string(dim()) + " coordinates, got " +
                              std::to_string(coords.size()));
    }
    for (double c : coords) {
        if (!std::isfinite(c)) throw ValidationError("outcome coordinates must be finite");
    }
    std::copy(coords.begin(), coords.end(), coords_.begin());
}

OutcomeVector::OutcomeVector(SpaceId space, std::initializer_list<double> coords)
    : OutcomeVector(space, std::span<const double>(coords.begin(), coords.size())) {}

bool OutcomeVector::in_bounds() const {
    return std::ranges::all_of(coords(), [](double c) { return c >= -1.0 && c <= 1.0; });
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double space_diameter(SpaceId s) { return 2.0 * std::sqrt(static_cast<double>(dim_of(s))); }

double normalized_distance(const OutcomeVector& a, const OutcomeVector& b) {
    if (a.space() != b.space()) {
        throw ValidationError("cannot compare outcomes of " + space_label(a.space()) + " and " +
                              space_label(b.space()));
    }
    return std::sqrt(squared_distance(a.coords(), b.coords())) / space_diameter(a.space());
}

}  // namespace impb
