#ifndef IMPB_INTEREST_HPP
#define IMPB_INTEREST_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "impb/outcome.hpp"
#include "impb/rng.hpp"

namespace impb {

enum class Strategy : std::uint8_t { PolicyExploration = 0, ProcedureExploration = 1 };
inline constexpr std::size_t kNumStrategies = 2;

std::string strategy_name(Strategy s);

struct InterestConfig {
    std::size_t split_threshold = 50;  // a region holding more attempts is split
    std::size_t min_child = 10;        // attempts required on each side of a cut
    std::size_t window = 20;           // attempts used by progress()
    std::size_t split_quantiles = 10;  // candidate cuts per dimension
    double p_exploit = 0.7;
    double p_region = 0.2;
    double p_random = 0.1;
    std::array<double, kNumStrategies> costs{1.0, 1.0};

    double cost(Strategy s) const { return costs[static_cast<std::size_t>(s)]; }
    void validate() const;
};

struct Attempt {
    OutcomeVector point;
    double competence = 0.0;
    Strategy strategy = Strategy::PolicyExploration;
    std::size_t episode = 0;
    bool targeted = true;  // false: an outcome reached without being the goal
};

/// Axis-aligned cell of one task space with its attempt history.
struct Region {
    SpaceId space = SpaceId::Tip;
    std::array<double, kMaxOutcomeDim> lo{};
    std::array<double, kMaxOutcomeDim> hi{};
    std::vector<Attempt> attempts;
    std::array<double, kNumStrategies> interest{};  // cached interest(region, strategy)

    static Region whole(SpaceId s);
    bool contains(const OutcomeVector& p) const;
    double volume() const;
};

/// -normalized_distance(reached, goal): 0 is perfect, -1 maximally wrong.
double competence(const OutcomeVector& goal, const OutcomeVector& reached);

/// Mean competence of the newer half minus the older half of the last
/// `window` targeted attempts (all of them when window == 0), optionally
/// restricted to one strategy. 0 with fewer than two attempts.
double progress(std::span<const Attempt> attempts, std::size_t window, std::optional<Strategy> strategy = std::nullopt);

enum class SelectionMode : std::uint8_t { Exploit, RegionSampling, Random };

struct Selection {
    OutcomeVector goal;
    Strategy strategy = Strategy::PolicyExploration;
    SelectionMode mode = SelectionMode::Random;
};

class InterestModel {
public:
    InterestModel(InterestConfig cfg, std::vector<Strategy> strategies);

    const InterestConfig& config() const { return cfg_; }
    const std::vector<Strategy>& strategies() const { return strategies_; }
    const std::vector<Region>& regions(SpaceId s) const { return regions_[index_of(s)]; }
    std::size_t region_count() const;

    double progress(const Region& r) const { return impb::progress(r.attempts, cfg_.window); }
    double interest(const Region& r, Strategy s) const;

    /// Records the goal with its competence (best over `reached` outcomes of the
    /// goal's space, -1 if none), plus one untargeted marker per reached space
    /// (its last outcome in `reached`), then splits overfull regions.
    void update(const OutcomeVector& goal, std::span<const OutcomeVector> reached, Strategy strategy,
                std::size_t episode);

    /// Lower-level insert used by update(); exposed for tests.
    void add_attempt(const Attempt& a);

    Selection select(Rng& rng) const;

    /// Best cut of an overfull region, or nullopt when no cut leaves
    /// min_child attempts on both sides.
    std::optional<std::pair<Region, Region>> split_region(const Region& r) const;

private:
    void refresh(Region& r) const;
    std::size_t locate(SpaceId s, const OutcomeVector& p) const;
    double split_score(const Region& a, const Region& b) const;
    Selection random_selection(Rng& rng) const;

    InterestConfig cfg_;
    std::vector<Strategy> strategies_;
    std::array<std::vector<Region>, kNumSpaces> regions_;
};

}  // namespace impb

#endif  // IMPB_INTEREST_HPP
