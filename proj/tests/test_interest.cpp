#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "impb/error.hpp"
#include "impb/interest.hpp"
#include "test_support.hpp"

using namespace impb;

namespace {

const std::vector<Strategy> kBoth{Strategy::PolicyExploration, Strategy::ProcedureExploration};

std::vector<Attempt> history(std::initializer_list<double> comps) {
    std::vector<Attempt> out;
    for (double c : comps) out.push_back({OutcomeVector(SpaceId::Tip, {0, 0, 0}), c});
    return out;
}

std::size_t total_attempts(const InterestModel& m, SpaceId s) {
    std::size_t n = 0;
    for (const Region& r : m.regions(s)) n += r.attempts.size();
    return n;
}

bool boxes_overlap(const Region& a, const Region& b) {
    for (std::size_t i = 0; i < dim_of(a.space); ++i) {
        if (a.hi[i] <= b.lo[i] || b.hi[i] <= a.lo[i]) return false;
    }
    return true;
}

// Clustered outcomes make regions fill up quickly; a few exact repeats
// exercise the deferred-split path.
OutcomeVector clustered(std::mt19937_64& rng, SpaceId s) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> n(0.0, 0.15);
    std::bernoulli_distribution repeat(0.05);
    std::array<double, kMaxOutcomeDim> c{};
    const double centre = repeat(rng) ? 0.5 : u(rng) * 0.5;
    for (std::size_t i = 0; i < dim_of(s); ++i) {
        c[i] = repeat(rng) ? 0.5 : std::clamp(centre + n(rng), -1.0, 1.0);
    }
    return OutcomeVector(s, std::span<const double>(c.data(), dim_of(s)));
}

// Competence climbs over time for x < boundary and stays flat elsewhere.
Region two_regime(std::mt19937_64& rng, double boundary, std::size_t m) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Region r = Region::whole(SpaceId::Tip);
    for (std::size_t i = 0; i < m; ++i) {
        const double x = u(rng);
        const double c = x < boundary ? -0.9 + 0.8 * static_cast<double>(i) / static_cast<double>(m - 1) : -0.5;
        r.attempts.push_back({OutcomeVector(SpaceId::Tip, {x, u(rng), u(rng)}), c});
    }
    return r;
}

}  // namespace

TEST_CASE("competence") {
    const OutcomeVector g(SpaceId::Pen, {0.2, 0.3, -0.1});
    CHECK(competence(g, g) == 0.0);
    CHECK(competence(OutcomeVector(SpaceId::Pen, {-1, -1, -1}), OutcomeVector(SpaceId::Pen, {1, 1, 1})) == -1.0);
    CHECK(competence(g, OutcomeVector(SpaceId::Pen, {0.2, 0.3, 0.0})) >
          competence(g, OutcomeVector(SpaceId::Pen, {0.2, 0.3, 0.5})));
    CHECK_THROWS_AS(competence(g, OutcomeVector(SpaceId::Tip, {0, 0, 0})), ValidationError);
}

TEST_CASE("progress over a window") {
    CHECK(progress(history({-0.8, -0.8, -0.4, -0.4}), 4) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(progress(history({-0.4, -0.4, -0.8, -0.8}), 4) == doctest::Approx(-0.4).epsilon(1e-15));
    CHECK(progress(history({-0.3, -0.3, -0.3, -0.3, -0.3}), 4) == 0.0);
    CHECK(progress(history({-0.3}), 4) == 0.0);
    CHECK(progress({}, 4) == 0.0);
    // only the last window entries count
    CHECK(progress(history({-1.0, -1.0, -0.8, -0.8, -0.4, -0.4}), 4) == doctest::Approx(0.4).epsilon(1e-15));

    // untargeted markers and other strategies are skipped
    auto h = history({-0.8, -0.8, -0.4, -0.4});
    h.insert(h.begin() + 2, Attempt{OutcomeVector(SpaceId::Tip, {0, 0, 0}), 0.0, Strategy::PolicyExploration, 0, false});
    h.push_back({OutcomeVector(SpaceId::Tip, {0, 0, 0}), 5.0, Strategy::ProcedureExploration});
    CHECK(progress(h, 4, Strategy::PolicyExploration) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(progress(h, 4, Strategy::ProcedureExploration) == 0.0);
}

TEST_CASE("interest and cost scaling") {
    InterestConfig cfg;
    cfg.window = 4;
    const InterestModel model(cfg, kBoth);
    Region r = Region::whole(SpaceId::Tip);
    r.attempts = history({-0.8, -0.8, -0.4, -0.4});
    CHECK(model.interest(r, Strategy::PolicyExploration) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(model.interest(r, Strategy::ProcedureExploration) == 0.0);

    cfg.costs = {2.0, 1.0};
    const InterestModel costly(cfg, kBoth);
    CHECK(costly.interest(r, Strategy::PolicyExploration) == doctest::Approx(0.2).epsilon(1e-15));
    r.attempts = history({-0.4, -0.4, -0.8, -0.8});
    CHECK(model.interest(r, Strategy::PolicyExploration) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("config validation") {
    InterestConfig cfg;
    cfg.p_exploit = 0.8;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.split_threshold = 15;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.costs = {0.0, 1.0};
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    CHECK_THROWS_AS(InterestModel(InterestConfig{}, {}), ValidationError);
}

TEST_CASE("update bookkeeping") {
    InterestModel model(InterestConfig{}, kBoth);
    const OutcomeVector goal(SpaceId::Pen, {0.1, 0.1, 0.1});
    const std::vector<OutcomeVector> reached{OutcomeVector(SpaceId::Tip, {0.2, 0.2, 0.2}),
                                             OutcomeVector(SpaceId::Pen, {0.5, 0.1, 0.1}),
                                             OutcomeVector(SpaceId::Tip, {0.3, 0.3, 0.3}),
                                             OutcomeVector(SpaceId::Joystick2, {0.0, 0.0, 0.0})};
    model.update(goal, reached, Strategy::ProcedureExploration, 7);

    const auto& pen = model.regions(SpaceId::Pen);
    REQUIRE(pen.size() == 1);
    REQUIRE(pen[0].attempts.size() == 2);
    const Attempt& target = pen[0].attempts[0];
    CHECK(target.targeted);
    CHECK(target.point == goal);
    CHECK(target.competence == competence(goal, reached[1]));
    CHECK(target.strategy == Strategy::ProcedureExploration);
    CHECK(target.episode == 7);
    CHECK_FALSE(pen[0].attempts[1].targeted);

    // the last outcome per reached space is the marker
    REQUIRE(model.regions(SpaceId::Tip)[0].attempts.size() == 1);
    CHECK(model.regions(SpaceId::Tip)[0].attempts[0].point == reached[2]);
    CHECK(model.regions(SpaceId::Joystick2)[0].attempts.size() == 1);
    CHECK(model.regions(SpaceId::Character)[0].attempts.empty());

    // a goal in a space that was not reached scores -1
    model.update(OutcomeVector(SpaceId::Drawing, {0, 0, 0, 0}), reached, Strategy::PolicyExploration, 8);
    CHECK(model.regions(SpaceId::Drawing)[0].attempts[0].competence == -1.0);
}

TEST_CASE("split trigger and deferral") {
    InterestConfig cfg;
    std::mt19937_64 rng(1);
    SUBCASE("one more than the threshold splits") {
        InterestModel model(cfg, kBoth);
        for (std::size_t i = 0; i < cfg.split_threshold; ++i) {
            model.add_attempt({testing::random_outcome(rng, SpaceId::Character), -0.5});
        }
        CHECK(model.regions(SpaceId::Character).size() == 1);
        model.add_attempt({testing::random_outcome(rng, SpaceId::Character), -0.5});
        const auto& rs = model.regions(SpaceId::Character);
        REQUIRE(rs.size() == 2);
        CHECK(rs[0].volume() + rs[1].volume() == doctest::Approx(4.0));
        CHECK(rs[0].attempts.size() + rs[1].attempts.size() == cfg.split_threshold + 1);
        CHECK(rs[0].attempts.size() >= cfg.min_child);
        CHECK(rs[1].attempts.size() >= cfg.min_child);
    }
    SUBCASE("identical points cannot be cut") {
        InterestModel model(cfg, kBoth);
        for (std::size_t i = 0; i < 3 * cfg.split_threshold; ++i) {
            model.add_attempt({OutcomeVector(SpaceId::Character, {0.25, 0.25}), -0.5});
        }
        CHECK(model.regions(SpaceId::Character).size() == 1);
        CHECK(model.regions(SpaceId::Character)[0].attempts.size() == 3 * cfg.split_threshold);
        CHECK_FALSE(model.split_region(model.regions(SpaceId::Character)[0]));
    }
}

TEST_CASE("two-regime split lands near the regime boundary") {
    const InterestModel model(InterestConfig{}, {Strategy::PolicyExploration});
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> where(-0.6, 0.6);
    const std::size_t m = 200;
    const std::size_t quantile = m / model.config().split_quantiles;
    int hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const double boundary = where(rng);
        const Region r = two_regime(rng, boundary, m);
        const auto children = model.split_region(r);
        REQUIRE(children);
        const Region& left = children->first;
        // the cut must be on x, with at most one quantile of points between it and the boundary
        if (left.hi[0] == 1.0) continue;
        const double cut = left.hi[0];
        std::size_t between = 0;
        for (const Attempt& a : r.attempts) {
            between += (a.point[0] >= std::min(cut, boundary) && a.point[0] < std::max(cut, boundary));
        }
        hits += between <= quantile;
    }
    CHECK(hits >= 90);
}

TEST_CASE("partition and conservation under random updates") {
    InterestModel model(InterestConfig{}, kBoth);
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::size_t> space(0, kNumSpaces - 1);
    std::uniform_int_distribution<std::size_t> n_reached(0, 4);
    std::bernoulli_distribution strat(0.5);
    std::array<std::size_t, kNumSpaces> expected{};
    const int updates = 100000;
    for (int i = 0; i < updates; ++i) {
        const OutcomeVector goal = clustered(rng, space_from_index(space(rng)));
        std::vector<OutcomeVector> reached;
        std::array<bool, kNumSpaces> seen{};
        for (std::size_t k = n_reached(rng); k > 0; --k) {
            reached.push_back(clustered(rng, space_from_index(space(rng))));
            seen[index_of(reached.back().space())] = true;
        }
        model.update(goal, reached, strat(rng) ? Strategy::PolicyExploration : Strategy::ProcedureExploration,
                     static_cast<std::size_t>(i));
        ++expected[index_of(goal.space())];
        for (std::size_t s = 0; s < kNumSpaces; ++s) expected[s] += seen[s];
    }

    std::size_t splits = 0;
    for (std::size_t s = 0; s < kNumSpaces; ++s) {
        const SpaceId sid = space_from_index(s);
        const auto& rs = model.regions(sid);
        splits += rs.size() - 1;
        CAPTURE(space_label(sid));
        CHECK(total_attempts(model, sid) == expected[s]);
        double volume = 0.0;
        bool disjoint = true;
        bool placed = true;
        bool non_negative = true;
        for (std::size_t a = 0; a < rs.size(); ++a) {
            volume += rs[a].volume();
            for (std::size_t b = a + 1; b < rs.size(); ++b) disjoint &= !boxes_overlap(rs[a], rs[b]);
            for (const Attempt& at : rs[a].attempts) placed &= rs[a].contains(at.point);
            for (double i : rs[a].interest) non_negative &= i >= 0.0;
        }
        CHECK(volume == doctest::Approx(std::pow(2.0, static_cast<double>(dim_of(sid)))).epsilon(1e-9));
        CHECK(disjoint);
        CHECK(placed);
        CHECK(non_negative);
    }
    CHECK(splits > 100);
}

TEST_CASE("cost scaling leaves the argmax unchanged") {
    InterestConfig cheap;
    InterestConfig dear;
    dear.costs = {3.0, 3.0};
    InterestModel a(cheap, kBoth);
    InterestModel b(dear, kBoth);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> c(-1.0, 0.0);
    for (int i = 0; i < 2000; ++i) {
        const Attempt at{clustered(rng, SpaceId::Pen), c(rng), i % 3 ? Strategy::PolicyExploration : Strategy::ProcedureExploration};
        a.add_attempt(at);
        b.add_attempt(at);
    }
    const auto& ra = a.regions(SpaceId::Pen);
    const auto& rb = b.regions(SpaceId::Pen);
    REQUIRE(ra.size() == rb.size());
    for (Strategy s : kBoth) {
        std::size_t arg_a = 0;
        std::size_t arg_b = 0;
        for (std::size_t i = 0; i < ra.size(); ++i) {
            CHECK(b.interest(rb[i], s) == doctest::Approx(a.interest(ra[i], s) / 3.0).epsilon(1e-12));
            if (a.interest(ra[i], s) > a.interest(ra[arg_a], s)) arg_a = i;
            if (b.interest(rb[i], s) > b.interest(rb[arg_b], s)) arg_b = i;
        }
        CHECK(arg_a == arg_b);
    }
}

TEST_CASE("goal selection") {
    std::mt19937_64 rng(4);

    SUBCASE("an empty model always picks at random") {
        const InterestModel model(InterestConfig{}, kBoth);
        std::array<std::size_t, kNumSpaces> spaces{};
        for (int i = 0; i < 6000; ++i) {
            const Selection s = model.select(rng);
            CHECK(s.mode == SelectionMode::Random);
            CHECK(s.goal.in_bounds());
            ++spaces[index_of(s.goal.space())];
        }
        for (std::size_t n : spaces) CHECK(n > 800);
    }

    SUBCASE("mixture proportions and coverage") {
        InterestConfig cfg;
        cfg.window = 4;
        InterestModel model(cfg, kBoth);
        // a single interesting region in the pen space
        for (double comp : {-0.8, -0.8, -0.4, -0.4}) {
            model.add_attempt({OutcomeVector(SpaceId::Pen, {0.5, 0.5, 0.5}), comp, Strategy::ProcedureExploration});
        }
        std::array<std::size_t, 3> modes{};
        std::array<std::size_t, kNumSpaces> spaces{};
        const int draws = 10000;
        for (int i = 0; i < draws; ++i) {
            const Selection s = model.select(rng);
            ++modes[static_cast<std::size_t>(s.mode)];
            ++spaces[index_of(s.goal.space())];
            if (s.mode != SelectionMode::Random) {
                CHECK(s.goal.space() == SpaceId::Pen);
                CHECK(s.strategy == Strategy::ProcedureExploration);
            }
        }
        CHECK(std::abs(modes[0] / double(draws) - cfg.p_exploit) <= 0.015);
        CHECK(std::abs(modes[1] / double(draws) - cfg.p_region) <= 0.015);
        CHECK(std::abs(modes[2] / double(draws) - cfg.p_random) <= 0.015);
        for (std::size_t n : spaces) CHECK(n / double(draws) >= cfg.p_random / 6.0 - 0.01);
    }

    SUBCASE("exploit picks the region of maximal interest") {
        InterestConfig cfg;
        cfg.p_exploit = 1.0;
        cfg.p_region = 0.0;
        cfg.p_random = 0.0;
        cfg.window = 4;
        InterestModel model(cfg, kBoth);
        for (int i = 0; i < 60; ++i) model.add_attempt({testing::random_outcome(rng, SpaceId::Tip), -0.5});
        for (double comp : {-0.9, -0.9, -0.1, -0.1}) {
            model.add_attempt({OutcomeVector(SpaceId::Joystick1, {-0.5, 0.5, 0.0}), comp});
        }
        for (int i = 0; i < 100; ++i) {
            const Selection s = model.select(rng);
            CHECK(s.goal.space() == SpaceId::Joystick1);
            CHECK(s.strategy == Strategy::PolicyExploration);
            CHECK(s.mode == SelectionMode::Exploit);
        }
    }

    SUBCASE("seeded selection is reproducible") {
        InterestModel model(InterestConfig{}, kBoth);
        for (int i = 0; i < 500; ++i) {
            model.update(clustered(rng, SpaceId::Tip), std::vector<OutcomeVector>{clustered(rng, SpaceId::Tip)},
                         Strategy::PolicyExploration, i);
        }
        std::mt19937_64 r1(99);
        std::mt19937_64 r2(99);
        for (int i = 0; i < 200; ++i) {
            const Selection a = model.select(r1);
            const Selection b = model.select(r2);
            CHECK(a.goal == b.goal);
            CHECK(a.strategy == b.strategy);
            CHECK(a.mode == b.mode);
        }
    }
}
