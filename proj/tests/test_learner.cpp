#include <doctest.h>

#include <cmath>

#include "impb/error.hpp"
#include "impb/learner.hpp"

using namespace impb;

namespace {

LearnerConfig config_for(Variant v, std::uint64_t seed = 1, std::size_t episodes = 300) {
    LearnerConfig cfg;
    cfg.variant = v;
    cfg.seed = seed;
    cfg.episodes = episodes;
    return cfg;
}

Benchmark tiny_benchmark() {
    BenchmarkSpec spec;
    for (std::size_t s = 0; s < kNumSpaces; ++s) spec.grid[s].assign(dim_of(space_from_index(s)), 2);
    return generate_benchmark(spec);
}

constexpr std::array<Variant, 4> kVariants{Variant::ImPb, Variant::RandomPb, Variant::SaggRiac, Variant::RandomPolicy};

}  // namespace

TEST_CASE("variant names round-trip") {
    for (Variant v : kVariants) CHECK(parse_variant(variant_name(v)) == v);
    CHECK_FALSE(parse_variant("im-pb"));
}

TEST_CASE("config validation and checkpoint cadence") {
    LearnerConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.episodes = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.near_threshold = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.max_random_size = 0;
    CHECK_THROWS_AS(Learner{cfg}, ValidationError);

    cfg = {};
    cfg.episodes = 3000;
    CHECK(cfg.checkpoint_interval() == 60);
    cfg.episodes = 20;
    CHECK(cfg.checkpoint_interval() == 1);
    cfg.checkpoint_every = 7;
    CHECK(cfg.checkpoint_interval() == 7);
}

TEST_CASE("a single episode") {
    const Benchmark bench = tiny_benchmark();
    for (Variant v : kVariants) {
        CAPTURE(variant_name(v));
        const RunResult r = run_learner(config_for(v, 3, 1), bench);
        REQUIRE(r.checkpoints.size() == 1);
        CHECK(r.checkpoints[0].episode == 1);
        CHECK(r.memory.size() >= 1);
        CHECK(r.checkpoints[0].eval.global < 1.0);
        for (const auto& e : r.memory.entries()) CHECK_FALSE(e.procedure.has_value());
    }
}

TEST_CASE("checkpoints follow the cadence and end at the budget") {
    LearnerConfig cfg = config_for(Variant::RandomPolicy, 1, 7);
    cfg.checkpoint_every = 3;
    const RunResult r = run_learner(cfg, tiny_benchmark());
    REQUIRE(r.checkpoints.size() == 3);
    CHECK(r.checkpoints[0].episode == 3);
    CHECK(r.checkpoints[1].episode == 6);
    CHECK(r.checkpoints[2].episode == 7);
}

TEST_CASE("same seed, same run") {
    for (Variant v : kVariants) {
        CAPTURE(variant_name(v));
        Learner a(config_for(v, 9));
        Learner b(config_for(v, 9));
        Learner c(config_for(v, 10));
        bool same = true;
        bool differs = false;
        for (int i = 0; i < 300; ++i) {
            const EpisodeMemo ma = a.step();
            const EpisodeMemo mb = b.step();
            const EpisodeMemo mc = c.step();
            same &= ma.trace.policy == mb.trace.policy && ma.trace.prefix_outcomes == mb.trace.prefix_outcomes &&
                    ma.branch == mb.branch && ma.procedure == mb.procedure;
            differs |= !(ma.trace.policy == mc.trace.policy);
        }
        CHECK(same);
        CHECK(differs);
        CHECK(a.memory().size() == b.memory().size());
    }
}

TEST_CASE("random policy sizes follow the truncated geometric law") {
    LearnerConfig cfg;
    Learner learner(cfg);
    const int draws = 40000;
    std::vector<std::size_t> counts(cfg.max_random_size + 1, 0);
    for (int i = 0; i < draws; ++i) {
        const std::size_t n = learner.random_policy_size();
        REQUIRE(n >= 1);
        REQUIRE(n <= cfg.max_random_size);
        ++counts[n];
    }
    const double p = cfg.size_geometric_p;
    const double mass = 1.0 - std::pow(1.0 - p, static_cast<double>(cfg.max_random_size));
    for (std::size_t n = 1; n <= cfg.max_random_size; ++n) {
        const double expected = p * std::pow(1.0 - p, static_cast<double>(n - 1)) / mass;
        CAPTURE(n);
        CHECK(std::abs(counts[n] / double(draws) - expected) <= 0.01);
    }
    const PolicyParams policy = learner.random_policy();
    for (double x : policy.flatten()) CHECK(std::abs(x) <= 1.0);
}

TEST_CASE("empty memory falls back to random exploration") {
    Learner learner(config_for(Variant::ImPb));
    const OutcomeVector goal(SpaceId::Pen, {0.0, 0.0, 0.0});
    const EpisodeMemo p = learner.goal_directed_policy_optimization(goal);
    CHECK(p.branch == Branch::RandomPolicy);
    CHECK_FALSE(p.procedure_fallback);
    const EpisodeMemo q = learner.goal_directed_procedure_optimization(goal);
    CHECK(q.procedure_fallback);
    CHECK_FALSE(q.procedure.has_value());
    const EpisodeMemo r = learner.random_procedure_episode();
    CHECK(r.procedure_fallback);
    CHECK(r.branch == Branch::RandomPolicy);
    CHECK(learner.memory().size() == 0);
}

TEST_CASE("Random-PB flips a fair coin between its strategies") {
    Learner learner(config_for(Variant::RandomPb, 4, 10000));
    std::size_t procedure_side = 0;
    std::size_t executed = 0;
    const int episodes = 10000;
    for (int i = 0; i < episodes; ++i) {
        const EpisodeMemo m = learner.step();
        CHECK_FALSE(m.selection.has_value());
        const bool procedure = m.branch == Branch::RandomProcedure || m.procedure_fallback;
        procedure_side += procedure;
        executed += m.procedure.has_value();
        if (m.procedure) {
            // the executed policy is the concatenation of the two refined subtask policies
            const auto a = learner.memory().nearest_outcome(m.procedure->first);
            const auto b = learner.memory().nearest_outcome(m.procedure->second);
            REQUIRE(a);
            REQUIRE(b);
            CHECK(m.trace.policy == concat(a->policy(), b->policy()));
        }
    }
    CHECK(std::abs(procedure_side / double(episodes) - 0.5) <= 0.02);
    CHECK(executed > 0);
    CHECK(learner.interest() == nullptr);
}

TEST_CASE("policy-only learners never execute procedures") {
    for (Variant v : {Variant::SaggRiac, Variant::RandomPolicy}) {
        CAPTURE(variant_name(v));
        Learner learner(config_for(v, 5, 1500));
        for (int i = 0; i < 1500; ++i) {
            const EpisodeMemo m = learner.step();
            CHECK_FALSE(m.procedure.has_value());
            CHECK_FALSE(m.procedure_fallback);
            CHECK(m.branch != Branch::RandomProcedure);
            CHECK(m.branch != Branch::LocalProcedure);
            CHECK(m.branch != Branch::PerturbedProcedure);
            if (m.selection) CHECK(m.selection->strategy == Strategy::PolicyExploration);
        }
        for (const auto& e : learner.memory().entries()) CHECK_FALSE(e.procedure.has_value());
    }
    Learner sagg(config_for(Variant::SaggRiac));
    REQUIRE(sagg.interest());
    CHECK(sagg.interest()->strategies() == std::vector<Strategy>{Strategy::PolicyExploration});
    Learner random(config_for(Variant::RandomPolicy));
    CHECK(random.interest() == nullptr);
}

TEST_CASE("IM-PB uses both strategies and annotates procedure entries") {
    Learner learner(config_for(Variant::ImPb, 6, 2000));
    std::array<std::size_t, kNumStrategies> chosen{};
    std::size_t local_policy = 0;
    std::size_t procedures = 0;
    for (int i = 0; i < 2000; ++i) {
        const EpisodeMemo m = learner.step();
        REQUIRE(m.selection.has_value());
        ++chosen[static_cast<std::size_t>(m.selection->strategy)];
        local_policy += m.branch == Branch::LocalPolicy;
        if (m.procedure) {
            ++procedures;
            CHECK(m.selection->strategy == Strategy::ProcedureExploration);
        }
    }
    CHECK(chosen[0] > 0);
    CHECK(chosen[1] > 0);
    CHECK(local_policy > 0);
    CHECK(procedures > 0);

    std::size_t annotated = 0;
    for (const auto& e : learner.memory().entries()) {
        if (!e.procedure) continue;
        ++annotated;
        // only the full executed policy carries the annotation
        CHECK(e.size == e.source->size());
    }
    CHECK(annotated > 0);
    CHECK(learner.episodes_done() == 2000);
}

TEST_CASE("a goal at a stored outcome replays its policy when noise is off") {
    LearnerConfig cfg = config_for(Variant::RandomPolicy, 7, 400);
    cfg.sigma_policy = 0.0;
    Learner learner(cfg);
    for (int i = 0; i < 400; ++i) learner.step();

    int checked = 0;
    for (std::size_t i = 0; i < learner.memory().size() && checked < 25; i += 37) {
        const MemoryEntry& e = learner.memory().entries()[i];
        const MemoryEntry best = *learner.memory().best_policy_for(e.outcome);
        const OutcomeVector goal = best.outcome;
        REQUIRE(learner.memory().best_policy_for(goal)->id == best.id);
        const EpisodeMemo m = learner.goal_directed_policy_optimization(goal);
        CHECK((m.branch == Branch::LocalPolicy || m.branch == Branch::PerturbedPolicy));
        CHECK(m.trace.policy == best.policy());
        bool reproduced = false;
        for (const auto& o : m.trace.prefix_outcomes[best.size - 1]) reproduced |= o == goal;
        CHECK(reproduced);
        ++checked;
    }
    CHECK(checked > 10);
}
