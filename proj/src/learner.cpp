#include "impb/learner.hpp"

#include <algorithm>
#include <cmath>

#include "impb/local_regression.hpp"

namespace impb {

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::ImPb: return "IM-PB";
        case Variant::RandomPb: return "Random-PB";
        case Variant::SaggRiac: return "SAGG-RIAC";
        case Variant::RandomPolicy: break;
    }
    return "RandomPolicy";
}

std::optional<Variant> parse_variant(std::string_view name) {
    for (Variant v : {Variant::ImPb, Variant::RandomPb, Variant::SaggRiac, Variant::RandomPolicy}) {
        if (variant_name(v) == name) return v;
    }
    return std::nullopt;
}

std::string branch_name(Branch b) {
    switch (b) {
        case Branch::RandomPolicy: return "random-policy";
        case Branch::LocalPolicy: return "local-policy";
        case Branch::PerturbedPolicy: return "perturbed-policy";
        case Branch::RandomProcedure: return "random-procedure";
        case Branch::LocalProcedure: return "local-procedure";
        case Branch::PerturbedProcedure: break;
    }
    return "perturbed-procedure";
}

std::size_t LearnerConfig::checkpoint_interval() const {
    if (checkpoint_every > 0) return checkpoint_every;
    return std::max<std::size_t>(1, episodes / 50);
}

void LearnerConfig::validate() const {
    if (episodes < 1) throw ValidationError("experiment.episodes must be at least 1");
    if (!(near_threshold > 0.0 && near_threshold < 1.0)) throw ValidationError("learner.near_threshold must lie in (0, 1)");
    if (!(sigma_policy >= 0.0)) throw ValidationError("learner.sigma_policy must be non-negative");
    if (neighbours < 2) throw ValidationError("learner.neighbours must be at least 2");
    if (!(max_step >= 0.0)) throw ValidationError("learner.max_step must be non-negative");
    if (max_random_size < 1) throw ValidationError("learner.max_random_size must be at least 1");
    if (!(size_geometric_p > 0.0 && size_geometric_p <= 1.0)) throw ValidationError("learner.size_geometric_p must lie in (0, 1]");
    perf.validate();
    dmp.validate();
    world.validate();
    interest.validate();
    procedure.validate();
}

Learner::Learner(LearnerConfig cfg)
    : cfg_(std::move(cfg)), rng_(cfg_.seed), sim_(cfg_.world, cfg_.dmp), memory_(cfg_.perf) {
    cfg_.validate();
    if (cfg_.variant == Variant::ImPb) {
        interest_.emplace(cfg_.interest,
                          std::vector<Strategy>{Strategy::PolicyExploration, Strategy::ProcedureExploration});
    } else if (cfg_.variant == Variant::SaggRiac) {
        interest_.emplace(cfg_.interest, std::vector<Strategy>{Strategy::PolicyExploration});
    }
}

std::size_t Learner::random_policy_size() {
    std::vector<double> weights(cfg_.max_random_size);
    for (std::size_t k = 0; k < weights.size(); ++k) {
        weights[k] = cfg_.size_geometric_p * std::pow(1.0 - cfg_.size_geometric_p, static_cast<double>(k));
    }
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    return pick(rng_) + 1;
}

PolicyParams Learner::random_policy() {
    const std::size_t n = random_policy_size();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> flat(n * kPrimitiveDim);
    for (double& x : flat) x = u(rng_);
    return PolicyParams::from_flat(flat);
}

PolicyParams Learner::perturb(const std::vector<double>& flat) {
    std::normal_distribution<double> noise(0.0, cfg_.sigma_policy);
    std::vector<double> out(flat);
    for (double& x : out) x = std::clamp(x + (cfg_.sigma_policy > 0.0 ? noise(rng_) : 0.0), -1.0, 1.0);
    return PolicyParams::from_flat(out);
}

EpisodeMemo Learner::execute(PolicyParams policy, Branch branch) {
    return EpisodeMemo{sim_.execute_policy(policy), std::nullopt, branch, false, std::nullopt};
}

bool Learner::near_data(const OutcomeVector& goal) const {
    const auto nearest = memory_.nearest_outcome(goal);
    return nearest && normalized_distance(nearest->outcome, goal) <= cfg_.near_threshold;
}

EpisodeMemo Learner::random_policy_episode() { return execute(random_policy(), Branch::RandomPolicy); }

EpisodeMemo Learner::goal_directed_policy_optimization(const OutcomeVector& goal) {
    if (!near_data(goal)) return random_policy_episode();

    const MemoryEntry best = *memory_.best_policy_for(goal);
    const std::vector<double> theta = best.policy().flatten();
    const auto sample_of = [](const MemoryEntry& e) {
        return LocalSample{e.policy().flatten(), std::vector<double>(e.outcome.coords().begin(), e.outcome.coords().end())};
    };
    std::vector<LocalSample> others;
    for (const MemoryEntry& e : memory_.nearest_of_size(goal, best.size, cfg_.neighbours)) {
        if (e.id != best.id) others.push_back(sample_of(e));
    }
    const LocalSample base{theta, std::vector<double>(best.outcome.coords().begin(), best.outcome.coords().end())};
    if (auto step = local_linear_step(base, others, goal.coords(), cfg_.max_step)) {
        return execute(perturb(*step), Branch::LocalPolicy);
    }
    return execute(perturb(theta), Branch::PerturbedPolicy);
}

EpisodeMemo Learner::goal_directed_procedure_optimization(const OutcomeVector& goal) {
    Procedure proc;
    Branch branch = Branch::RandomProcedure;
    std::optional<ProcedureProposal> proposal;
    if (near_data(goal)) proposal = local_procedure_optimization(goal, memory_, rng_, cfg_.procedure);
    if (proposal) {
        proc = proposal->procedure;
        branch = proposal->from_regression ? Branch::LocalProcedure : Branch::PerturbedProcedure;
    } else {
        proc = random_procedure(rng_);
    }

    auto refined = refine_and_build(proc, memory_);
    if (!refined) {
        EpisodeMemo memo = goal_directed_policy_optimization(goal);
        memo.procedure_fallback = true;
        return memo;
    }
    EpisodeMemo memo = execute(std::move(refined->policy), branch);
    memo.procedure = refined->refined;
    return memo;
}

EpisodeMemo Learner::random_procedure_episode() {
    auto refined = refine_and_build(random_procedure(rng_), memory_);
    if (!refined) {
        EpisodeMemo memo = random_policy_episode();
        memo.procedure_fallback = true;
        return memo;
    }
    EpisodeMemo memo = execute(std::move(refined->policy), Branch::RandomProcedure);
    memo.procedure = refined->refined;
    return memo;
}

EpisodeMemo Learner::step() {
    EpisodeMemo memo = [this] {
        switch (cfg_.variant) {
            case Variant::RandomPolicy:
                return random_policy_episode();
            case Variant::RandomPb: {
                std::bernoulli_distribution coin(0.5);
                return coin(rng_) ? random_procedure_episode() : random_policy_episode();
            }
            case Variant::ImPb:
            case Variant::SaggRiac:
                break;
        }
        const Selection sel = interest_->select(rng_);
        EpisodeMemo m = sel.strategy == Strategy::ProcedureExploration ? goal_directed_procedure_optimization(sel.goal)
                                                                       : goal_directed_policy_optimization(sel.goal);
        m.selection = sel;
        return m;
    }();

    memory_.record(memo.trace, memo.procedure);
    if (interest_) {
        std::vector<OutcomeVector> reached;
        for (const auto& prefix : memo.trace.prefix_outcomes) reached.insert(reached.end(), prefix.begin(), prefix.end());
        interest_->update(memo.selection->goal, reached, memo.selection->strategy, episode_);
    }
    ++episode_;
    return memo;
}

std::vector<Checkpoint> Learner::run(const Benchmark& benchmark,
                                     const std::function<void(const EpisodeMemo&)>& on_episode) {
    std::vector<Checkpoint> checkpoints;
    const std::size_t every = cfg_.checkpoint_interval();
    while (episode_ < cfg_.episodes) {
        const EpisodeMemo memo = step();
        if (on_episode) on_episode(memo);
        if (episode_ % every == 0 || episode_ == cfg_.episodes) {
            checkpoints.push_back({episode_, evaluate(memory_, benchmark)});
        }
    }
    return checkpoints;
}

RunResult run_learner(const LearnerConfig& cfg, const Benchmark& benchmark) {
    Learner learner(cfg);
    auto checkpoints = learner.run(benchmark);
    return {learner.take_memory(), std::move(checkpoints)};
}

}  // namespace impb
