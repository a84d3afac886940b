#ifndef IMPB_LEARNER_HPP
#define IMPB_LEARNER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "impb/arm_sim.hpp"
#include "impb/eval.hpp"
#include "impb/interest.hpp"
#include "impb/memory.hpp"
#include "impb/procedure.hpp"
#include "impb/rng.hpp"

namespace impb {

enum class Variant : std::uint8_t { ImPb, RandomPb, SaggRiac, RandomPolicy };

std::string variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

struct LearnerConfig {
    Variant variant = Variant::ImPb;
    std::size_t episodes = 3000;
    std::uint64_t seed = 1;
    double near_threshold = 0.1;   // normalized distance separating random from local exploration
    double sigma_policy = 0.05;    // Gaussian perturbation per policy parameter
    std::size_t neighbours = 10;   // k_loc for policy regression
    double max_step = 0.0;         // cap on the policy regression step norm, 0 = none
    std::size_t max_random_size = 6;
    double size_geometric_p = 0.5;
    std::size_t checkpoint_every = 0;  // 0: episodes / 50

    PerfConfig perf;
    DmpConfig dmp;
    WorldConfig world;
    InterestConfig interest;
    ProcedureConfig procedure;

    std::size_t checkpoint_interval() const;
    void validate() const;
};

/// How an episode's policy came about.
enum class Branch : std::uint8_t {
    RandomPolicy,
    LocalPolicy,       // regression step on the best known policy
    PerturbedPolicy,   // regression failed; noise around the best known policy
    RandomProcedure,
    LocalProcedure,
    PerturbedProcedure,
};

std::string branch_name(Branch b);

/// Everything one episode produced.
struct EpisodeMemo {
    EpisodeTrace trace;
    std::optional<Procedure> procedure;  // refined (t1, t2) when a procedure was executed
    Branch branch = Branch::RandomPolicy;
    bool procedure_fallback = false;     // procedure strategy fell back to policy exploration
    std::optional<Selection> selection;  // goal and strategy, for interest-driven variants
};

struct RunResult {
    EpisodicMemory memory;
    std::vector<Checkpoint> checkpoints;
};

/// One learning run: the interest-driven IM-PB loop or one of the baselines.
class Learner {
public:
    explicit Learner(LearnerConfig cfg);

    const LearnerConfig& config() const { return cfg_; }
    const EpisodicMemory& memory() const { return memory_; }
    const InterestModel* interest() const { return interest_ ? &*interest_ : nullptr; }
    const ArmSimulator& simulator() const { return sim_; }
    std::size_t episodes_done() const { return episode_; }

    /// Runs one episode and records it.
    EpisodeMemo step();

    /// Runs the full budget, evaluating on `benchmark` at the checkpoint cadence.
    /// `on_episode` (optional) sees every memo.
    std::vector<Checkpoint> run(const Benchmark& benchmark,
                                const std::function<void(const EpisodeMemo&)>& on_episode = {});

    /// Releases the memory; the learner must not be stepped afterwards.
    EpisodicMemory take_memory() { return std::move(memory_); }

    // Episode building blocks; none of them records into memory.
    EpisodeMemo goal_directed_policy_optimization(const OutcomeVector& goal);
    EpisodeMemo goal_directed_procedure_optimization(const OutcomeVector& goal);
    EpisodeMemo random_policy_episode();
    EpisodeMemo random_procedure_episode();

    PolicyParams random_policy();
    std::size_t random_policy_size();

private:
    EpisodeMemo execute(PolicyParams policy, Branch branch);
    PolicyParams perturb(const std::vector<double>& flat);
    bool near_data(const OutcomeVector& goal) const;

    LearnerConfig cfg_;
    Rng rng_;
    ArmSimulator sim_;
    EpisodicMemory memory_;
    std::optional<InterestModel> interest_;
    std::size_t episode_ = 0;
};

/// Convenience wrapper: constructs a learner and runs it to completion.
RunResult run_learner(const LearnerConfig& cfg, const Benchmark& benchmark);

}  // namespace impb

#endif  // IMPB_LEARNER_HPP
