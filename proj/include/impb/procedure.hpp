#ifndef IMPB_PROCEDURE_HPP
#define IMPB_PROCEDURE_HPP

#include <optional>

#include "impb/memory.hpp"
#include "impb/outcome.hpp"
#include "impb/rng.hpp"

namespace impb {

struct ProcedureConfig {
    std::size_t neighbours = 10;  // k_loc
    double sigma = 0.05;          // per-coordinate perturbation
    double max_step = 0.0;        // cap on the regression step norm, 0 = none

    void validate() const;
};

/// A procedure after nearest-neighbour refinement, ready to execute.
struct RefinedProcedure {
    PolicyParams policy;
    Procedure refined;    // (t1, t2): outcomes actually stored in memory
    MemoryEntry first;    // entry supplying the first part of the policy
    MemoryEntry second;
};

/// Replaces each subtask by the closest reached outcome of its space and
/// chains the policies that reached them. nullopt when either space has no data.
std::optional<RefinedProcedure> refine_and_build(const Procedure& proc, const EpisodicMemory& memory);

/// Two subtasks with uniformly drawn spaces and coordinates.
Procedure random_procedure(Rng& rng);

OutcomeVector random_outcome(Rng& rng, SpaceId space);

struct ProcedureProposal {
    Procedure procedure;
    bool from_regression = false;  // false: perturbation of the best known procedure
};

/// Proposes a procedure for `goal` by local linear regression over the
/// procedure-annotated entries nearest the goal. nullopt when the goal's space
/// holds no procedure-annotated entry at all.
std::optional<ProcedureProposal> local_procedure_optimization(const OutcomeVector& goal, const EpisodicMemory& memory,
                                                              Rng& rng, const ProcedureConfig& cfg);

}  // namespace impb

#endif  // IMPB_PROCEDURE_HPP
